// Copyright 2026 The commstep Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "commstep/assets.hpp"
#include "commstep/decomp.hpp"
#include "commstep/error.hpp"
#include "commstep/traffic.hpp"

namespace commstep {
namespace {

std::vector<int> ranks_of(const RankGrid& g, std::initializer_list<GridCoord> coords) {
  std::vector<int> out;
  for (const auto& c : coords) out.push_back(g.rank(c));
  std::sort(out.begin(), out.end());
  return out;
}

TEST(DecompGrid, Shapes) {
  EXPECT_EQ(build_grid(8, 64), (RankGrid{8, 8}));
  EXPECT_EQ(build_grid(8, 8), (RankGrid{8, 1}));
}

TEST(DecompGrid, NonMultipleNamesNToroidal) {
  try {
    build_grid(8, 12);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("n_toroidal"), std::string::npos) << e.what();
  }
  EXPECT_THROW(build_grid(8, 0), CapacityError);
}

TEST(DecompGrid, RankCoordBijection) {
  const RankGrid g{4, 3};
  std::set<int> seen;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int r = g.rank({i, j});
      EXPECT_EQ(r, j * 4 + i);
      EXPECT_EQ(g.coord(r), (GridCoord{i, j}));
      seen.insert(r);
    }
  }
  EXPECT_EQ(seen.size(), 12u);
}

TEST(DecompComm, Members4x2) {
  const RankGrid g{4, 2};
  const int r = g.rank({1, 0});
  EXPECT_EQ(comm1_members(g, r), ranks_of(g, {{0, 0}, {1, 0}, {2, 0}, {3, 0}}));
  EXPECT_EQ(comm2_members(g, r), ranks_of(g, {{1, 0}, {1, 1}}));
}

TEST(DecompComm, DegenerateGroups) {
  const RankGrid a{1, 5};
  for (int r = 0; r < 5; ++r) EXPECT_EQ(comm1_members(a, r), std::vector<int>{r});
  const RankGrid b{4, 1};
  for (int r = 0; r < 4; ++r) EXPECT_EQ(comm2_members(b, r), std::vector<int>{r});
}

TEST(DecompComm, OutOfRange) {
  const RankGrid g{4, 2};
  EXPECT_THROW(comm1_members(g, 8), InputError);
  EXPECT_THROW(comm2_members(g, -1), InputError);
}

// Exhaustive check against a partition built from raw coordinates.
TEST(DecompComm, OrthogonalPartitionUpTo256) {
  for (int total = 1; total <= 256; ++total) {
    for (int n1 = 1; n1 <= total; ++n1) {
      if (total % n1 != 0) continue;
      const auto g = build_grid(n1, total);
      for (Comm comm : {Comm::comm1, Comm::comm2}) {
        std::vector<int> owner(total, -1);
        const auto groups = comm_groups(g, comm);
        ASSERT_EQ(static_cast<int>(groups.size()), comm == Comm::comm1 ? g.n2 : g.n1);
        for (std::size_t k = 0; k < groups.size(); ++k) {
          for (int r : groups[k]) {
            ASSERT_EQ(owner[r], -1);
            owner[r] = static_cast<int>(k);
          }
        }
        ASSERT_TRUE(std::none_of(owner.begin(), owner.end(), [](int o) { return o < 0; }));
      }
      for (int r = 0; r < total; ++r) {
        const auto c1 = comm1_members(g, r);
        const auto c2 = comm2_members(g, r);
        ASSERT_EQ(static_cast<int>(c1.size()), n1);
        std::vector<int> both;
        std::set_intersection(c1.begin(), c1.end(), c2.begin(), c2.end(), std::back_inserter(both));
        ASSERT_EQ(both, std::vector<int>{r}) << n1 << "x" << g.n2 << " rank " << r;
        for (int q : c1) ASSERT_EQ(q / n1, r / n1);
        for (int q : c2) ASSERT_EQ(q % n1, r % n1);
      }
    }
  }
}

TEST(DecompPayload, PerRank) {
  const PhaseSpec a2a{"a", Comm::comm1, CollectiveKind::alltoall, 102.4};
  EXPECT_DOUBLE_EQ(phase_per_rank_gb(a2a, RankGrid{16, 4}), 1.6);
  const PhaseSpec red{"r", Comm::comm1, CollectiveKind::allreduce, 0.2};
  EXPECT_DOUBLE_EQ(phase_per_rank_gb(red, RankGrid{16, 4}), 0.2);
  EXPECT_DOUBLE_EQ(phase_per_rank_gb(red, RankGrid{8, 1}), 0.2);
  const PhaseSpec one{"o", Comm::comm1, CollectiveKind::alltoall, 1.0};
  EXPECT_DOUBLE_EQ(phase_per_rank_gb(one, RankGrid{1, 1}), 1.0);
}

TEST(DecompPayload, ScalingLaws) {
  const PhaseSpec a2a{"a", Comm::comm1, CollectiveKind::alltoall, 64.0};
  const PhaseSpec red{"r", Comm::comm1, CollectiveKind::allreduce, 0.5};
  double prev_a2a = 1e300;
  double prev_total = 0.0;
  for (int n2 = 1; n2 <= 32; ++n2) {
    const RankGrid g{4, n2};
    const double per = phase_per_rank_gb(a2a, g);
    EXPECT_LT(per, prev_a2a);
    prev_a2a = per;
    EXPECT_DOUBLE_EQ(phase_per_rank_gb(red, g), 0.5);
    const double total = g.total() * allreduce_offrank_gb(phase_per_rank_gb(red, g), g.n1);
    EXPECT_GT(total, prev_total);
    prev_total = total;
    EXPECT_EQ(g.comm_size(Comm::comm1), 4);
  }
}

TEST(DecompProblem, BundledNl03) {
  const auto p = load_problem("nl03");
  EXPECT_EQ(p.name, "nl03");
  EXPECT_EQ(p.n_toroidal, 16);
  EXPECT_DOUBLE_EQ(p.min_total_gpu_mem_gb, 600.0);
  ASSERT_EQ(p.phases.size(), 3u);
  EXPECT_EQ(p.phases[0].comm, Comm::comm1);
  EXPECT_EQ(p.phases[1].comm, Comm::comm2);
  EXPECT_EQ(p.phases[2].kind, CollectiveKind::allreduce);
  EXPECT_EQ(parse_problem(serialize_problem(p)), p);
}

TEST(DecompProblem, Errors) {
  EXPECT_THROW(parse_problem("[problem]\nname = x\nn_toroidal = 4\nmin_total_gpu_mem_gb = 0\n"),
               InputError);
  EXPECT_THROW(parse_problem("[problem]\nname = x\nn_toroidal = 0\nmin_total_gpu_mem_gb = 0\n"
                             "[phase.a]\ncomm = comm1\nkind = alltoall\ntotal_gb = 1\n"),
               InvariantError);
  EXPECT_THROW(parse_problem("[problem]\nname = x\nn_toroidal = 2\nmin_total_gpu_mem_gb = 0\n"
                             "[phase.a]\ncomm = comm1\nkind = alltoall\nper_rank_gb = 1\n"),
               InputError);
  EXPECT_THROW(parse_problem("[problem]\nname = x\nn_toroidal = 2\nmin_total_gpu_mem_gb = 0\n"
                             "[phase.a]\ncomm = comm3\nkind = alltoall\ntotal_gb = 1\n"),
               InputError);
}

TEST(DecompProblem, WithPhaseVolumes) {
  const auto p = load_problem("nl03");
  const auto q = with_phase_volumes(p, {{"a2a_comm2", 1.5}});
  EXPECT_DOUBLE_EQ(q.phases[1].volume_gb, 1.5);
  EXPECT_DOUBLE_EQ(q.phases[0].volume_gb, p.phases[0].volume_gb);
}

}  // namespace
}  // namespace commstep
