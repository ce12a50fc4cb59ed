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

#include "commstep/decomp.hpp"

#include <cmath>
#include <limits>

#include "commstep/error.hpp"
#include "commstep/kvdoc.hpp"

namespace commstep {
namespace {

constexpr std::string_view kPhasePrefix = "phase.";

void check_rank(const RankGrid& grid, int rank) {
  if (rank < 0 || rank >= grid.total()) {
    throw InvariantError("rank", std::to_string(rank) + " outside grid of " +
                                     std::to_string(grid.total()) + " ranks");
  }
}

}  // namespace

std::string_view to_string(Comm comm) { return comm == Comm::comm1 ? "comm1" : "comm2"; }

std::string_view to_string(CollectiveKind kind) {
  return kind == CollectiveKind::alltoall ? "alltoall" : "allreduce";
}

ProblemSpec parse_problem(std::string_view text) {
  const auto doc = parse_kv(text);
  ProblemSpec p;
  {
    SectionReader r(doc.require("problem"));
    p.name = r.text("name");
    const auto n = r.integer("n_toroidal");
    if (n < 1 || n > std::numeric_limits<int>::max()) {
      throw InvariantError("problem.n_toroidal", "must be >= 1");
    }
    p.n_toroidal = static_cast<int>(n);
    p.min_total_gpu_mem_gb = r.number("min_total_gpu_mem_gb");
    if (!(p.min_total_gpu_mem_gb >= 0.0)) {
      throw InvariantError("problem.min_total_gpu_mem_gb", "must be >= 0");
    }
    r.finish();
  }
  for (const auto& s : doc.sections) {
    if (s.name == "problem") continue;
    if (!s.name.starts_with(kPhasePrefix) || s.name.size() == kPhasePrefix.size()) {
      throw ParseError(s.line, "unknown section [" + s.name + "]");
    }
    PhaseSpec ph;
    ph.label = s.name.substr(kPhasePrefix.size());
    SectionReader r(s);
    const auto comm = r.text("comm");
    if (comm == "comm1") {
      ph.comm = Comm::comm1;
    } else if (comm == "comm2") {
      ph.comm = Comm::comm2;
    } else {
      throw InvariantError(s.name + ".comm", "expected comm1 or comm2, got '" + comm + "'");
    }
    const auto kind = r.text("kind");
    const char* volume_key = nullptr;
    if (kind == "alltoall") {
      ph.kind = CollectiveKind::alltoall;
      volume_key = "total_gb";
    } else if (kind == "allreduce") {
      ph.kind = CollectiveKind::allreduce;
      volume_key = "per_rank_gb";
    } else {
      throw InvariantError(s.name + ".kind", "expected alltoall or allreduce, got '" + kind + "'");
    }
    ph.volume_gb = r.number(volume_key);
    if (!(ph.volume_gb > 0.0) || !std::isfinite(ph.volume_gb)) {
      throw InvariantError(s.name + "." + volume_key, "must be > 0");
    }
    r.finish();
    p.phases.push_back(std::move(ph));
  }
  if (p.phases.empty()) throw InvariantError("problem.phases", "at least one [phase.*] required");
  return p;
}

std::string serialize_problem(const ProblemSpec& p) {
  KvWriter w;
  w.section("problem")
      .put("name", p.name)
      .put("n_toroidal", std::int64_t{p.n_toroidal})
      .put("min_total_gpu_mem_gb", p.min_total_gpu_mem_gb);
  for (const auto& ph : p.phases) {
    w.section(std::string(kPhasePrefix) + ph.label)
        .put("comm", to_string(ph.comm))
        .put("kind", to_string(ph.kind))
        .put(ph.kind == CollectiveKind::alltoall ? "total_gb" : "per_rank_gb", ph.volume_gb);
  }
  return w.str();
}

ProblemSpec with_phase_volumes(const ProblemSpec& problem,
                               const std::map<std::string, double>& volumes) {
  ProblemSpec out = problem;
  for (auto& ph : out.phases) {
    if (const auto it = volumes.find(ph.label); it != volumes.end()) ph.volume_gb = it->second;
  }
  return out;
}

RankGrid build_grid(int n_toroidal, int total_ranks) {
  if (n_toroidal < 1) throw InvariantError("n_toroidal", "must be >= 1");
  if (total_ranks < 1 || total_ranks % n_toroidal != 0) {
    throw CapacityError("total ranks " + std::to_string(total_ranks) +
                        " is not a positive multiple of n_toroidal=" + std::to_string(n_toroidal));
  }
  return RankGrid{n_toroidal, total_ranks / n_toroidal};
}

RankGrid build_grid(const ProblemSpec& problem, int total_ranks) {
  return build_grid(problem.n_toroidal, total_ranks);
}

std::vector<int> comm1_members(const RankGrid& grid, int rank) {
  check_rank(grid, rank);
  const int j = grid.coord(rank).j;
  std::vector<int> out;
  out.reserve(grid.n1);
  for (int i = 0; i < grid.n1; ++i) out.push_back(grid.rank({i, j}));
  return out;
}

std::vector<int> comm2_members(const RankGrid& grid, int rank) {
  check_rank(grid, rank);
  const int i = grid.coord(rank).i;
  std::vector<int> out;
  out.reserve(grid.n2);
  for (int j = 0; j < grid.n2; ++j) out.push_back(grid.rank({i, j}));
  return out;
}

std::vector<int> comm_members(const RankGrid& grid, Comm comm, int rank) {
  return comm == Comm::comm1 ? comm1_members(grid, rank) : comm2_members(grid, rank);
}

std::vector<std::vector<int>> comm_groups(const RankGrid& grid, Comm comm) {
  std::vector<std::vector<int>> groups;
  if (comm == Comm::comm1) {
    for (int j = 0; j < grid.n2; ++j) groups.push_back(comm1_members(grid, grid.rank({0, j})));
  } else {
    for (int i = 0; i < grid.n1; ++i) groups.push_back(comm2_members(grid, grid.rank({i, 0})));
  }
  return groups;
}

double phase_per_rank_gb(const PhaseSpec& phase, const RankGrid& grid) {
  if (phase.kind == CollectiveKind::alltoall) return phase.volume_gb / grid.total();
  return phase.volume_gb;
}

}  // namespace commstep
