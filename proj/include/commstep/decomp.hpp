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

// Two-communicator rank grid and the collective phases executed each step.
//
// Rank r maps to (i, j) with r = j * n1 + i. The comm1 group of a rank is the
// set sharing its j (extent n1, fixed by the problem); the comm2 group is the
// set sharing its i (extent n2, grows with the rank count).

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace commstep {

enum class Comm { comm1, comm2 };
enum class CollectiveKind { alltoall, allreduce };

std::string_view to_string(Comm comm);
std::string_view to_string(CollectiveKind kind);

struct PhaseSpec {
  std::string label;
  Comm comm = Comm::comm1;
  CollectiveKind kind = CollectiveKind::alltoall;
  /// alltoall: grid data spread over all ranks (total GB).
  /// allreduce: reduction buffer replicated on every rank (GB per rank).
  double volume_gb = 0.0;

  bool operator==(const PhaseSpec&) const = default;
};

struct ProblemSpec {
  std::string name;
  int n_toroidal = 1;
  double min_total_gpu_mem_gb = 0.0;
  std::vector<PhaseSpec> phases;

  bool operator==(const ProblemSpec&) const = default;
};

ProblemSpec parse_problem(std::string_view text);
std::string serialize_problem(const ProblemSpec& problem);

/// Copy of `problem` with phase volumes replaced by `volumes` (keyed by label).
/// Phases absent from the map keep their volume.
ProblemSpec with_phase_volumes(const ProblemSpec& problem,
                               const std::map<std::string, double>& volumes);

struct GridCoord {
  int i = 0;
  int j = 0;
  bool operator==(const GridCoord&) const = default;
};

struct RankGrid {
  int n1 = 1;
  int n2 = 1;

  int total() const { return n1 * n2; }
  GridCoord coord(int rank) const { return {rank % n1, rank / n1}; }
  int rank(GridCoord c) const { return c.j * n1 + c.i; }
  int comm_size(Comm comm) const { return comm == Comm::comm1 ? n1 : n2; }

  bool operator==(const RankGrid&) const = default;
};

/// Throws CapacityError unless total_ranks is a positive multiple of
/// n_toroidal.
RankGrid build_grid(int n_toroidal, int total_ranks);
RankGrid build_grid(const ProblemSpec& problem, int total_ranks);

/// Sorted member ranks of the comm1 (resp. comm2) group containing `rank`.
std::vector<int> comm1_members(const RankGrid& grid, int rank);
std::vector<int> comm2_members(const RankGrid& grid, int rank);
std::vector<int> comm_members(const RankGrid& grid, Comm comm, int rank);

/// Every group of `comm`, each sorted ascending, ordered by their first rank.
std::vector<std::vector<int>> comm_groups(const RankGrid& grid, Comm comm);

/// Payload each rank contributes to the phase: alltoall V / total ranks,
/// allreduce b.
double phase_per_rank_gb(const PhaseSpec& phase, const RankGrid& grid);

}  // namespace commstep
