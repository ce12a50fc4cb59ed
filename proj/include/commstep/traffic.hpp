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

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "commstep/decomp.hpp"
#include "commstep/topology.hpp"

namespace commstep {

enum class PlacementStrategy { block_comm1, block_comm2, round_robin, explicit_map };

inline constexpr std::array<PlacementStrategy, 3> kEnumerableStrategies = {
    PlacementStrategy::block_comm1, PlacementStrategy::block_comm2,
    PlacementStrategy::round_robin};

std::string_view to_string(PlacementStrategy s);
/// Accepts block_comm1, block_comm2, round_robin, explicit.
PlacementStrategy parse_strategy(std::string_view text);

struct UnitSlot {
  int node = 0;
  int unit = 0;
  bool operator==(const UnitSlot&) const = default;
};

struct Placement {
  PlacementStrategy strategy = PlacementStrategy::block_comm1;
  int ranks_per_unit = 1;
  int nodes_used = 1;
  int units_per_node = 1;
  /// Indexed by rank.
  std::vector<UnitSlot> assignment;

  int global_unit(int rank) const {
    const auto& s = assignment[rank];
    return s.node * units_per_node + s.unit;
  }
  int total_units() const { return nodes_used * units_per_node; }
};

/// Materializes a placement.
///
/// * block_comm1 fills units then nodes in rank order (i fastest), so comm1
///   groups stay together.
/// * block_comm2 fills in (j fastest) order, keeping comm2 groups together.
/// * round_robin sends rank r to slot r mod total_units, with slots enumerated
///   node-cyclically (slot s lives on node s mod nodes_used), which spreads
///   every group across as many nodes as possible.
///
/// Throws CapacityError when nodes_used * units * ranks_per_unit differs from
/// the rank count or nodes_used exceeds the machine.
Placement make_placement(const RankGrid& grid, const Machine& machine, int nodes_used,
                         int ranks_per_unit, PlacementStrategy strategy);

/// User-supplied assignment; every unit must host exactly ranks_per_unit ranks.
Placement make_explicit_placement(const RankGrid& grid, const Machine& machine, int nodes_used,
                                  int ranks_per_unit, std::vector<UnitSlot> assignment);

enum class LinkClass { local = 0, fabric = 1, cross_domain = 2, internode = 3 };
inline constexpr std::size_t kLinkClassCount = 4;
std::string_view to_string(LinkClass c);

using ClassBytes = std::array<double, kLinkClassCount>;

LinkClass classify_pair(const Placement& placement, const Machine& machine, int rank_a,
                        int rank_b);

/// Off-rank bytes one rank sends in a pairwise all-to-all of B over p ranks.
double alltoall_offrank_gb(double per_rank_gb, int comm_size);
/// Off-rank bytes one rank sends in a ring allreduce of b over p ranks.
double allreduce_offrank_gb(double per_rank_gb, int comm_size);

struct PhaseTraffic {
  std::string label;
  Comm comm = Comm::comm1;
  CollectiveKind kind = CollectiveKind::alltoall;
  ClassBytes class_gb{};
  /// Per global unit: fabric-class bytes sent.
  std::vector<double> unit_fabric_gb;
  /// Per global unit: all non-local bytes sent.
  std::vector<double> unit_egress_gb;
  /// Per global unit: internode bytes sent.
  std::vector<double> unit_internode_gb;
  /// Per node: internode bytes sent.
  std::vector<double> node_internode_gb;
  /// Per node: bytes crossing between fabric domains, both directions.
  std::vector<double> node_cross_gb;

  double offrank_gb() const;
};

struct EgressStats {
  double max = 0.0;
  double mean = 0.0;
};

struct TrafficBreakdown {
  std::vector<PhaseTraffic> phases;
  /// Non-local bytes leaving each unit, summed over phases.
  EgressStats per_unit_egress_gb;
  /// Internode bytes leaving each node, summed over phases.
  EgressStats per_node_egress_gb;

  ClassBytes class_totals() const;
};

/// Charges every phase over the placement. Alltoall sends B/p to each peer of
/// the group; allreduce sends 2b(p-1)/p from each member to its successor in
/// the ascending-rank ring.
TrafficBreakdown accumulate_traffic(const RankGrid& grid, const std::vector<PhaseSpec>& phases,
                                    const Placement& placement, const Machine& machine);

}  // namespace commstep
