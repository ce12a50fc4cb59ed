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

#include "commstep/traffic.hpp"

#include <algorithm>
#include <numeric>

#include "commstep/error.hpp"

namespace commstep {
namespace {

void check_capacity(const RankGrid& grid, const Machine& machine, int nodes_used,
                    int ranks_per_unit) {
  if (nodes_used < 1) throw CapacityError("nodes_used must be >= 1");
  if (ranks_per_unit < 1) throw CapacityError("ranks_per_unit must be >= 1");
  if (nodes_used > machine.max_nodes) {
    throw CapacityError("nodes_used=" + std::to_string(nodes_used) + " exceeds " + machine.name +
                        " max_nodes=" + std::to_string(machine.max_nodes));
  }
  const long slots = static_cast<long>(nodes_used) * machine.node.units * ranks_per_unit;
  if (slots != grid.total()) {
    throw CapacityError(std::to_string(nodes_used) + " nodes x " +
                        std::to_string(machine.node.units) + " units x " +
                        std::to_string(ranks_per_unit) + " ranks/unit = " + std::to_string(slots) +
                        " slots, grid has " + std::to_string(grid.total()) + " ranks");
  }
}

EgressStats stats(const std::vector<double>& v) {
  EgressStats s;
  if (v.empty()) return s;
  s.max = *std::max_element(v.begin(), v.end());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

}  // namespace

std::string_view to_string(PlacementStrategy s) {
  switch (s) {
    case PlacementStrategy::block_comm1: return "block_comm1";
    case PlacementStrategy::block_comm2: return "block_comm2";
    case PlacementStrategy::round_robin: return "round_robin";
    case PlacementStrategy::explicit_map: return "explicit";
  }
  return "?";
}

PlacementStrategy parse_strategy(std::string_view text) {
  if (text == "block_comm1") return PlacementStrategy::block_comm1;
  if (text == "block_comm2") return PlacementStrategy::block_comm2;
  if (text == "round_robin") return PlacementStrategy::round_robin;
  if (text == "explicit") return PlacementStrategy::explicit_map;
  throw InputError("unknown placement strategy '" + std::string(text) + "'");
}

std::string_view to_string(LinkClass c) {
  switch (c) {
    case LinkClass::local: return "local";
    case LinkClass::fabric: return "fabric";
    case LinkClass::cross_domain: return "cross_domain";
    case LinkClass::internode: return "internode";
  }
  return "?";
}

Placement make_placement(const RankGrid& grid, const Machine& machine, int nodes_used,
                         int ranks_per_unit, PlacementStrategy strategy) {
  if (strategy == PlacementStrategy::explicit_map) {
    throw InputError("explicit placement needs an assignment map");
  }
  check_capacity(grid, machine, nodes_used, ranks_per_unit);
  Placement p;
  p.strategy = strategy;
  p.ranks_per_unit = ranks_per_unit;
  p.nodes_used = nodes_used;
  p.units_per_node = machine.node.units;
  p.assignment.resize(grid.total());
  const int upn = machine.node.units;
  const int total_units = p.total_units();

  for (int r = 0; r < grid.total(); ++r) {
    UnitSlot slot;
    switch (strategy) {
      case PlacementStrategy::block_comm1: {
        const int g = r / ranks_per_unit;
        slot = {g / upn, g % upn};
        break;
      }
      case PlacementStrategy::block_comm2: {
        const auto c = grid.coord(r);
        const int order = c.i * grid.n2 + c.j;
        const int g = order / ranks_per_unit;
        slot = {g / upn, g % upn};
        break;
      }
      case PlacementStrategy::round_robin: {
        const int s = r % total_units;
        slot = {s % nodes_used, s / nodes_used};
        break;
      }
      case PlacementStrategy::explicit_map: break;
    }
    p.assignment[r] = slot;
  }
  return p;
}

Placement make_explicit_placement(const RankGrid& grid, const Machine& machine, int nodes_used,
                                  int ranks_per_unit, std::vector<UnitSlot> assignment) {
  check_capacity(grid, machine, nodes_used, ranks_per_unit);
  if (static_cast<int>(assignment.size()) != grid.total()) {
    throw CapacityError("explicit map has " + std::to_string(assignment.size()) +
                        " entries, grid has " + std::to_string(grid.total()) + " ranks");
  }
  const int upn = machine.node.units;
  std::vector<int> load(static_cast<std::size_t>(nodes_used) * upn, 0);
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    const auto& s = assignment[r];
    if (s.node < 0 || s.node >= nodes_used || s.unit < 0 || s.unit >= upn) {
      throw CapacityError("rank " + std::to_string(r) + " mapped outside the machine");
    }
    ++load[static_cast<std::size_t>(s.node) * upn + s.unit];
  }
  for (std::size_t g = 0; g < load.size(); ++g) {
    if (load[g] != ranks_per_unit) {
      throw CapacityError("unit " + std::to_string(g % upn) + " of node " +
                          std::to_string(g / upn) + " hosts " + std::to_string(load[g]) +
                          " ranks, expected " + std::to_string(ranks_per_unit));
    }
  }
  Placement p;
  p.strategy = PlacementStrategy::explicit_map;
  p.ranks_per_unit = ranks_per_unit;
  p.nodes_used = nodes_used;
  p.units_per_node = upn;
  p.assignment = std::move(assignment);
  return p;
}

LinkClass classify_pair(const Placement& placement, const Machine& machine, int rank_a,
                        int rank_b) {
  const auto& a = placement.assignment.at(rank_a);
  const auto& b = placement.assignment.at(rank_b);
  if (a.node != b.node) return LinkClass::internode;
  if (a.unit == b.unit) return LinkClass::local;
  if (fabric_domain(machine, a.unit) != fabric_domain(machine, b.unit)) {
    return LinkClass::cross_domain;
  }
  return LinkClass::fabric;
}

double alltoall_offrank_gb(double per_rank_gb, int comm_size) {
  if (comm_size <= 1) return 0.0;
  return per_rank_gb * (comm_size - 1) / comm_size;
}

double allreduce_offrank_gb(double per_rank_gb, int comm_size) {
  if (comm_size <= 1) return 0.0;
  return 2.0 * per_rank_gb * (comm_size - 1) / comm_size;
}

double PhaseTraffic::offrank_gb() const {
  return std::accumulate(class_gb.begin(), class_gb.end(), 0.0);
}

ClassBytes TrafficBreakdown::class_totals() const {
  ClassBytes out{};
  for (const auto& ph : phases) {
    for (std::size_t c = 0; c < kLinkClassCount; ++c) out[c] += ph.class_gb[c];
  }
  return out;
}

TrafficBreakdown accumulate_traffic(const RankGrid& grid, const std::vector<PhaseSpec>& phases,
                                    const Placement& placement, const Machine& machine) {
  if (static_cast<int>(placement.assignment.size()) != grid.total()) {
    throw CapacityError("placement does not cover the grid");
  }
  const auto units = static_cast<std::size_t>(placement.total_units());
  const auto nodes = static_cast<std::size_t>(placement.nodes_used);

  TrafficBreakdown out;
  std::vector<double> unit_total(units, 0.0);
  std::vector<double> node_total(nodes, 0.0);

  for (const auto& spec : phases) {
    PhaseTraffic ph;
    ph.label = spec.label;
    ph.comm = spec.comm;
    ph.kind = spec.kind;
    ph.unit_fabric_gb.assign(units, 0.0);
    ph.unit_egress_gb.assign(units, 0.0);
    ph.unit_internode_gb.assign(units, 0.0);
    ph.node_internode_gb.assign(nodes, 0.0);
    ph.node_cross_gb.assign(nodes, 0.0);

    auto charge = [&](int from, int to, double gb) {
      const auto cls = classify_pair(placement, machine, from, to);
      ph.class_gb[static_cast<std::size_t>(cls)] += gb;
      if (cls == LinkClass::local) return;
      const auto g = static_cast<std::size_t>(placement.global_unit(from));
      const auto n = static_cast<std::size_t>(placement.assignment[from].node);
      ph.unit_egress_gb[g] += gb;
      switch (cls) {
        case LinkClass::fabric: ph.unit_fabric_gb[g] += gb; break;
        case LinkClass::cross_domain: ph.node_cross_gb[n] += gb; break;
        case LinkClass::internode:
          ph.unit_internode_gb[g] += gb;
          ph.node_internode_gb[n] += gb;
          break;
        case LinkClass::local: break;
      }
    };

    const double per_rank = phase_per_rank_gb(spec, grid);
    for (const auto& group : comm_groups(grid, spec.comm)) {
      const int p = static_cast<int>(group.size());
      if (p < 2) continue;
      if (spec.kind == CollectiveKind::alltoall) {
        const double share = per_rank / p;
        for (int a : group) {
          for (int b : group) {
            if (a != b) charge(a, b, share);
          }
        }
      } else {
        const double sent = allreduce_offrank_gb(per_rank, p);
        for (int k = 0; k < p; ++k) charge(group[k], group[(k + 1) % p], sent);
      }
    }

    for (std::size_t g = 0; g < units; ++g) unit_total[g] += ph.unit_egress_gb[g];
    for (std::size_t n = 0; n < nodes; ++n) node_total[n] += ph.node_internode_gb[n];
    out.phases.push_back(std::move(ph));
  }
  out.per_unit_egress_gb = stats(unit_total);
  out.per_node_egress_gb = stats(node_total);
  return out;
}

}  // namespace commstep
