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


// Enumerates small machines, grids and placements for the traffic property
// checks, and compares library traffic against the brute-force oracle.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "commstep/traffic.hpp"
#include "oracle/brute_force.hpp"

namespace proptest {

inline commstep::Machine make_machine(int units,
                                      commstep::FabricKind kind = commstep::FabricKind::switched,
                                      int max_nodes = 64) {
  commstep::Machine m;
  m.name = "test";
  m.max_nodes = max_nodes;
  m.node.units = units;
  m.node.unit.model_name = "X";
  m.node.unit.mem_gb = 40;
  m.node.fabric.kind = kind;
  m.node.fabric.per_unit_gbps = 800;
  if (kind == commstep::FabricKind::split_domains) m.node.fabric.cross_domain_gbps = 400;
  m.node.nic.gbps_each = 100;
  return m;
}

struct Config {
  commstep::RankGrid grid;
  int nodes = 1;
  int units = 1;
  int rpu = 1;
  commstep::FabricKind kind = commstep::FabricKind::switched;

  std::string str() const {
    return std::to_string(grid.n1) + "x" + std::to_string(grid.n2) + " on " +
           std::to_string(nodes) + "x" + std::to_string(units) + " rpu " + std::to_string(rpu) +
           (kind == commstep::FabricKind::split_domains ? " split" : "");
  }
};

// Every grid up to max_n x max_n on every machine up to max_nodes x
// max_units that it fills exactly, with a plain and a split fabric.
inline std::vector<Config> all_configs(int max_n = 8, int max_nodes = 4, int max_units = 8) {
  std::vector<Config> out;
  for (int n1 = 1; n1 <= max_n; ++n1) {
    for (int n2 = 1; n2 <= max_n; ++n2) {
      const int total = n1 * n2;
      for (int nodes = 1; nodes <= max_nodes; ++nodes) {
        for (int units = 1; units <= max_units; ++units) {
          if (total % (nodes * units) != 0) continue;
          const int rpu = total / (nodes * units);
          out.push_back({{n1, n2}, nodes, units, rpu, commstep::FabricKind::switched});
          if (units >= 2) {
            out.push_back({{n1, n2}, nodes, units, rpu, commstep::FabricKind::split_domains});
          }
        }
      }
    }
  }
  return out;
}

// The three enumerable strategies plus an explicit map shuffled from the
// block layout.
inline std::vector<commstep::Placement> placements_for(const Config& c, const commstep::Machine& m,
                                                       std::mt19937& rng) {
  std::vector<commstep::Placement> out;
  for (auto s : commstep::kEnumerableStrategies) {
    out.push_back(commstep::make_placement(c.grid, m, c.nodes, c.rpu, s));
  }
  auto slots = out.front().assignment;
  std::shuffle(slots.begin(), slots.end(), rng);
  out.push_back(commstep::make_explicit_placement(c.grid, m, c.nodes, c.rpu, slots));
  return out;
}

inline const std::vector<commstep::PhaseSpec>& mixed_phases() {
  using commstep::CollectiveKind;
  using commstep::Comm;
  static const std::vector<commstep::PhaseSpec> phases = {
      {"a1", Comm::comm1, CollectiveKind::alltoall, 12.8},
      {"a2", Comm::comm2, CollectiveKind::alltoall, 3.2},
      {"r1", Comm::comm1, CollectiveKind::allreduce, 0.3},
      {"r2", Comm::comm2, CollectiveKind::allreduce, 0.7},
  };
  return phases;
}

inline bool near(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
}

inline bool near(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!near(a[k], b[k])) return false;
  }
  return true;
}

// Empty when the library agrees with the oracle; otherwise what differs.
inline std::string oracle_mismatch(const Config& c, const commstep::Machine& m,
                                   const commstep::Placement& p,
                                   const std::vector<commstep::PhaseSpec>& phases) {
  const auto got = commstep::accumulate_traffic(c.grid, phases, p, m);
  const auto want =
      oracle::enumerate(c.grid.n1, c.grid.n2, phases, p.assignment, c.nodes, c.units, m);
  const std::string where = c.str() + " " + std::string(commstep::to_string(p.strategy));
  if (got.phases.size() != want.phases.size()) return where + ": phase count";
  for (std::size_t k = 0; k < got.phases.size(); ++k) {
    const auto& g = got.phases[k];
    const auto& w = want.phases[k];
    for (std::size_t cls = 0; cls < 4; ++cls) {
      if (!near(g.class_gb[cls], w.class_gb[cls])) return where + ": class " + std::to_string(cls);
    }
    if (!near(g.unit_egress_gb, w.unit_egress_gb)) return where + ": unit egress";
    if (!near(g.unit_fabric_gb, w.unit_fabric_gb)) return where + ": unit fabric";
    if (!near(g.node_internode_gb, w.node_internode_gb)) return where + ": node internode";
    if (!near(g.node_cross_gb, w.node_cross_gb)) return where + ": node cross";
  }
  const auto max_of = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };
  const auto mean_of = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  if (!near(got.per_unit_egress_gb.max, max_of(want.unit_egress_gb)) ||
      !near(got.per_unit_egress_gb.mean, mean_of(want.unit_egress_gb)) ||
      !near(got.per_node_egress_gb.max, max_of(want.node_internode_gb)) ||
      !near(got.per_node_egress_gb.mean, mean_of(want.node_internode_gb))) {
    return where + ": egress stats";
  }
  return {};
}

// Off-rank volume the phase formula charges, summed over all ranks.
inline double formula_volume(const commstep::RankGrid& g, const commstep::PhaseSpec& ph) {
  const int size = g.comm_size(ph.comm);
  const double per = commstep::phase_per_rank_gb(ph, g);
  return ph.kind == commstep::CollectiveKind::alltoall
             ? g.total() * commstep::alltoall_offrank_gb(per, size)
             : g.total() * commstep::allreduce_offrank_gb(per, size);
}

}  // namespace proptest
