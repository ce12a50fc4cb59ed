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


// Brute-force traffic oracle. Shares no code with the library beyond its
// plain data types: groups, ring order and link classes are rederived here
// from grid coordinates and raw unit slots, and every transfer is
// materialized as a (sender, receiver, bytes) triple round by round.

#pragma once

#include <array>
#include <vector>

#include "commstep/decomp.hpp"
#include "commstep/topology.hpp"
#include "commstep/traffic.hpp"

namespace oracle {

struct Send {
  int from = 0;
  int to = 0;
  double gb = 0.0;
};

// Ranks sharing `rank`'s comm group, ascending.
inline std::vector<int> group_of(int n1, int n2, commstep::Comm comm, int rank) {
  std::vector<int> out;
  const int i = rank % n1;
  const int j = rank / n1;
  for (int r = 0; r < n1 * n2; ++r) {
    const bool same = comm == commstep::Comm::comm1 ? (r / n1 == j) : (r % n1 == i);
    if (same) out.push_back(r);
  }
  return out;
}

// Every transfer of one phase. Alltoall: each rank sends an equal slice of
// its payload to every peer. Allreduce: ring reduce-scatter then allgather,
// each round moving one 1/p chunk from every member to its successor.
inline std::vector<Send> sends(int n1, int n2, const commstep::PhaseSpec& phase) {
  const int total = n1 * n2;
  const double payload = phase.kind == commstep::CollectiveKind::alltoall
                             ? phase.volume_gb / total
                             : phase.volume_gb;
  std::vector<Send> out;
  std::vector<bool> done(total, false);
  for (int leader = 0; leader < total; ++leader) {
    if (done[leader]) continue;
    const auto members = group_of(n1, n2, phase.comm, leader);
    for (int m : members) done[m] = true;
    const int p = static_cast<int>(members.size());
    if (phase.kind == commstep::CollectiveKind::alltoall) {
      for (int a : members) {
        for (int b : members) {
          if (a != b) out.push_back({a, b, payload / p});
        }
      }
    } else {
      for (int round = 0; round < 2 * (p - 1); ++round) {
        for (int k = 0; k < p; ++k) {
          out.push_back({members[k], members[(k + 1) % p], payload / p});
        }
      }
    }
  }
  return out;
}

// 0 local, 1 fabric, 2 cross_domain, 3 internode.
inline int link_class(const commstep::Machine& m, const commstep::UnitSlot& a,
                      const commstep::UnitSlot& b) {
  if (a.node != b.node) return 3;
  if (a.unit == b.unit) return 0;
  if (m.node.fabric.kind == commstep::FabricKind::split_domains) {
    const int half = m.node.units / 2;
    if ((a.unit < half) != (b.unit < half)) return 2;
  }
  return 1;
}

struct PhaseTotals {
  std::array<double, 4> class_gb{};
  std::vector<double> unit_egress_gb;
  std::vector<double> unit_fabric_gb;
  std::vector<double> node_internode_gb;
  std::vector<double> node_cross_gb;
};

struct Totals {
  std::vector<PhaseTotals> phases;
  std::vector<double> unit_egress_gb;
  std::vector<double> node_internode_gb;
};

inline Totals enumerate(int n1, int n2, const std::vector<commstep::PhaseSpec>& phases,
                        const std::vector<commstep::UnitSlot>& slots, int nodes,
                        int units_per_node, const commstep::Machine& machine) {
  Totals t;
  const int units = nodes * units_per_node;
  t.unit_egress_gb.assign(units, 0.0);
  t.node_internode_gb.assign(nodes, 0.0);
  for (const auto& phase : phases) {
    PhaseTotals pt;
    pt.unit_egress_gb.assign(units, 0.0);
    pt.unit_fabric_gb.assign(units, 0.0);
    pt.node_internode_gb.assign(nodes, 0.0);
    pt.node_cross_gb.assign(nodes, 0.0);
    for (const auto& s : sends(n1, n2, phase)) {
      const auto& a = slots[s.from];
      const auto& b = slots[s.to];
      const int cls = link_class(machine, a, b);
      pt.class_gb[cls] += s.gb;
      const int u = a.node * units_per_node + a.unit;
      if (cls != 0) pt.unit_egress_gb[u] += s.gb;
      if (cls == 1) pt.unit_fabric_gb[u] += s.gb;
      if (cls == 2) pt.node_cross_gb[a.node] += s.gb;
      if (cls == 3) pt.node_internode_gb[a.node] += s.gb;
    }
    for (int u = 0; u < units; ++u) t.unit_egress_gb[u] += pt.unit_egress_gb[u];
    for (int n = 0; n < nodes; ++n) t.node_internode_gb[n] += pt.node_internode_gb[n];
    t.phases.push_back(std::move(pt));
  }
  return t;
}

// Sum of every triple's bytes, the volume a phase must charge regardless of
// placement.
inline double phase_volume(int n1, int n2, const commstep::PhaseSpec& phase) {
  double sum = 0.0;
  for (const auto& s : sends(n1, n2, phase)) sum += s.gb;
  return sum;
}

}  // namespace oracle
