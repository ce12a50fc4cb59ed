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

// Step time model: Amdahl compute plus bandwidth-bound collective phases,
// executed one after another.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "commstep/decomp.hpp"
#include "commstep/topology.hpp"
#include "commstep/traffic.hpp"

namespace commstep {

struct ComputeCalib {
  /// Parallel work in A100-equivalent unit*ms.
  double w_par = 0.0;
  /// Serial time per step in ms.
  double w_ser = 0.0;

  bool operator==(const ComputeCalib&) const = default;
};

/// w_par / (units_used * rel_throughput) + w_ser. On CPU machines the unit is
/// the node.
double compute_time_ms(const ComputeCalib& calib, const Machine& machine, int units_used);

struct CostOptions {
  /// Also charge each unit's internode bytes against its host PCIe link.
  bool charge_host_links = false;
};

enum class Bottleneck { none, fabric, cross_domain, internode, host_link };
inline constexpr std::size_t kBottleneckCount = 5;
std::string_view to_string(Bottleneck b);

struct PhaseTime {
  std::string label;
  double ms = 0.0;
  Bottleneck bottleneck = Bottleneck::none;
  /// Candidate time of every class, indexed by Bottleneck.
  std::array<double, kBottleneckCount> class_ms{};
};

/// Slowest class wins: worst unit's fabric bytes over fabric capacity, worst
/// node's domain-crossing bytes over the cross link, worst node's internode
/// bytes over its NICs (and optionally worst unit's internode bytes over its
/// host link). Local bytes are free.
PhaseTime phase_time_ms(const PhaseTraffic& traffic, const Machine& machine,
                        const CostOptions& options = {});

std::vector<PhaseTime> phase_times(const TrafficBreakdown& breakdown, const Machine& machine,
                                   const CostOptions& options = {});

/// Sum of the phase times.
double comm_time_ms(const TrafficBreakdown& breakdown, const Machine& machine,
                    const CostOptions& options = {});

struct Feasibility {
  bool feasible = true;
  double available_gb = 0.0;
  double required_gb = 0.0;
  std::string explanation;
};

/// nodes_used * units/node * unit memory >= the problem's requirement.
Feasibility memory_feasible(const ProblemSpec& problem, const Machine& machine, int nodes_used);

/// compute / step as an integer percent, rounded half up. Throws
/// InvariantError unless step > 0 and 0 <= compute <= step.
int fraction_in_compute(double step_ms, double compute_ms);

struct Scenario {
  int nodes_used = 1;
  int ranks_per_unit = 1;
  PlacementStrategy strategy = PlacementStrategy::block_comm1;
  /// Use only this many units per node (NICs unchanged).
  std::optional<int> units_per_node;
  /// Required when strategy is explicit_map.
  std::vector<UnitSlot> explicit_assignment;
};

/// The machine as the scenario sees it (active units applied).
Machine scenario_machine(const Machine& machine, const Scenario& scenario);
int scenario_units(const Machine& machine, const Scenario& scenario);

struct StepEstimate {
  double compute_ms = 0.0;
  double comm_ms = 0.0;
  double other_ms = 0.0;
  double step_ms = 0.0;
  /// compute_ms / step_ms; 0 when step_ms is 0.
  double fraction_in_compute = 0.0;
  int units_used = 0;
  RankGrid grid;
  Placement placement;
  TrafficBreakdown traffic;
  std::vector<PhaseTime> phases;
};

/// Throws InfeasibleError when the problem does not fit in memory and
/// CapacityError when the placement cannot be built.
StepEstimate estimate_step(const ProblemSpec& problem, const Machine& machine,
                           const Scenario& scenario, const ComputeCalib& compute,
                           double other_ms = 0.0, const CostOptions& options = {});

}  // namespace commstep
