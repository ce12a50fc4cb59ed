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

#include "commstep/cost.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "commstep/error.hpp"

namespace commstep {
namespace {

// Bytes over capacity, with zero bytes free even on an infinite or absent link.
double transfer_ms(double gb, double gb_per_ms) {
  if (gb <= 0.0) return 0.0;
  return gb / gb_per_ms;
}

double worst(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

std::string_view to_string(Bottleneck b) {
  switch (b) {
    case Bottleneck::none: return "none";
    case Bottleneck::fabric: return "fabric";
    case Bottleneck::cross_domain: return "cross_domain";
    case Bottleneck::internode: return "internode";
    case Bottleneck::host_link: return "host_link";
  }
  return "?";
}

double compute_time_ms(const ComputeCalib& calib, const Machine& machine, int units_used) {
  if (units_used < 1) throw InvariantError("units_used", "must be >= 1");
  return calib.w_par / (units_used * machine.node.unit.rel_throughput) + calib.w_ser;
}

PhaseTime phase_time_ms(const PhaseTraffic& traffic, const Machine& machine,
                        const CostOptions& options) {
  PhaseTime t;
  t.label = traffic.label;
  auto& c = t.class_ms;
  c[static_cast<std::size_t>(Bottleneck::fabric)] =
      transfer_ms(worst(traffic.unit_fabric_gb), unit_fabric_bytes_per_ms(machine));
  c[static_cast<std::size_t>(Bottleneck::cross_domain)] =
      transfer_ms(worst(traffic.node_cross_gb), cross_domain_bytes_per_ms(machine));
  c[static_cast<std::size_t>(Bottleneck::internode)] =
      transfer_ms(worst(traffic.node_internode_gb), node_egress_bytes_per_ms(machine));
  if (options.charge_host_links) {
    c[static_cast<std::size_t>(Bottleneck::host_link)] =
        transfer_ms(worst(traffic.unit_internode_gb), host_link_bytes_per_ms(machine));
  }
  for (std::size_t k = 1; k < kBottleneckCount; ++k) {
    if (c[k] > t.ms) {
      t.ms = c[k];
      t.bottleneck = static_cast<Bottleneck>(k);
    }
  }
  return t;
}

std::vector<PhaseTime> phase_times(const TrafficBreakdown& breakdown, const Machine& machine,
                                   const CostOptions& options) {
  std::vector<PhaseTime> out;
  out.reserve(breakdown.phases.size());
  for (const auto& ph : breakdown.phases) out.push_back(phase_time_ms(ph, machine, options));
  return out;
}

double comm_time_ms(const TrafficBreakdown& breakdown, const Machine& machine,
                    const CostOptions& options) {
  double total = 0.0;
  for (const auto& t : phase_times(breakdown, machine, options)) total += t.ms;
  return total;
}

Feasibility memory_feasible(const ProblemSpec& problem, const Machine& machine, int nodes_used) {
  Feasibility f;
  f.available_gb = static_cast<double>(nodes_used) * machine.node.units * machine.node.unit.mem_gb;
  f.required_gb = problem.min_total_gpu_mem_gb;
  f.feasible = f.available_gb >= f.required_gb;
  std::ostringstream os;
  os << problem.name << ": " << nodes_used << " x " << machine.name << " node(s) provide "
     << nodes_used << " x " << machine.node.units << " x " << machine.node.unit.mem_gb
     << " GB = " << f.available_gb << " GB " << (f.feasible ? ">=" : "<") << " " << f.required_gb
     << " GB required";
  f.explanation = os.str();
  return f;
}

int fraction_in_compute(double step_ms, double compute_ms) {
  if (!(step_ms > 0.0)) throw InvariantError("step_ms", "must be > 0");
  if (!(compute_ms >= 0.0) || compute_ms > step_ms) {
    throw InvariantError("compute_ms", "must be in [0, step_ms]");
  }
  // Tolerance keeps exact halves such as 81/360 from rounding down.
  return static_cast<int>(std::floor(100.0 * compute_ms / step_ms + 0.5 + 1e-9));
}

Machine scenario_machine(const Machine& machine, const Scenario& scenario) {
  if (scenario.units_per_node && *scenario.units_per_node != machine.node.units) {
    return with_active_units(machine, *scenario.units_per_node);
  }
  return machine;
}

int scenario_units(const Machine& machine, const Scenario& scenario) {
  return scenario.nodes_used * scenario.units_per_node.value_or(machine.node.units);
}

StepEstimate estimate_step(const ProblemSpec& problem, const Machine& machine,
                           const Scenario& scenario, const ComputeCalib& compute,
                           double other_ms, const CostOptions& options) {
  const Machine active = scenario_machine(machine, scenario);
  const auto fit = memory_feasible(problem, active, scenario.nodes_used);
  if (!fit.feasible) throw InfeasibleError(fit.explanation);

  StepEstimate est;
  est.units_used = scenario_units(machine, scenario);
  est.grid = build_grid(problem, est.units_used * scenario.ranks_per_unit);
  est.placement =
      scenario.strategy == PlacementStrategy::explicit_map
          ? make_explicit_placement(est.grid, active, scenario.nodes_used, scenario.ranks_per_unit,
                                    scenario.explicit_assignment)
          : make_placement(est.grid, active, scenario.nodes_used, scenario.ranks_per_unit,
                           scenario.strategy);
  est.traffic = accumulate_traffic(est.grid, problem.phases, est.placement, active);
  est.phases = phase_times(est.traffic, active, options);
  for (const auto& t : est.phases) est.comm_ms += t.ms;
  est.compute_ms = compute_time_ms(compute, active, est.units_used);
  est.other_ms = other_ms;
  est.step_ms = est.compute_ms + est.comm_ms + est.other_ms;
  est.fraction_in_compute = est.step_ms > 0.0 ? est.compute_ms / est.step_ms : 0.0;
  return est;
}

}  // namespace commstep
