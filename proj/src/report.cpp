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

#include "commstep/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>

#include "commstep/error.hpp"
#include "commstep/kvdoc.hpp"

namespace commstep {
namespace {

constexpr std::size_t kReportColumns = 20;

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double number_cell(std::string_view cell, int line) {
  const auto v = parse_number(cell);
  if (!v) throw ParseError(line, "not a number: '" + std::string(cell) + "'");
  return *v;
}

int int_cell(std::string_view cell, int line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw ParseError(line, "not an integer: '" + std::string(cell) + "'");
  }
  return v;
}

std::string ms(double v) { return fmt::format("{:.0f}", v); }
std::string gb(double v) { return fmt::format("{:.1f}", v); }

}  // namespace

ReportRow make_row(const std::string& machine, const Scenario& scenario,
                   const StepEstimate& est) {
  ReportRow r;
  r.machine = machine;
  r.nodes = scenario.nodes_used;
  r.units = est.units_used;
  r.ranks_per_unit = scenario.ranks_per_unit;
  r.placement = std::string(to_string(scenario.strategy));
  r.feasible = true;
  r.step_ms = est.step_ms;
  r.compute_ms = est.compute_ms;
  r.comm_ms = est.comm_ms;
  r.other_ms = est.other_ms;
  r.fraction_pct = est.step_ms > 0.0 ? fraction_in_compute(est.step_ms, est.compute_ms) : 0;
  r.class_gb = est.traffic.class_totals();
  r.unit_egress_max_gb = est.traffic.per_unit_egress_gb.max;
  r.unit_egress_mean_gb = est.traffic.per_unit_egress_gb.mean;
  r.node_egress_max_gb = est.traffic.per_node_egress_gb.max;
  r.node_egress_mean_gb = est.traffic.per_node_egress_gb.mean;
  for (std::size_t k = 0; k < est.phases.size(); ++k) {
    if (k > 0) r.bottlenecks += ';';
    r.bottlenecks += est.phases[k].label + "=" + std::string(to_string(est.phases[k].bottleneck));
  }
  return r;
}

ReportRow infeasible_row(const std::string& machine, const Machine& spec,
                         const Scenario& scenario) {
  ReportRow r;
  r.machine = machine;
  r.nodes = scenario.nodes_used;
  r.units = scenario_units(spec, scenario);
  r.ranks_per_unit = scenario.ranks_per_unit;
  r.placement = std::string(to_string(scenario.strategy));
  r.feasible = false;
  return r;
}

std::string rows_to_csv(const std::vector<ReportRow>& rows) {
  std::string out(kReportHeader);
  out += '\n';
  const auto n = [](double v) { return format_number(v); };
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.machine,
                       r.nodes, r.units, r.ranks_per_unit, r.placement, r.feasible ? 1 : 0,
                       n(r.step_ms), n(r.compute_ms), n(r.comm_ms), n(r.other_ms), r.fraction_pct,
                       n(r.class_gb[0]), n(r.class_gb[1]), n(r.class_gb[2]), n(r.class_gb[3]),
                       n(r.unit_egress_max_gb), n(r.unit_egress_mean_gb), n(r.node_egress_max_gb),
                       n(r.node_egress_mean_gb), r.bottlenecks);
  }
  return out;
}

std::vector<ReportRow> parse_report_csv(std::string_view text) {
  std::vector<ReportRow> rows;
  auto lines = split(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != kReportHeader) throw ParseError(1, "not a report CSV header");
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const int line = static_cast<int>(k + 1);
    const auto c = split(lines[k], ',');
    if (c.size() != kReportColumns) {
      throw ParseError(line, "expected " + std::to_string(kReportColumns) + " cells");
    }
    ReportRow r;
    r.machine = std::string(c[0]);
    r.nodes = int_cell(c[1], line);
    r.units = int_cell(c[2], line);
    r.ranks_per_unit = int_cell(c[3], line);
    r.placement = std::string(c[4]);
    r.feasible = int_cell(c[5], line) != 0;
    r.step_ms = number_cell(c[6], line);
    r.compute_ms = number_cell(c[7], line);
    r.comm_ms = number_cell(c[8], line);
    r.other_ms = number_cell(c[9], line);
    r.fraction_pct = int_cell(c[10], line);
    for (std::size_t cls = 0; cls < kLinkClassCount; ++cls) {
      r.class_gb[cls] = number_cell(c[11 + cls], line);
    }
    r.unit_egress_max_gb = number_cell(c[15], line);
    r.unit_egress_mean_gb = number_cell(c[16], line);
    r.node_egress_max_gb = number_cell(c[17], line);
    r.node_egress_mean_gb = number_cell(c[18], line);
    r.bottlenecks = std::string(c[19]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string rows_to_table(const std::vector<ReportRow>& rows) {
  std::size_t name_w = 7;
  for (const auto& r : rows) name_w = std::max(name_w, r.machine.size());
  std::string out = fmt::format("{:<{}}  {:>5}  {:>5}  {:>3}  {:<11}  {:>7}  {:>7}  {:>7}  {:>5}  {:>9}\n",
                                "machine", name_w, "nodes", "units", "rpu", "placement", "step_ms",
                                "comp_ms", "comm_ms", "frac", "inter_gb");
  for (const auto& r : rows) {
    if (!r.feasible) {
      out += fmt::format("{:<{}}  {:>5}  {:>5}  {:>3}  {:<11}  infeasible (insufficient memory)\n",
                         r.machine, name_w, r.nodes, r.units, r.ranks_per_unit, r.placement);
      continue;
    }
    out += fmt::format("{:<{}}  {:>5}  {:>5}  {:>3}  {:<11}  {:>7}  {:>7}  {:>7}  {:>4}%  {:>9}\n",
                       r.machine, name_w, r.nodes, r.units, r.ranks_per_unit, r.placement,
                       ms(r.step_ms), ms(r.compute_ms), ms(r.comm_ms), r.fraction_pct,
                       gb(r.class_gb[static_cast<std::size_t>(LinkClass::internode)]));
  }
  return out;
}

std::string estimate_to_text(const std::string& machine, const Scenario& scenario,
                             const StepEstimate& est) {
  std::string out;
  out += fmt::format("scenario   {}: {} node(s), {} units, {} rank(s)/unit, {}, grid {}x{}\n",
                     machine, scenario.nodes_used, est.units_used, scenario.ranks_per_unit,
                     to_string(scenario.strategy), est.grid.n1, est.grid.n2);
  out += fmt::format("step       {:>7} ms\n", ms(est.step_ms));
  out += fmt::format("compute    {:>7} ms\n", ms(est.compute_ms));
  out += fmt::format("comm       {:>7} ms\n", ms(est.comm_ms));
  out += fmt::format("other      {:>7} ms\n", ms(est.other_ms));
  out += fmt::format("fraction in compute {}%\n\n",
                     est.step_ms > 0.0 ? fraction_in_compute(est.step_ms, est.compute_ms) : 0);

  std::size_t label_w = 5;
  for (const auto& p : est.traffic.phases) label_w = std::max(label_w, p.label.size());
  out += fmt::format("{:<{}}  {:>8}  {:>8}  {:>8}  {:>9}  {:>7}  {}\n", "phase", label_w,
                     "local_gb", "fabric", "cross", "internode", "time_ms", "bottleneck");
  for (std::size_t k = 0; k < est.traffic.phases.size(); ++k) {
    const auto& p = est.traffic.phases[k];
    out += fmt::format("{:<{}}  {:>8}  {:>8}  {:>8}  {:>9}  {:>7}  {}\n", p.label, label_w,
                       gb(p.class_gb[0]), gb(p.class_gb[1]), gb(p.class_gb[2]), gb(p.class_gb[3]),
                       ms(est.phases[k].ms), to_string(est.phases[k].bottleneck));
  }
  const auto totals = est.traffic.class_totals();
  out += fmt::format("{:<{}}  {:>8}  {:>8}  {:>8}  {:>9}  {:>7}\n\n", "total", label_w,
                     gb(totals[0]), gb(totals[1]), gb(totals[2]), gb(totals[3]), ms(est.comm_ms));
  out += fmt::format("per-unit egress  max {} GB  mean {} GB\n",
                     gb(est.traffic.per_unit_egress_gb.max), gb(est.traffic.per_unit_egress_gb.mean));
  out += fmt::format("per-node egress  max {} GB  mean {} GB\n",
                     gb(est.traffic.per_node_egress_gb.max), gb(est.traffic.per_node_egress_gb.mean));
  return out;
}

std::string validation_to_text(const ValidationReport& rep) {
  std::string out;
  std::size_t name_w = 6;
  for (const auto& r : rep.rows) name_w = std::max(name_w, r.system.size());
  out += fmt::format(
      "{:<{}}  {:>5}  {:>5}  {:>13}  {:>7}  {:>13}  {:>13}  {:>9}\n", "system", name_w, "nodes",
      "units", "step meas/pred", "err", "compute m/p", "comm m/p", "frac m/p");
  for (const auto& r : rep.rows) {
    out += fmt::format("{:<{}}  {:>5}  {:>5}  {:>6}/{:<6}  {:>6.1f}%  {:>6}/{:<6}  {:>6}/{:<6}  {:>9}\n",
                       r.system, name_w, r.nodes, r.units, ms(r.measured_step_ms),
                       ms(r.predicted.step_ms), r.step_err_pct, ms(r.measured_compute_ms),
                       ms(r.predicted.compute_ms), ms(r.measured_comm_ms), ms(r.predicted.comm_ms),
                       fmt::format("{}%/{}%", r.measured_fraction_pct, r.predicted_fraction_pct));
  }
  out += fmt::format("\nabsolute step error: median {:.1f}%  max {:.1f}%\n",
                     rep.median_abs_step_err_pct, rep.max_abs_step_err_pct);

  // Single-node GPU runs against the fewest GPUs any multi-node GPU run needed.
  const ValidationRow* single = nullptr;
  int min_multi = 0;
  for (const auto& r : rep.rows) {
    if (r.unit_kind != UnitKind::gpu) continue;
    if (r.nodes == 1) {
      if (single == nullptr || r.units < single->units) single = &r;
    } else if (min_multi == 0 || r.units < min_multi) {
      min_multi = r.units;
    }
  }
  if (single != nullptr && min_multi > 0) {
    out += fmt::format(
        "single node: {} GPUs at {} ms measured ({} ms predicted); multi-node GPU runs of "
        "comparable step time use {}+ GPUs (ratio {:.2f})\n",
        single->units, ms(single->measured_step_ms), ms(single->predicted.step_ms), min_multi,
        static_cast<double>(single->units) / min_multi);
  }
  return out;
}

}  // namespace commstep
