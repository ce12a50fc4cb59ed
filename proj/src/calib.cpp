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

#include "commstep/calib.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <regex>

#include "commstep/error.hpp"
#include "commstep/kvdoc.hpp"

namespace commstep {
namespace {

constexpr std::size_t kColumns = 9;
constexpr std::array<std::string_view, kColumns> kColumnNames = {
    "system", "nodes", "gpus", "step_ms", "compute_ms", "comm_ms", "gb_per_gpu", "gb_per_node",
    "note"};

std::vector<std::string> split_csv_line(std::string_view line, int line_no) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw ParseError(line_no, "unterminated quoted cell");
  cells.push_back(std::move(cur));
  return cells;
}

std::string csv_cell(std::string_view s) {
  if (s.find_first_of(",\"") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string cell_error(int line_no, std::string_view column, std::string_view what) {
  return "row " + std::to_string(line_no - 1) + ", column " + std::string(column) + ": " +
         std::string(what);
}

std::optional<double> positive_cell(const std::string& cell, int line_no, std::size_t col) {
  if (cell.empty()) return std::nullopt;
  const auto v = parse_number(cell);
  if (!v) throw ParseError(0, cell_error(line_no, kColumnNames[col], "not numeric: '" + cell + "'"));
  if (!(*v > 0.0) || !std::isfinite(*v)) {
    throw ParseError(0, cell_error(line_no, kColumnNames[col], "must be > 0"));
  }
  return v;
}

std::optional<int> int_cell(const std::string& cell, int line_no, std::size_t col) {
  if (cell.empty()) return std::nullopt;
  int v = 0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(0, cell_error(line_no, kColumnNames[col], "not an integer: '" + cell + "'"));
  }
  if (v < 1) throw ParseError(0, cell_error(line_no, kColumnNames[col], "must be > 0"));
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

std::size_t distinct_count(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::size_t n = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k == 0 || std::abs(xs[k] - xs[k - 1]) > 1e-12 * std::abs(xs[k])) ++n;
  }
  return n;
}

double through_origin(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += xs[k] * ys[k];
    sxx += xs[k] * xs[k];
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

// y ~ slope * x + intercept, least squares, both coefficients kept >= 0.
LineFit fit_nonnegative_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  if (distinct_count(xs) < 2) return {through_origin(xs, ys), 0.0};
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  LineFit f{sxy / sxx, 0.0};
  f.intercept = my - f.slope * mx;
  if (f.intercept < 0.0) return {std::max(0.0, through_origin(xs, ys)), 0.0};
  if (f.slope < 0.0) return {0.0, my};
  return f;
}

double geometric_mean(const std::vector<double>& v) {
  double log_sum = 0.0;
  for (double x : v) log_sum += std::log(x);
  return std::exp(log_sum / static_cast<double>(v.size()));
}

double spread(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

double pct_error(double predicted, double measured) {
  return (predicted - measured) / measured * 100.0;
}

}  // namespace

std::vector<MeasurementRecord> parse_records(std::string_view csv_text) {
  std::vector<MeasurementRecord> out;
  std::vector<std::string> lines;
  {
    std::size_t pos = 0;
    while (pos < csv_text.size()) {
      auto eol = csv_text.find('\n', pos);
      if (eol == std::string_view::npos) eol = csv_text.size();
      auto line = csv_text.substr(pos, eol - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.emplace_back(line);
      pos = eol + 1;
    }
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) return out;

  const auto header = split_csv_line(lines[0], 1);
  for (std::size_t c = 0; c < kColumns; ++c) {
    if (c >= header.size()) {
      throw ParseError(1, "header is missing column '" + std::string(kColumnNames[c]) + "'");
    }
    if (header[c] != kColumnNames[c]) {
      throw ParseError(1, "header column " + std::to_string(c + 1) + " is '" + header[c] +
                              "', expected '" + std::string(kColumnNames[c]) + "'");
    }
  }
  if (header.size() > kColumns) {
    throw ParseError(1, "unexpected header column '" + header[kColumns] + "'");
  }

  for (std::size_t k = 1; k < lines.size(); ++k) {
    const int line_no = static_cast<int>(k + 1);
    if (lines[k].empty()) continue;
    const auto cells = split_csv_line(lines[k], line_no);
    if (cells.size() != kColumns) {
      throw ParseError(line_no, "expected " + std::to_string(kColumns) + " cells, got " +
                                    std::to_string(cells.size()));
    }
    MeasurementRecord r;
    r.system = cells[0];
    if (r.system.empty()) throw ParseError(0, cell_error(line_no, "system", "empty"));
    const auto nodes = int_cell(cells[1], line_no, 1);
    if (!nodes) throw ParseError(0, cell_error(line_no, "nodes", "required"));
    r.nodes = *nodes;
    r.gpus = int_cell(cells[2], line_no, 2);
    const auto required = [&](std::size_t col) {
      const auto v = positive_cell(cells[col], line_no, col);
      if (!v) throw ParseError(0, cell_error(line_no, kColumnNames[col], "required"));
      return *v;
    };
    r.step_ms = required(3);
    r.compute_ms = required(4);
    r.comm_ms = required(5);
    r.gb_per_gpu = positive_cell(cells[6], line_no, 6);
    r.gb_per_node = positive_cell(cells[7], line_no, 7);
    r.note = cells[8];
    out.push_back(std::move(r));
  }
  return out;
}

std::string serialize_records(const std::vector<MeasurementRecord>& records) {
  std::string out(kRecordHeader);
  out += '\n';
  const auto opt = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
  };
  for (const auto& r : records) {
    out += csv_cell(r.system) + ',' + std::to_string(r.nodes) + ',' +
           (r.gpus ? std::to_string(*r.gpus) : std::string()) + ',' + format_number(r.step_ms) +
           ',' + format_number(r.compute_ms) + ',' + format_number(r.comm_ms) + ',' +
           opt(r.gb_per_gpu) + ',' + opt(r.gb_per_node) + ',' + csv_cell(r.note) + '\n';
  }
  return out;
}

int record_units(const MeasurementRecord& record) {
  return record.gpus.value_or(record.nodes);
}

std::optional<int> record_units_per_node(const MeasurementRecord& record) {
  static const std::regex kUsing(R"((\d+)\s+of\s+(\d+)\s+GPUs?\s+used)", std::regex::icase);
  std::smatch m;
  if (std::regex_search(record.note, m, kUsing)) return std::stoi(m[1].str());
  if (record.gpus) {
    if (*record.gpus % record.nodes != 0) {
      throw InputError(record.system + ": " + std::to_string(*record.gpus) +
                       " GPUs do not divide evenly over " + std::to_string(record.nodes) +
                       " nodes");
    }
    return *record.gpus / record.nodes;
  }
  return std::nullopt;
}

const Machine& machine_for_record(const MeasurementRecord& record,
                                  const std::vector<Machine>& machines) {
  const auto want = lower(record.system);
  for (const auto& m : machines) {
    if (lower(m.name) == want || (!m.label.empty() && lower(m.label) == want)) return m;
  }
  throw InputError("no machine matches system '" + record.system + "'");
}

Scenario record_scenario(const MeasurementRecord& record, const Machine& machine,
                         const FitSettings& settings) {
  Scenario s;
  s.nodes_used = record.nodes;
  s.ranks_per_unit = settings.ranks_per_unit;
  s.strategy = settings.strategy;
  if (const auto upn = record_units_per_node(record); upn && *upn != machine.node.units) {
    s.units_per_node = *upn;
  }
  if (record.gpus && scenario_units(machine, s) != *record.gpus) {
    throw InputError(record.system + ": " + std::to_string(*record.gpus) + " GPUs on " +
                     std::to_string(record.nodes) + " nodes does not match " + machine.name);
  }
  return s;
}

ComputeFit fit_compute(const std::vector<MeasurementRecord>& records, const Machine& machine) {
  if (records.empty()) throw FitError("no records for machine " + machine.name);
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : records) {
    xs.push_back(1.0 / (record_units(r) * machine.node.unit.rel_throughput));
    ys.push_back(r.compute_ms);
  }
  const auto line = fit_nonnegative_line(xs, ys);
  ComputeFit out;
  out.calib = {line.slope, line.intercept};
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out.residuals_ms.push_back(ys[k] - (line.slope * xs[k] + line.intercept));
  }
  return out;
}

VolumeFit fit_volume_law(const std::vector<MeasurementRecord>& records,
                         double outlier_threshold) {
  VolumeFit out;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (!records[k].gb_per_gpu) continue;
    out.used.push_back(k);
    xs.push_back(1.0 / record_units(records[k]));
    ys.push_back(*records[k].gb_per_gpu);
  }
  if (distinct_count(xs) < 2) {
    throw FitError("volume fit needs at least 2 records with gb_per_gpu at distinct unit counts");
  }
  const auto line = fit_nonnegative_line(xs, ys);
  out.alpha_gb = line.slope;
  out.beta_gb = line.intercept;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double rel = (line.slope * xs[k] + line.intercept - ys[k]) / ys[k];
    out.rel_residuals.push_back(rel);
    out.outlier.push_back(std::abs(rel) > outlier_threshold);
  }
  return out;
}

std::map<std::string, double> apportion_volumes(const ProblemSpec& problem, const VolumeFit& fit) {
  double alltoall_sum = 0.0;
  double allreduce_sum = 0.0;
  for (const auto& ph : problem.phases) {
    (ph.kind == CollectiveKind::alltoall ? alltoall_sum : allreduce_sum) += ph.volume_gb;
  }
  std::map<std::string, double> out;
  for (const auto& ph : problem.phases) {
    if (ph.kind == CollectiveKind::alltoall) {
      out[ph.label] = fit.alpha_gb * ph.volume_gb / alltoall_sum;
    } else {
      out[ph.label] = 0.5 * fit.beta_gb * ph.volume_gb / allreduce_sum;
    }
  }
  return out;
}

EfficiencyFit fit_efficiencies(const std::vector<MeasurementRecord>& records,
                               const Machine& machine, const ProblemSpec& problem,
                               const FitSettings& settings) {
  const Machine ideal = with_efficiencies(machine, 1.0, 1.0);
  EfficiencyFit out;
  std::vector<double> net;
  std::vector<double> fab;
  for (const auto& r : records) {
    if (!(r.comm_ms > 0.0)) {
      throw FitError(r.system + ": zero measured comm time, efficiency undefined");
    }
    const auto est = estimate_step(problem, ideal, record_scenario(r, machine, settings), {});
    double net_ms = 0.0;
    double fab_ms = 0.0;
    for (const auto& t : est.phases) {
      if (t.bottleneck == Bottleneck::internode || t.bottleneck == Bottleneck::host_link) {
        net_ms += t.ms;
      } else {
        fab_ms += t.ms;
      }
    }
    if (est.comm_ms <= 0.0) {
      out.warnings.push_back(r.system + " (" + std::to_string(r.nodes) +
                             " nodes): model predicts no off-unit traffic; record ignored");
      continue;
    }
    EfficiencyCandidate c;
    c.network = net_ms >= fab_ms;
    c.value = est.comm_ms / r.comm_ms;
    if (c.value > 1.0) {
      c.value = 1.0;
      c.clamped = true;
      out.warnings.push_back(r.system + " (" + std::to_string(r.nodes) +
                             " nodes): measured comm beats the ideal bound; efficiency clamped to 1");
    }
    (c.network ? net : fab).push_back(c.value);
    out.candidates.push_back(c);
  }
  if (!net.empty()) out.eta_net = geometric_mean(net);
  if (!fab.empty()) out.eta_fab = geometric_mean(fab);
  out.net_spread = spread(net);
  out.fab_spread = spread(fab);
  const auto flag = [&](double s, const char* what) {
    if (s > settings.spread_warning) {
      out.warnings.push_back(machine.name + ": " + what + " efficiency spread " +
                             format_number(std::round(s * 1000.0) / 1000.0) +
                             " exceeds " + format_number(settings.spread_warning) +
                             " (model mismatch)");
    }
  };
  flag(out.net_spread, "network");
  flag(out.fab_spread, "fabric");
  return out;
}

std::string serialize_calibration(const CalibrationSet& c) {
  KvWriter w;
  w.section("calibration")
      .put("problem", c.problem)
      .put("ranks_per_unit", std::int64_t{c.settings.ranks_per_unit})
      .put("placement", to_string(c.settings.strategy))
      .put("outlier_threshold", c.settings.outlier_threshold)
      .put("spread_warning", c.settings.spread_warning);
  w.section("volume_fit").put("alpha_gb", c.alpha_gb).put("beta_gb", c.beta_gb);
  for (const auto& [label, v] : c.phase_volumes) w.section("phase." + label).put("volume_gb", v);
  for (const auto& [name, m] : c.machines) {
    w.section("machine." + name)
        .put("w_par", m.compute.w_par)
        .put("w_ser", m.compute.w_ser)
        .put("eta_net", m.eta_net)
        .put("eta_fab", m.eta_fab)
        .put("other_ms", m.other_ms)
        .put("records", std::int64_t{m.records})
        .put("compute_max_residual_ms", m.compute_max_residual_ms)
        .put("eta_net_spread", m.eta_net_spread)
        .put("eta_fab_spread", m.eta_fab_spread);
  }
  return w.str();
}

CalibrationSet parse_calibration(std::string_view text) {
  const auto doc = parse_kv(text);
  CalibrationSet c;
  {
    SectionReader r(doc.require("calibration"));
    c.problem = r.optional_text("problem").value_or("");
    c.settings.ranks_per_unit = static_cast<int>(r.integer("ranks_per_unit"));
    if (c.settings.ranks_per_unit < 1) {
      throw InvariantError("calibration.ranks_per_unit", "must be >= 1");
    }
    c.settings.strategy = parse_strategy(r.text("placement"));
    c.settings.outlier_threshold = r.optional_number("outlier_threshold").value_or(0.2);
    c.settings.spread_warning = r.optional_number("spread_warning").value_or(0.15);
    r.finish();
  }
  if (const auto* s = doc.find("volume_fit")) {
    SectionReader r(*s);
    c.alpha_gb = r.number("alpha_gb");
    c.beta_gb = r.number("beta_gb");
    r.finish();
  }
  for (const auto& s : doc.sections) {
    if (s.name == "calibration" || s.name == "volume_fit") continue;
    SectionReader r(s);
    if (s.name.starts_with("phase.")) {
      c.phase_volumes[s.name.substr(6)] = r.number("volume_gb");
    } else if (s.name.starts_with("machine.")) {
      MachineCalibration m;
      m.compute.w_par = r.number("w_par");
      m.compute.w_ser = r.number("w_ser");
      m.eta_net = r.number("eta_net");
      m.eta_fab = r.number("eta_fab");
      m.other_ms = r.optional_number("other_ms").value_or(0.0);
      m.records = static_cast<int>(r.optional_number("records").value_or(0.0));
      m.compute_max_residual_ms = r.optional_number("compute_max_residual_ms").value_or(0.0);
      m.eta_net_spread = r.optional_number("eta_net_spread").value_or(0.0);
      m.eta_fab_spread = r.optional_number("eta_fab_spread").value_or(0.0);
      const auto field = s.name + ".";
      if (!(m.eta_net > 0.0 && m.eta_net <= 1.0)) {
        throw InvariantError(field + "eta_net", "must be in (0, 1]");
      }
      if (!(m.eta_fab > 0.0 && m.eta_fab <= 1.0)) {
        throw InvariantError(field + "eta_fab", "must be in (0, 1]");
      }
      if (m.compute.w_par < 0.0) throw InvariantError(field + "w_par", "must be >= 0");
      if (m.compute.w_ser < 0.0) throw InvariantError(field + "w_ser", "must be >= 0");
      if (m.other_ms < 0.0) throw InvariantError(field + "other_ms", "must be >= 0");
      c.machines[s.name.substr(8)] = m;
    } else {
      throw ParseError(s.line, "unknown section [" + s.name + "]");
    }
    r.finish();
  }
  return c;
}

const MachineCalibration* find_calibration(const CalibrationSet& calibration,
                                           std::string_view machine_name) {
  if (const auto it = calibration.machines.find(std::string(machine_name));
      it != calibration.machines.end()) {
    return &it->second;
  }
  if (const auto colon = machine_name.find(':'); colon != std::string_view::npos) {
    return find_calibration(calibration, machine_name.substr(0, colon));
  }
  return nullptr;
}

Machine calibrated(const Machine& machine, const MachineCalibration& calib) {
  return with_efficiencies(machine, calib.eta_net, calib.eta_fab);
}

FitReport fit_calibration(const std::vector<MeasurementRecord>& records,
                          const std::vector<Machine>& machines, const ProblemSpec& problem,
                          const FitSettings& settings) {
  FitReport rep;
  auto& cal = rep.calibration;
  cal.settings = settings;
  cal.problem = problem.name;

  rep.volumes = fit_volume_law(records, settings.outlier_threshold);
  cal.alpha_gb = rep.volumes.alpha_gb;
  cal.beta_gb = rep.volumes.beta_gb;
  cal.phase_volumes = apportion_volumes(problem, rep.volumes);
  for (std::size_t k = 0; k < rep.volumes.used.size(); ++k) {
    if (rep.volumes.outlier[k]) {
      const auto& r = records[rep.volumes.used[k]];
      rep.warnings.push_back("volume outlier: " + r.system + " " + std::to_string(record_units(r)) +
                             " units, residual " +
                             format_number(std::round(rep.volumes.rel_residuals[k] * 1000.0) / 10.0) +
                             "%");
    }
  }
  const auto fitted_problem = with_phase_volumes(problem, cal.phase_volumes);

  // Group by machine, keeping first-appearance order.
  std::vector<const Machine*> order;
  std::map<std::string, std::vector<MeasurementRecord>> grouped;
  for (const auto& r : records) {
    const auto& m = machine_for_record(r, machines);
    if (!grouped.contains(m.name)) order.push_back(&m);
    grouped[m.name].push_back(r);
  }

  for (const Machine* m : order) {
    const auto& recs = grouped[m->name];
    MachineCalibration mc;
    mc.records = static_cast<int>(recs.size());

    auto compute = fit_compute(recs, *m);
    mc.compute = compute.calib;
    for (double res : compute.residuals_ms) {
      mc.compute_max_residual_ms = std::max(mc.compute_max_residual_ms, std::abs(res));
    }

    auto eff = fit_efficiencies(recs, *m, fitted_problem, settings);
    mc.eta_net = eff.eta_net;
    mc.eta_fab = eff.eta_fab;
    mc.eta_net_spread = eff.net_spread;
    mc.eta_fab_spread = eff.fab_spread;
    for (const auto& w : eff.warnings) rep.warnings.push_back(w);

    double residual = 0.0;
    for (const auto& r : recs) residual += r.step_ms - r.compute_ms - r.comm_ms;
    mc.other_ms = std::max(0.0, residual / static_cast<double>(recs.size()));

    cal.machines[m->name] = mc;
    rep.compute[m->name] = std::move(compute);
    rep.efficiency[m->name] = std::move(eff);
  }
  return rep;
}

ValidationReport validate(const std::vector<MeasurementRecord>& records,
                          const CalibrationSet& calibration, const ProblemSpec& problem,
                          const std::vector<Machine>& machines) {
  ValidationReport rep;
  const auto fitted_problem = with_phase_volumes(problem, calibration.phase_volumes);
  std::vector<double> abs_err;
  for (const auto& r : records) {
    const auto& m = machine_for_record(r, machines);
    const auto* mc = find_calibration(calibration, m.name);
    if (mc == nullptr) throw InputError("calibration has no entry for machine " + m.name);
    ValidationRow row;
    row.system = r.system;
    row.nodes = r.nodes;
    row.units = record_units(r);
    row.unit_kind = m.node.unit.kind;
    row.note = r.note;
    row.measured_step_ms = r.step_ms;
    row.measured_compute_ms = r.compute_ms;
    row.measured_comm_ms = r.comm_ms;
    row.predicted = estimate_step(fitted_problem, calibrated(m, *mc),
                                  record_scenario(r, m, calibration.settings), mc->compute,
                                  mc->other_ms);
    row.step_err_pct = pct_error(row.predicted.step_ms, r.step_ms);
    row.compute_err_pct = pct_error(row.predicted.compute_ms, r.compute_ms);
    row.comm_err_pct = pct_error(row.predicted.comm_ms, r.comm_ms);
    row.measured_fraction_pct = fraction_in_compute(r.step_ms, std::min(r.compute_ms, r.step_ms));
    row.predicted_fraction_pct =
        row.predicted.step_ms > 0.0
            ? fraction_in_compute(row.predicted.step_ms, row.predicted.compute_ms)
            : 0;
    abs_err.push_back(std::abs(row.step_err_pct));
    rep.rows.push_back(std::move(row));
  }
  if (!abs_err.empty()) {
    const auto worst = std::max_element(abs_err.begin(), abs_err.end());
    rep.worst_row = static_cast<std::size_t>(worst - abs_err.begin());
    rep.max_abs_step_err_pct = *worst;
    auto sorted = abs_err;
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    rep.median_abs_step_err_pct =
        n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  }
  return rep;
}

std::vector<MeasurementRecord> predicted_records(const std::vector<MeasurementRecord>& records,
                                                 const CalibrationSet& calibration,
                                                 const ProblemSpec& problem,
                                                 const std::vector<Machine>& machines) {
  const auto report = validate(records, calibration, problem, machines);
  std::vector<MeasurementRecord> out;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& pred = report.rows[k].predicted;
    MeasurementRecord r = records[k];
    r.step_ms = pred.step_ms;
    r.compute_ms = pred.compute_ms;
    r.comm_ms = pred.comm_ms;
    if (r.gb_per_gpu) {
      r.gb_per_gpu = calibration.alpha_gb / record_units(r) + calibration.beta_gb;
    }
    if (pred.traffic.per_node_egress_gb.mean > 0.0) {
      r.gb_per_node = pred.traffic.per_node_egress_gb.mean;
    } else {
      r.gb_per_node.reset();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace commstep
