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

#include "commstep/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "commstep/assets.hpp"
#include "commstep/calib.hpp"
#include "commstep/cost.hpp"
#include "commstep/error.hpp"
#include "commstep/report.hpp"

namespace commstep {
namespace {

constexpr std::string_view kFitOnTheFly = "table1-fit";
constexpr std::string_view kIdeal = "ideal";

struct Options {
  std::vector<std::string> machines;
  std::string problem = "nl03";
  std::vector<int> nodes;
  std::vector<int> units;
  int ranks_per_unit = 1;
  int max_ranks_per_unit = 8;
  std::string placement = "block_comm1";
  int units_per_node = 0;
  std::string calib = std::string(kFitOnTheFly);
  std::string csv;
  double max_err = 30.0;
  std::string data;
  std::string out;
  std::string dir = "commstep-assets";
  std::string map;
  bool host_links = false;
};

// Problem with calibrated phase volumes plus per-machine parameters.
struct Model {
  ProblemSpec problem;
  CalibrationSet calibration;
  bool ideal = false;

  MachineCalibration for_machine(const Machine& m) const {
    if (const auto* mc = find_calibration(calibration, m.name)) return *mc;
    if (ideal) return {};
    throw InputError("calibration has no entry for machine " + m.name);
  }
};

FitSettings default_fit_settings() { return {}; }

Model load_model(const Options& opt) {
  Model model;
  const auto problem = load_problem(opt.problem);
  if (opt.calib == kIdeal) {
    model.ideal = true;
    for (const auto& ph : problem.phases) model.calibration.phase_volumes[ph.label] = ph.volume_gb;
  } else if (opt.calib == kFitOnTheFly) {
    model.calibration = fit_calibration(load_records("table1"), bundled_machines(), problem,
                                        default_fit_settings())
                            .calibration;
  } else {
    model.calibration = parse_calibration(read_file(opt.calib));
  }
  model.problem = with_phase_volumes(problem, model.calibration.phase_volumes);
  return model;
}

std::vector<UnitSlot> load_map(const std::string& path) {
  std::vector<UnitSlot> out;
  std::istringstream in(read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    UnitSlot s;
    if (!(ls >> s.node)) continue;
    std::string rest;
    if (!(ls >> s.unit) || (ls >> rest)) {
      throw ParseError(line_no, path + ": expected '<node> <unit>'");
    }
    out.push_back(s);
  }
  return out;
}

Scenario scenario_from(const Options& opt, int nodes) {
  Scenario s;
  s.nodes_used = nodes;
  s.ranks_per_unit = opt.ranks_per_unit;
  s.strategy = opt.map.empty() ? parse_strategy(opt.placement) : PlacementStrategy::explicit_map;
  if (opt.units_per_node > 0) s.units_per_node = opt.units_per_node;
  if (s.strategy == PlacementStrategy::explicit_map) {
    if (opt.map.empty()) throw InputError("--placement explicit needs --map <file>");
    s.explicit_assignment = load_map(opt.map);
  }
  return s;
}

StepEstimate evaluate(const Model& model, const Machine& machine, const Scenario& scenario,
                      const CostOptions& cost) {
  const auto mc = model.for_machine(machine);
  return estimate_step(model.problem, calibrated(machine, mc), scenario, mc.compute, mc.other_ms,
                       cost);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
}

std::vector<Machine> machines_with_overrides(const std::vector<std::string>& refs) {
  auto machines = bundled_machines();
  for (const auto& ref : refs) {
    auto m = load_machine(ref);
    const auto it = std::find_if(machines.begin(), machines.end(),
                                 [&](const Machine& x) { return x.name == m.name; });
    if (it != machines.end()) {
      *it = std::move(m);
    } else {
      machines.push_back(std::move(m));
    }
  }
  return machines;
}

FitSettings fit_settings_from(const Options& opt) {
  FitSettings s;
  s.ranks_per_unit = opt.ranks_per_unit;
  s.strategy = parse_strategy(opt.placement);
  if (s.strategy == PlacementStrategy::explicit_map) {
    throw InputError("fits need an enumerable placement strategy");
  }
  return s;
}

int cmd_predict(const Options& opt, std::ostream& out) {
  if (opt.machines.size() != 1) throw InputError("predict takes exactly one --machine");
  const auto model = load_model(opt);
  const auto machine = load_machine(opt.machines.front());
  const auto scenario = scenario_from(opt, opt.nodes.empty() ? 1 : opt.nodes.front());
  const auto est = evaluate(model, machine, scenario, {opt.host_links});
  out << estimate_to_text(machine.name, scenario, est);
  if (!opt.csv.empty()) write_text_file(opt.csv, rows_to_csv({make_row(machine.name, scenario, est)}));
  return kExitOk;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  const auto model = load_model(opt);
  struct Job {
    Machine machine;
    Scenario scenario;
  };
  std::vector<Job> jobs;

  if (!opt.data.empty()) {
    const auto machines = machines_with_overrides(opt.machines);
    const auto settings = fit_settings_from(opt);
    for (const auto& r : load_records(opt.data)) {
      const auto& m = machine_for_record(r, machines);
      jobs.push_back({m, record_scenario(r, m, settings)});
    }
  } else {
    if (opt.machines.empty()) throw InputError("sweep needs --machine or --data");
    if (opt.nodes.empty() == opt.units.empty()) {
      throw InputError("sweep needs exactly one of --nodes or --units");
    }
    for (const auto& ref : opt.machines) {
      const auto m = load_machine(ref);
      const int upn = opt.units_per_node > 0 ? opt.units_per_node : m.node.units;
      std::vector<int> nodes = opt.nodes;
      for (int u : opt.units) {
        if (u % upn != 0) {
          throw InputError(std::to_string(u) + " units do not fill whole " + m.name + " nodes");
        }
        nodes.push_back(u / upn);
      }
      for (int n : nodes) jobs.push_back({m, scenario_from(opt, n)});
    }
  }

  // Rows are independent; evaluate concurrently, emit in input order.
  std::vector<std::future<ReportRow>> pending;
  for (const auto& job : jobs) {
    pending.push_back(std::async(std::launch::async, [&model, &job, host = opt.host_links] {
      try {
        return make_row(job.machine.name, job.scenario,
                        evaluate(model, job.machine, job.scenario, {host}));
      } catch (const InfeasibleError&) {
        return infeasible_row(job.machine.name, job.machine, job.scenario);
      }
    }));
  }
  std::vector<ReportRow> rows;
  for (auto& f : pending) rows.push_back(f.get());

  out << rows_to_table(rows);
  if (!opt.csv.empty()) write_text_file(opt.csv, rows_to_csv(rows));
  return kExitOk;
}

int cmd_optimize(const Options& opt, const CLI::App& app, std::ostream& out) {
  if (opt.machines.size() != 1) throw InputError("optimize takes exactly one --machine");
  const auto model = load_model(opt);
  const auto machine = load_machine(opt.machines.front());
  const int nodes = opt.nodes.empty() ? 1 : opt.nodes.front();

  std::vector<int> rpus;
  if (app.count("--ranks-per-unit") > 0) {
    rpus.push_back(opt.ranks_per_unit);
  } else {
    for (int r = 1; r <= opt.max_ranks_per_unit; ++r) rpus.push_back(r);
  }

  struct Candidate {
    Scenario scenario;
    StepEstimate est;
    double internode_gb = 0.0;
  };
  std::vector<Candidate> cands;
  for (int rpu : rpus) {
    Scenario base = scenario_from(opt, nodes);
    base.ranks_per_unit = rpu;
    const int ranks = scenario_units(machine, base) * rpu;
    if (ranks % model.problem.n_toroidal != 0) continue;
    for (auto strategy : kEnumerableStrategies) {
      Scenario s = base;
      s.strategy = strategy;
      auto est = evaluate(model, machine, s, {opt.host_links});
      const double inter = est.traffic.class_totals()[static_cast<std::size_t>(LinkClass::internode)];
      cands.push_back({s, std::move(est), inter});
    }
  }
  if (cands.empty()) {
    throw InfeasibleError("no feasible placement: no ranks_per_unit in the searched range gives a "
                          "multiple of n_toroidal=" + std::to_string(model.problem.n_toroidal));
  }

  const auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  std::stable_sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
    if (!close(a.est.step_ms, b.est.step_ms)) return a.est.step_ms < b.est.step_ms;
    if (!close(a.internode_gb, b.internode_gb)) return a.internode_gb < b.internode_gb;
    if (a.scenario.strategy != b.scenario.strategy) return a.scenario.strategy < b.scenario.strategy;
    return a.scenario.ranks_per_unit < b.scenario.ranks_per_unit;
  });

  std::vector<ReportRow> rows;
  for (const auto& c : cands) rows.push_back(make_row(machine.name, c.scenario, c.est));
  const auto& best = cands.front();
  out << fmt::format("best: {} with {} rank(s)/unit, step {:.0f} ms, internode {:.1f} GB\n\n",
                     to_string(best.scenario.strategy), best.scenario.ranks_per_unit,
                     best.est.step_ms, best.internode_gb);
  out << rows_to_table(rows);
  if (!opt.csv.empty()) write_text_file(opt.csv, rows_to_csv(rows));
  return kExitOk;
}

std::string fit_summary(const FitReport& rep) {
  std::string s;
  const auto& cal = rep.calibration;
  s += fmt::format("volume law: gb_per_unit = {:.4g} / units + {:.4g}\n", cal.alpha_gb, cal.beta_gb);
  for (const auto& [label, v] : cal.phase_volumes) s += fmt::format("  phase {} volume {:.4g} GB\n", label, v);
  for (const auto& [name, m] : cal.machines) {
    s += fmt::format(
        "{}: w_par {:.6g} w_ser {:.6g} eta_net {:.3f} eta_fab {:.3f} other {:.0f} ms "
        "({} records, compute residual <= {:.2g} ms)\n",
        name, m.compute.w_par, m.compute.w_ser, m.eta_net, m.eta_fab, m.other_ms, m.records,
        m.compute_max_residual_ms);
  }
  for (const auto& w : rep.warnings) s += "warning: " + w + "\n";
  return s;
}

int cmd_fit(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto records = load_records(opt.data.empty() ? "table1" : opt.data);
  const auto machines = machines_with_overrides(opt.machines);
  const auto problem = load_problem(opt.problem);
  const auto rep = fit_calibration(records, machines, problem, fit_settings_from(opt));
  const auto doc = serialize_calibration(rep.calibration);
  if (opt.out.empty()) {
    out << doc;
    err << fit_summary(rep);
  } else {
    write_text_file(opt.out, doc);
    out << fit_summary(rep);
  }
  return kExitOk;
}

int cmd_validate(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.calib == kIdeal) throw InputError("validate needs a fitted calibration");
  const auto records = load_records(opt.data.empty() ? "table1" : opt.data);
  const auto machines = machines_with_overrides(opt.machines);
  const auto model = load_model(opt);
  const auto rep = validate(records, model.calibration, load_problem(opt.problem), machines);
  out << validation_to_text(rep);
  if (!opt.csv.empty()) {
    std::vector<ReportRow> rows;
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
      const auto& m = machine_for_record(records[k], machines);
      rows.push_back(make_row(m.name, record_scenario(records[k], m, model.calibration.settings),
                              rep.rows[k].predicted));
    }
    write_text_file(opt.csv, rows_to_csv(rows));
  }
  if (!rep.passes(opt.max_err)) {
    const auto& w = rep.rows[*rep.worst_row];
    err << fmt::format("validation failed: |step error| {:.1f}% exceeds {:g}% (worst: {}, {} nodes, {} units)\n",
                       rep.max_abs_step_err_pct, opt.max_err, w.system, w.nodes, w.units);
    return kExitThreshold;
  }
  return kExitOk;
}

int cmd_export(const Options& opt, std::ostream& out) {
  namespace fs = std::filesystem;
  for (const auto& a : bundled_assets()) {
    const fs::path path = fs::path(opt.dir) / std::string(a.path);
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw InputError("cannot create '" + path.parent_path().string() + "'");
    write_text_file(path.string(), std::string(a.content));
    out << path.string() << "\n";
  }
  return kExitOk;
}

void add_scenario_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--problem", opt.problem, "Bundled problem name or problem file")
      ->capture_default_str();
  cmd->add_option("--ranks-per-unit", opt.ranks_per_unit, "MPI ranks per compute unit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--placement", opt.placement,
                  "block_comm1, block_comm2, round_robin or explicit")
      ->capture_default_str();
  cmd->add_option("--units-per-node", opt.units_per_node, "Use only this many units per node")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--calib", opt.calib, "Calibration file, 'table1-fit' or 'ideal'")
      ->capture_default_str();
  cmd->add_option("--csv", opt.csv, "Also write the report as CSV to this path");
  cmd->add_flag("--host-links", opt.host_links,
                "Charge internode traffic against each unit's host PCIe link");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Step-time model for grid-decomposed, collective-heavy solvers", "commstep"};
  app.require_subcommand(1);
  Options opt;

  auto* predict = app.add_subcommand("predict", "Estimate one scenario");
  predict->add_option("--machine", opt.machines, "Preset, machine file, or <ref>:nvswitch=<k>")
      ->required();
  predict->add_option("--nodes", opt.nodes, "Nodes used")->expected(1);
  predict->add_option("--map", opt.map, "Explicit placement: one '<node> <unit>' line per rank");
  add_scenario_flags(predict, opt);

  auto* sweep = app.add_subcommand("sweep", "Estimate many scenarios");
  sweep->add_option("--machine", opt.machines, "Machines (repeatable)");
  sweep->add_option("--nodes", opt.nodes, "Node counts")->delimiter(',');
  sweep->add_option("--units", opt.units, "Total unit counts (alternative to --nodes)")
      ->delimiter(',');
  sweep->add_option("--data", opt.data, "Measurement CSV ('table1' for the bundled one)");
  add_scenario_flags(sweep, opt);

  auto* optimize = app.add_subcommand("optimize", "Search placements and ranks per unit");
  optimize->add_option("--machine", opt.machines, "Machine")->required();
  optimize->add_option("--nodes", opt.nodes, "Nodes used")->expected(1);
  optimize->add_option("--max-ranks-per-unit", opt.max_ranks_per_unit, "Search bound")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_scenario_flags(optimize, opt);

  auto* fit = app.add_subcommand("fit", "Fit a calibration from measurements");
  fit->add_option("--data", opt.data, "Measurement CSV (default: bundled table1)");
  fit->add_option("--machine", opt.machines, "Extra or overriding machine files");
  fit->add_option("--problem", opt.problem, "Problem")->capture_default_str();
  fit->add_option("--ranks-per-unit", opt.ranks_per_unit, "Ranks per unit assumed for runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit->add_option("--placement", opt.placement, "Placement assumed for runs")
      ->capture_default_str();
  fit->add_option("--out", opt.out, "Write the calibration here instead of stdout");

  auto* val = app.add_subcommand("validate", "Compare calibrated predictions with measurements");
  val->add_option("--data", opt.data, "Measurement CSV (default: bundled table1)");
  val->add_option("--calib", opt.calib, "Calibration file or 'table1-fit'")->capture_default_str();
  val->add_option("--machine", opt.machines, "Extra or overriding machine files");
  val->add_option("--problem", opt.problem, "Problem")->capture_default_str();
  val->add_option("--max-err", opt.max_err, "Fail when any |step error| exceeds this percent")
      ->capture_default_str();
  val->add_option("--csv", opt.csv, "Also write predictions as CSV");

  auto* exp = app.add_subcommand("export-assets", "Write bundled presets and data to disk");
  exp->add_option("--dir", opt.dir, "Output directory")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInputError;
  }

  try {
    if (*predict) return cmd_predict(opt, out);
    if (*sweep) return cmd_sweep(opt, out);
    if (*optimize) return cmd_optimize(opt, *optimize, out);
    if (*fit) return cmd_fit(opt, out, err);
    if (*val) return cmd_validate(opt, out, err);
    if (*exp) return cmd_export(opt, out);
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace commstep
