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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "commstep/assets.hpp"
#include "commstep/calib.hpp"
#include "commstep/error.hpp"

namespace commstep {
namespace {

std::vector<MeasurementRecord> table1() { return load_records("table1"); }

std::vector<MeasurementRecord> rows_of(const std::string& system) {
  std::vector<MeasurementRecord> out;
  for (const auto& r : table1()) {
    if (r.system == system) out.push_back(r);
  }
  return out;
}

MeasurementRecord volume_row(int gpus, double gb) {
  MeasurementRecord r;
  r.system = "x";
  r.nodes = 1;
  r.gpus = gpus;
  r.step_ms = r.compute_ms = r.comm_ms = 1;
  r.gb_per_gpu = gb;
  return r;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST(CalibRecords, BundledTable) {
  const auto rows = table1();
  ASSERT_EQ(rows.size(), 8u);
  const auto& first = rows.front();
  EXPECT_EQ(first.system, "GCP a2-megagpu-16g");
  EXPECT_EQ(first.nodes, 1);
  EXPECT_EQ(first.gpus, 16);
  EXPECT_EQ(first.step_ms, 520);
  EXPECT_EQ(first.compute_ms, 300);
  EXPECT_EQ(first.comm_ms, 170);
  EXPECT_EQ(first.gb_per_gpu, 6.8);
  EXPECT_FALSE(first.gb_per_node.has_value());
  const auto& last = rows.back();
  EXPECT_EQ(last.system, "Cori");
  EXPECT_EQ(last.nodes, 256);
  EXPECT_FALSE(last.gpus.has_value());
  EXPECT_EQ(last.step_ms, 530);
  EXPECT_EQ(last.compute_ms, 250);
  EXPECT_EQ(last.comm_ms, 220);
  EXPECT_FALSE(last.gb_per_gpu.has_value());
  EXPECT_EQ(last.gb_per_node, 0.7);
}

TEST(CalibRecords, EmptyAndRoundTrip) {
  EXPECT_TRUE(parse_records("").empty());
  const auto rows = table1();
  EXPECT_EQ(parse_records(serialize_records(rows)), rows);
}

TEST(CalibRecords, SchemaErrorsNameColumn) {
  try {
    parse_records("system,nodes,gpus,step_ms,comm_ms,gb_per_gpu,gb_per_node,note\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("compute_ms"), std::string::npos) << e.what();
  }
  try {
    parse_records(std::string(kRecordHeader) + "\nA,1,4,abc,1,1,,,\n");
    FAIL();
  } catch (const ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("row 1"), std::string::npos) << what;
    EXPECT_NE(what.find("step_ms"), std::string::npos) << what;
  }
}

TEST(CalibRecords, QuotedCells) {
  const auto rows = parse_records(std::string(kRecordHeader) +
                                  "\n\"A, B\",1,4,10,5,4,,,\"say \"\"hi\"\"\"\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].system, "A, B");
  EXPECT_EQ(rows[0].note, "say \"hi\"");
}

TEST(CalibRecords, UnitsPerNodeFromNote) {
  const auto rows = table1();
  EXPECT_EQ(record_units_per_node(rows[3]), 2);
  EXPECT_EQ(record_units_per_node(rows[1]), 4);
  EXPECT_FALSE(record_units_per_node(rows[6]).has_value());
  EXPECT_EQ(record_units(rows[6]), 128);
}

TEST(CalibRecords, MachineMatching) {
  const auto machines = bundled_machines();
  for (const auto& r : table1()) EXPECT_NO_THROW(machine_for_record(r, machines)) << r.system;
  MeasurementRecord r;
  r.system = "SUMMIT";
  EXPECT_EQ(machine_for_record(r, machines).name, "summit");
  r.system = "frontier";
  EXPECT_THROW(machine_for_record(r, machines), InputError);
}

TEST(CalibCompute, SummitExact) {
  const auto m = load_machine("summit");
  const auto fit = fit_compute(rows_of("Summit"), m);
  EXPECT_NEAR(fit.calib.w_par / m.node.unit.rel_throughput, 8832.0, 1e-9);
  EXPECT_NEAR(fit.calib.w_ser, 8.0, 1e-9);
  EXPECT_NEAR(compute_time_ms(fit.calib, m, 96), 100.0, 1e-9);
  EXPECT_NEAR(compute_time_ms(fit.calib, m, 192), 54.0, 1e-9);
}

TEST(CalibCompute, CoriExact) {
  const auto m = load_machine("cori");
  const auto fit = fit_compute(rows_of("Cori"), m);
  EXPECT_NEAR(fit.calib.w_par / m.node.unit.rel_throughput, 40960.0, 1e-8);
  EXPECT_NEAR(fit.calib.w_ser, 90.0, 1e-9);
  for (double res : fit.residuals_ms) EXPECT_NEAR(res, 0.0, 1e-9);
}

TEST(CalibCompute, GcpSinglePoint) {
  const auto fit = fit_compute(rows_of("GCP a2-megagpu-16g"), load_machine("gcp-a2-megagpu-16g"));
  EXPECT_NEAR(fit.calib.w_par, 4800.0, 1e-9);
  EXPECT_EQ(fit.calib.w_ser, 0.0);
  EXPECT_THROW(fit_compute({}, load_machine("summit")), FitError);
}

TEST(CalibCompute, NonnegativeClamp) {
  // Compute rising with units would need a negative w_par.
  std::vector<MeasurementRecord> rows = {volume_row(4, 1), volume_row(8, 1)};
  rows[0].compute_ms = 10;
  rows[1].compute_ms = 20;
  const auto fit = fit_compute(rows, load_machine("perlmutter-p1"));
  EXPECT_GE(fit.calib.w_par, 0.0);
  EXPECT_GE(fit.calib.w_ser, 0.0);
}

TEST(CalibVolume, TwoPointSolve) {
  const auto fit = fit_volume_law({volume_row(16, 6.8), volume_row(64, 2.0)});
  EXPECT_NEAR(fit.alpha_gb, 102.4, 1e-9);
  EXPECT_NEAR(fit.beta_gb, 0.4, 1e-9);
  const double at32 = fit.alpha_gb / 32 + fit.beta_gb;
  EXPECT_NEAR(at32, 3.6, 1e-9);
  EXPECT_LE(rel_diff(at32, 3.7), 0.05);
  const double at192 = fit.alpha_gb / 192 + fit.beta_gb;
  EXPECT_NEAR(at192, 0.9333, 1e-3);
}

TEST(CalibVolume, FullTableFlagsSummit192) {
  const auto rows = table1();
  const auto fit = fit_volume_law(rows);
  ASSERT_EQ(fit.used.size(), 6u);
  for (std::size_t k = 0; k < fit.used.size(); ++k) {
    const auto& r = rows[fit.used[k]];
    EXPECT_EQ(fit.outlier[k], r.system == "Summit" && r.gpus == 192) << r.system << r.gpus.value();
  }
}

TEST(CalibVolume, NeedsTwoDistinctCounts) {
  EXPECT_THROW(fit_volume_law({volume_row(16, 6.8)}), FitError);
  EXPECT_THROW(fit_volume_law({volume_row(16, 6.8), volume_row(16, 6.0)}), FitError);
}

TEST(CalibVolume, Apportion) {
  const auto p = load_problem("nl03");
  VolumeFit fit;
  fit.alpha_gb = 102.4;
  fit.beta_gb = 0.4;
  const auto v = apportion_volumes(p, fit);
  EXPECT_NEAR(v.at("a2a_comm1") + v.at("a2a_comm2"), 102.4, 1e-9);
  EXPECT_NEAR(v.at("a2a_comm1"), 92.16, 1e-9);
  EXPECT_NEAR(v.at("reduce_comm1"), 0.2, 1e-12);
}

class CalibFitted : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    report_ = new FitReport(fit_calibration(table1(), bundled_machines(), load_problem("nl03")));
  }
  static void TearDownTestSuite() { delete report_; }
  static FitReport* report_;
};
FitReport* CalibFitted::report_ = nullptr;

TEST_F(CalibFitted, PerlmutterNetwork) {
  const auto& eff = report_->efficiency.at("perlmutter-p1");
  EXPECT_GT(eff.eta_net, 0.78);
  EXPECT_LT(eff.eta_net, 0.88);
  EXPECT_LT(eff.net_spread, 0.03);
}

TEST_F(CalibFitted, SummitNetworkSpreadReported) {
  const auto& eff = report_->efficiency.at("summit");
  ASSERT_EQ(eff.candidates.size(), 2u);
  for (const auto& c : eff.candidates) {
    EXPECT_TRUE(c.network);
    EXPECT_GT(c.value, 0.4);
    EXPECT_LT(c.value, 0.65);
  }
  EXPECT_GT(eff.net_spread, 0.08);
}

TEST_F(CalibFitted, GcpFabricDominated) {
  const auto& eff = report_->efficiency.at("gcp-a2-megagpu-16g");
  ASSERT_EQ(eff.candidates.size(), 1u);
  EXPECT_FALSE(eff.candidates[0].network);
  EXPECT_GT(eff.eta_fab, 0.09);
  EXPECT_LT(eff.eta_fab, 0.16);
}

TEST_F(CalibFitted, EfficienciesInRange) {
  for (const auto& [name, mc] : report_->calibration.machines) {
    EXPECT_GT(mc.eta_net, 0.0) << name;
    EXPECT_LE(mc.eta_net, 1.0) << name;
    EXPECT_GT(mc.eta_fab, 0.0) << name;
    EXPECT_LE(mc.eta_fab, 1.0) << name;
    EXPECT_GE(mc.other_ms, 0.0) << name;
  }
  EXPECT_NEAR(report_->calibration.machines.at("gcp-a2-megagpu-16g").other_ms, 50.0, 1e-9);
}

TEST_F(CalibFitted, OutlierIsWarningNotError) {
  const auto& w = report_->warnings;
  EXPECT_TRUE(std::any_of(w.begin(), w.end(), [](const std::string& s) {
    return s.find("volume outlier") != std::string::npos && s.find("Summit 192") != std::string::npos;
  }));
}

TEST_F(CalibFitted, DocumentRoundTrip) {
  const auto& cal = report_->calibration;
  const auto text = serialize_calibration(cal);
  EXPECT_EQ(parse_calibration(text), cal);
  EXPECT_EQ(serialize_calibration(parse_calibration(text)), text);
}

TEST_F(CalibFitted, DerivedMachineFallsBackToBase) {
  const auto* mc = find_calibration(report_->calibration, "perlmutter-p1:nvswitch=4");
  ASSERT_NE(mc, nullptr);
  EXPECT_EQ(*mc, report_->calibration.machines.at("perlmutter-p1"));
  EXPECT_EQ(find_calibration(report_->calibration, "frontier"), nullptr);
}

TEST_F(CalibFitted, ValidationWithinTargets) {
  const auto rep = validate(table1(), report_->calibration, load_problem("nl03"), bundled_machines());
  ASSERT_EQ(rep.rows.size(), 8u);
  EXPECT_LE(rep.median_abs_step_err_pct, 15.0);
  EXPECT_LE(rep.max_abs_step_err_pct, 30.0);
  EXPECT_TRUE(rep.passes(30.0));
  EXPECT_FALSE(rep.passes(1.0));
  // The 2-of-4 row keeps its better fraction.
  EXPECT_GT(rep.rows[3].predicted_fraction_pct, rep.rows[1].predicted_fraction_pct);
}

TEST_F(CalibFitted, RefitOnPredictionsIsIdempotent) {
  const auto machines = bundled_machines();
  const auto problem = load_problem("nl03");
  const auto& cal = report_->calibration;
  const auto again = fit_calibration(predicted_records(table1(), cal, problem, machines),
                                     machines, problem)
                         .calibration;
  EXPECT_LE(rel_diff(again.alpha_gb, cal.alpha_gb), 1e-9);
  EXPECT_LE(rel_diff(again.beta_gb, cal.beta_gb), 1e-9);
  for (const auto& [name, mc] : cal.machines) {
    const auto& m2 = again.machines.at(name);
    EXPECT_LE(rel_diff(m2.compute.w_par, mc.compute.w_par), 1e-9) << name;
    EXPECT_LE(std::abs(m2.compute.w_ser - mc.compute.w_ser), 1e-9 * std::max(1.0, mc.compute.w_ser))
        << name;
    EXPECT_LE(rel_diff(m2.eta_net, mc.eta_net), 1e-9) << name;
    EXPECT_LE(rel_diff(m2.eta_fab, mc.eta_fab), 1e-9) << name;
    EXPECT_LE(std::abs(m2.other_ms - mc.other_ms), 1e-9 * std::max(1.0, mc.other_ms)) << name;
  }
}

TEST(CalibLeaveOneOut, PerlmutterSixteenNodes) {
  auto rows = table1();
  const auto held = rows[2];
  ASSERT_EQ(held.nodes, 16);
  ASSERT_EQ(held.gpus, 64);
  rows.erase(rows.begin() + 2);
  const auto machines = bundled_machines();
  const auto problem = load_problem("nl03");
  const auto cal = fit_calibration(rows, machines, problem).calibration;
  const auto rep = validate({held}, cal, problem, machines);
  EXPECT_LE(std::abs(rep.rows[0].step_err_pct), 25.0);
}

TEST(CalibValidate, EmptyPasses) {
  const auto rep = validate({}, CalibrationSet{}, load_problem("nl03"), bundled_machines());
  EXPECT_TRUE(rep.rows.empty());
  EXPECT_TRUE(rep.passes(0.0));
  EXPECT_FALSE(rep.worst_row.has_value());
}

TEST(CalibValidate, UnknownMachine) {
  auto rows = table1();
  rows[0].system = "frontier";
  EXPECT_THROW(validate(rows, CalibrationSet{}, load_problem("nl03"), bundled_machines()),
               InputError);
}

TEST(CalibEfficiency, ZeroCommIsError) {
  auto rows = rows_of("Summit");
  rows[0].comm_ms = 0;
  EXPECT_THROW(fit_efficiencies(rows, load_machine("summit"), load_problem("nl03")), FitError);
}

TEST(CalibEfficiency, ClampedWhenFasterThanIdeal) {
  auto rows = rows_of("Summit");
  for (auto& r : rows) r.comm_ms = 1e-3;
  const auto eff = fit_efficiencies(rows, load_machine("summit"), load_problem("nl03"));
  EXPECT_EQ(eff.eta_net, 1.0);
  for (const auto& c : eff.candidates) EXPECT_TRUE(c.clamped);
  EXPECT_FALSE(eff.warnings.empty());
}

}  // namespace
}  // namespace commstep
