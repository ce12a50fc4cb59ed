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

#include <string>
#include <vector>

#include "commstep/assets.hpp"
#include "commstep/error.hpp"
#include "commstep/report.hpp"

namespace commstep {
namespace {

class ReportTest : public ::testing::Test {
 protected:
  ProblemSpec problem_ = load_problem("nl03");
  Machine perlmutter_ = load_machine("perlmutter-p1");
  Scenario scenario_ = {8, 1, PlacementStrategy::round_robin, std::nullopt, {}};
  StepEstimate est_ = estimate_step(problem_, perlmutter_, scenario_, {5270, 0}, 30);
};

TEST_F(ReportTest, RowFields) {
  const auto r = make_row("perlmutter-p1", scenario_, est_);
  EXPECT_EQ(r.units, 32);
  EXPECT_EQ(r.placement, "round_robin");
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.fraction_pct, fraction_in_compute(est_.step_ms, est_.compute_ms));
  EXPECT_EQ(r.bottlenecks,
            "a2a_comm1=internode;a2a_comm2=fabric;reduce_comm1=internode");
}

TEST_F(ReportTest, CsvRoundTripIsExact) {
  std::vector<ReportRow> rows = {make_row("perlmutter-p1", scenario_, est_),
                                 infeasible_row("perlmutter-p1", perlmutter_,
                                                {1, 1, PlacementStrategy::block_comm1, {}, {}})};
  const auto csv = rows_to_csv(rows);
  EXPECT_EQ(csv.substr(0, kReportHeader.size()), kReportHeader);
  EXPECT_EQ(parse_report_csv(csv), rows);
  EXPECT_EQ(rows_to_csv(parse_report_csv(csv)), csv);
}

TEST_F(ReportTest, CsvErrors) {
  EXPECT_THROW(parse_report_csv("nope\n"), ParseError);
  EXPECT_THROW(parse_report_csv(std::string(kReportHeader) + "\na,b\n"), ParseError);
}

TEST_F(ReportTest, TablePrecision) {
  auto r = make_row("perlmutter-p1", scenario_, est_);
  r.step_ms = 669.6;
  r.class_gb[3] = 12.34;
  const auto table = rows_to_table({r});
  EXPECT_NE(table.find(" 670 "), std::string::npos) << table;
  EXPECT_NE(table.find(" 12.3"), std::string::npos) << table;
  const auto infeasible =
      rows_to_table({infeasible_row("perlmutter-p1", perlmutter_, {1, 1, PlacementStrategy::block_comm1, {}, {}})});
  EXPECT_NE(infeasible.find("infeasible"), std::string::npos);
}

TEST_F(ReportTest, EstimateText) {
  const auto text = estimate_to_text("perlmutter-p1", scenario_, est_);
  EXPECT_NE(text.find("grid 16x2"), std::string::npos) << text;
  EXPECT_NE(text.find("reduce_comm1"), std::string::npos);
  EXPECT_NE(text.find("per-node egress"), std::string::npos);
}

TEST(ReportValidation, MentionsGpuComparison) {
  const auto machines = bundled_machines();
  const auto problem = load_problem("nl03");
  const auto records = load_records("table1");
  const auto cal = fit_calibration(records, machines, problem).calibration;
  const auto text = validation_to_text(validate(records, cal, problem, machines));
  EXPECT_NE(text.find("median"), std::string::npos);
  EXPECT_NE(text.find("16 GPUs"), std::string::npos) << text;
  EXPECT_NE(text.find("32+ GPUs"), std::string::npos) << text;
}

}  // namespace
}  // namespace commstep
