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

// Report rows shared by predict, sweep, optimize and validate. Text tables
// print ms with 0 decimals, GB with 1 and fractions as integer percent; the
// CSV form keeps full precision so it parses back to the same values.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "commstep/calib.hpp"
#include "commstep/cost.hpp"

namespace commstep {

inline constexpr std::string_view kReportHeader =
    "machine,nodes,units,ranks_per_unit,placement,feasible,step_ms,compute_ms,comm_ms,other_ms,"
    "fraction_pct,local_gb,fabric_gb,cross_domain_gb,internode_gb,unit_egress_max_gb,"
    "unit_egress_mean_gb,node_egress_max_gb,node_egress_mean_gb,bottlenecks";

struct ReportRow {
  std::string machine;
  int nodes = 0;
  int units = 0;
  int ranks_per_unit = 0;
  std::string placement;
  bool feasible = true;
  double step_ms = 0.0;
  double compute_ms = 0.0;
  double comm_ms = 0.0;
  double other_ms = 0.0;
  int fraction_pct = 0;
  ClassBytes class_gb{};
  double unit_egress_max_gb = 0.0;
  double unit_egress_mean_gb = 0.0;
  double node_egress_max_gb = 0.0;
  double node_egress_mean_gb = 0.0;
  /// "label=class" pairs joined by ';'.
  std::string bottlenecks;

  bool operator==(const ReportRow&) const = default;
};

ReportRow make_row(const std::string& machine, const Scenario& scenario,
                   const StepEstimate& estimate);
ReportRow infeasible_row(const std::string& machine, const Machine& spec,
                         const Scenario& scenario);

std::string rows_to_csv(const std::vector<ReportRow>& rows);
/// Inverse of rows_to_csv. Throws ParseError on a header mismatch.
std::vector<ReportRow> parse_report_csv(std::string_view text);

/// Fixed-width text table, one line per row.
std::string rows_to_table(const std::vector<ReportRow>& rows);

/// Detailed single-scenario report: estimate plus per-phase traffic.
std::string estimate_to_text(const std::string& machine, const Scenario& scenario,
                             const StepEstimate& estimate);

std::string validation_to_text(const ValidationReport& report);

}  // namespace commstep
