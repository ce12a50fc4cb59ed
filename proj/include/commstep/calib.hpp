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

// Measurement records, parameter fits, and validation of the fitted model.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "commstep/cost.hpp"
#include "commstep/decomp.hpp"
#include "commstep/topology.hpp"

namespace commstep {

inline constexpr std::string_view kRecordHeader =
    "system,nodes,gpus,step_ms,compute_ms,comm_ms,gb_per_gpu,gb_per_node,note";

struct MeasurementRecord {
  std::string system;
  int nodes = 0;
  std::optional<int> gpus;
  double step_ms = 0.0;
  double compute_ms = 0.0;
  double comm_ms = 0.0;
  std::optional<double> gb_per_gpu;
  std::optional<double> gb_per_node;
  std::string note;

  bool operator==(const MeasurementRecord&) const = default;
};

/// Parses the measurement CSV. The header must match kRecordHeader exactly;
/// empty cells mean absent. An empty document yields no records.
std::vector<MeasurementRecord> parse_records(std::string_view csv_text);
std::string serialize_records(const std::vector<MeasurementRecord>& records);

/// Compute units behind a record: its GPUs, or its nodes on CPU systems.
int record_units(const MeasurementRecord& record);
/// Units per node in use; "<k> of <n> GPUs used" in the note selects k.
std::optional<int> record_units_per_node(const MeasurementRecord& record);

/// Machine whose name or label equals the record's system (case-insensitive).
/// Throws InputError when none matches.
const Machine& machine_for_record(const MeasurementRecord& record,
                                  const std::vector<Machine>& machines);

struct FitSettings {
  int ranks_per_unit = 1;
  PlacementStrategy strategy = PlacementStrategy::block_comm1;
  /// Relative volume-fit residual above which a record is reported as outlier.
  double outlier_threshold = 0.2;
  /// Efficiency spread (max - min) above which a model-mismatch warning is
  /// raised.
  double spread_warning = 0.15;

  bool operator==(const FitSettings&) const = default;
};

/// Scenario a record was measured under, given the fit settings.
Scenario record_scenario(const MeasurementRecord& record, const Machine& machine,
                         const FitSettings& settings);

struct ComputeFit {
  ComputeCalib calib;
  /// measured - fitted, per input record (ms).
  std::vector<double> residuals_ms;
};

/// compute_ms ~ w_par / (units * rel) + w_ser by least squares, both terms
/// clamped nonnegative. One distinct unit count gives w_ser = 0.
ComputeFit fit_compute(const std::vector<MeasurementRecord>& records, const Machine& machine);

struct VolumeFit {
  double alpha_gb = 0.0;
  double beta_gb = 0.0;
  /// (fitted - measured) / measured, per usable record in input order.
  std::vector<double> rel_residuals;
  std::vector<bool> outlier;
  /// Indices (into the input) of the records used.
  std::vector<std::size_t> used;
};

/// gb_per_gpu ~ alpha / units + beta by least squares over records carrying
/// gb_per_gpu. Throws FitError with fewer than 2 distinct unit counts.
VolumeFit fit_volume_law(const std::vector<MeasurementRecord>& records,
                         double outlier_threshold = 0.2);

/// Spreads alpha over the alltoall phases and beta / 2 over the allreduce
/// phases, in proportion to the problem's own phase volumes.
std::map<std::string, double> apportion_volumes(const ProblemSpec& problem, const VolumeFit& fit);

struct EfficiencyCandidate {
  /// Ideal (efficiency 1) modeled comm time over measured comm time.
  double value = 0.0;
  /// True when the candidate informs the NIC efficiency, false for fabric.
  bool network = true;
  bool clamped = false;
};

struct EfficiencyFit {
  double eta_net = 1.0;
  double eta_fab = 1.0;
  double net_spread = 0.0;
  double fab_spread = 0.0;
  std::vector<EfficiencyCandidate> candidates;
  std::vector<std::string> warnings;
};

/// Per record, the ideal bottleneck comm time over the measured one; the
/// dominant class decides whether it informs the NIC or the fabric
/// efficiency. Aggregated by geometric mean and clamped to (0, 1].
EfficiencyFit fit_efficiencies(const std::vector<MeasurementRecord>& records,
                               const Machine& machine, const ProblemSpec& problem,
                               const FitSettings& settings = {});

struct MachineCalibration {
  ComputeCalib compute;
  double eta_net = 1.0;
  double eta_fab = 1.0;
  double other_ms = 0.0;
  int records = 0;
  double compute_max_residual_ms = 0.0;
  double eta_net_spread = 0.0;
  double eta_fab_spread = 0.0;

  bool operator==(const MachineCalibration&) const = default;
};

struct CalibrationSet {
  FitSettings settings;
  std::string problem;
  double alpha_gb = 0.0;
  double beta_gb = 0.0;
  std::map<std::string, double> phase_volumes;
  std::map<std::string, MachineCalibration> machines;

  bool operator==(const CalibrationSet&) const = default;
};

std::string serialize_calibration(const CalibrationSet& calibration);
CalibrationSet parse_calibration(std::string_view text);

/// Calibration of a machine; derived names such as "summit:nvswitch=4" fall
/// back to their base machine. nullptr when absent.
const MachineCalibration* find_calibration(const CalibrationSet& calibration,
                                           std::string_view machine_name);

/// Machine with the calibrated efficiencies applied.
Machine calibrated(const Machine& machine, const MachineCalibration& calib);

struct FitReport {
  CalibrationSet calibration;
  VolumeFit volumes;
  std::map<std::string, ComputeFit> compute;
  std::map<std::string, EfficiencyFit> efficiency;
  std::vector<std::string> warnings;
};

/// Fits everything: volume law over all records with gb_per_gpu, then per
/// machine the compute model, the efficiencies and other_ms (mean measured
/// step - compute - comm, floored at 0).
FitReport fit_calibration(const std::vector<MeasurementRecord>& records,
                          const std::vector<Machine>& machines, const ProblemSpec& problem,
                          const FitSettings& settings = {});

struct ValidationRow {
  std::string system;
  int nodes = 0;
  int units = 0;
  UnitKind unit_kind = UnitKind::gpu;
  std::string note;
  double measured_step_ms = 0.0;
  double measured_compute_ms = 0.0;
  double measured_comm_ms = 0.0;
  StepEstimate predicted;
  /// Signed percent errors, (predicted - measured) / measured * 100.
  double step_err_pct = 0.0;
  double compute_err_pct = 0.0;
  double comm_err_pct = 0.0;
  int measured_fraction_pct = 0;
  int predicted_fraction_pct = 0;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  double max_abs_step_err_pct = 0.0;
  double median_abs_step_err_pct = 0.0;
  /// Index of the row with the largest absolute step error; nullopt if empty.
  std::optional<std::size_t> worst_row;

  bool passes(double max_err_pct) const { return max_abs_step_err_pct <= max_err_pct; }
};

/// Predicts every record with the calibration. Throws InputError when a
/// record's machine is unknown or uncalibrated.
ValidationReport validate(const std::vector<MeasurementRecord>& records,
                          const CalibrationSet& calibration, const ProblemSpec& problem,
                          const std::vector<Machine>& machines);

/// Records rewritten with the calibrated model's own predictions: step,
/// compute and comm from the model, gb_per_gpu from the fitted volume law,
/// gb_per_node from the modeled mean node egress.
std::vector<MeasurementRecord> predicted_records(const std::vector<MeasurementRecord>& records,
                                                 const CalibrationSet& calibration,
                                                 const ProblemSpec& problem,
                                                 const std::vector<Machine>& machines);

}  // namespace commstep
