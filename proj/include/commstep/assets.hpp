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

// Files compiled into the library: machine presets, the nl03 problem and the
// published measurement table.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "commstep/calib.hpp"
#include "commstep/decomp.hpp"
#include "commstep/topology.hpp"

namespace commstep {

struct EmbeddedAsset {
  /// Relative path, e.g. "machines/summit.machine".
  std::string_view path;
  std::string_view content;
};

std::span<const EmbeddedAsset> bundled_assets();

/// Names of the bundled machine presets, in a fixed order.
std::vector<std::string> bundled_machine_names();
std::optional<std::string_view> bundled_machine_text(std::string_view name);
std::optional<std::string_view> bundled_problem_text(std::string_view name);
std::string_view bundled_table1_csv();

std::vector<Machine> bundled_machines();

/// A preset name, an existing file path, or either followed by
/// ":nvswitch=<k>" for the joined-node variant. Throws InputError.
Machine load_machine(std::string_view ref);
/// A bundled problem name or a file path.
ProblemSpec load_problem(std::string_view ref);
/// "table1" for the bundled table, otherwise a file path.
std::vector<MeasurementRecord> load_records(std::string_view ref);

/// Reads a whole file; throws InputError when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace commstep
