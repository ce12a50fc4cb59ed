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

#include "commstep/assets.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commstep/error.hpp"

namespace commstep {

// Defined in the generated assets_data.cpp.
std::span<const EmbeddedAsset> embedded_asset_table();

namespace {

constexpr std::string_view kMachineDir = "machines/";
constexpr std::string_view kMachineExt = ".machine";
constexpr std::string_view kNvswitchSuffix = ":nvswitch=";

std::optional<std::string_view> find_asset(std::string_view path) {
  for (const auto& a : bundled_assets()) {
    if (a.path == path) return a.content;
  }
  return std::nullopt;
}

}  // namespace

std::span<const EmbeddedAsset> bundled_assets() { return embedded_asset_table(); }

std::vector<std::string> bundled_machine_names() {
  // Fixed order: the single-node system first, then the clusters.
  return {"gcp-a2-megagpu-16g", "perlmutter-p1", "summit", "cori"};
}

std::optional<std::string_view> bundled_machine_text(std::string_view name) {
  return find_asset(std::string(kMachineDir) + std::string(name) + std::string(kMachineExt));
}

std::optional<std::string_view> bundled_problem_text(std::string_view name) {
  return find_asset("problems/" + std::string(name) + ".problem");
}

std::string_view bundled_table1_csv() { return *find_asset("data/table1.csv"); }

std::vector<Machine> bundled_machines() {
  std::vector<Machine> out;
  for (const auto& name : bundled_machine_names()) out.push_back(load_machine(name));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Machine load_machine(std::string_view ref) {
  if (const auto pos = ref.rfind(kNvswitchSuffix); pos != std::string_view::npos) {
    const auto count = ref.substr(pos + kNvswitchSuffix.size());
    int k = 0;
    const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), k);
    if (ec != std::errc{} || ptr != count.data() + count.size()) {
      throw InputError("bad nvswitch join count in '" + std::string(ref) + "'");
    }
    return build_hypothetical_nvswitch(load_machine(ref.substr(0, pos)), k);
  }
  if (const auto text = bundled_machine_text(ref)) return parse_machine(*text);
  const std::string path(ref);
  if (std::filesystem::is_regular_file(path)) return parse_machine(read_file(path));
  throw InputError("unknown machine '" + path + "' (not a preset or a readable file)");
}

ProblemSpec load_problem(std::string_view ref) {
  if (const auto text = bundled_problem_text(ref)) return parse_problem(*text);
  const std::string path(ref);
  if (std::filesystem::is_regular_file(path)) return parse_problem(read_file(path));
  throw InputError("unknown problem '" + path + "' (not bundled or a readable file)");
}

std::vector<MeasurementRecord> load_records(std::string_view ref) {
  if (ref == "table1") return parse_records(bundled_table1_csv());
  return parse_records(read_file(std::string(ref)));
}

}  // namespace commstep
