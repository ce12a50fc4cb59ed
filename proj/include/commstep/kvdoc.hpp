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

// Line-oriented `[section]` / `key = value` documents shared by the machine,
// problem and calibration file formats. `#` starts a comment anywhere on a
// line. Section and key order is preserved.

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace commstep {

struct KvEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct KvSection {
  std::string name;
  int line = 0;
  std::vector<KvEntry> entries;

  const KvEntry* find(std::string_view key) const;
};

struct KvDocument {
  std::vector<KvSection> sections;

  const KvSection* find(std::string_view name) const;
  /// Throws ParseError when the section is absent.
  const KvSection& require(std::string_view name) const;
};

/// Throws ParseError on malformed lines, duplicate sections or duplicate keys,
/// and on key/value lines that appear before the first section header.
KvDocument parse_kv(std::string_view text);

/// Typed, fail-fast access to one section. Every key must be consumed before
/// `finish()`, otherwise the first unknown key is reported.
class SectionReader {
 public:
  explicit SectionReader(const KvSection& section) : section_(section) {}

  std::string text(std::string_view key);
  std::optional<std::string> optional_text(std::string_view key);
  double number(std::string_view key);
  std::optional<double> optional_number(std::string_view key);
  std::int64_t integer(std::string_view key);

  void finish() const;

 private:
  const KvEntry& require(std::string_view key);
  const KvEntry* lookup(std::string_view key);

  const KvSection& section_;
  std::set<std::string, std::less<>> used_;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Parses a full-string decimal; nullopt on trailing garbage or empty input.
std::optional<double> parse_number(std::string_view text);

class KvWriter {
 public:
  KvWriter& comment(std::string_view text);
  KvWriter& section(std::string_view name);
  KvWriter& put(std::string_view key, std::string_view value);
  KvWriter& put(std::string_view key, double value);
  KvWriter& put(std::string_view key, std::int64_t value);

  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

}  // namespace commstep
