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

#include "commstep/kvdoc.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "commstep/error.hpp"

namespace commstep {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

const KvEntry* KvSection::find(std::string_view key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

const KvSection* KvDocument::find(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const KvSection& KvDocument::require(std::string_view name) const {
  if (const auto* s = find(name)) return *s;
  throw ParseError(0, "missing section [" + std::string(name) + "]");
}

KvDocument parse_kv(std::string_view text) {
  KvDocument doc;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ParseError(line_no, "empty section name");
      if (doc.find(name) != nullptr) {
        throw ParseError(line_no, "duplicate section [" + std::string(name) + "]");
      }
      doc.sections.push_back(KvSection{std::string(name), line_no, {}});
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key.empty()) throw ParseError(line_no, "empty key");
      if (doc.sections.empty()) throw ParseError(line_no, "key outside of any section");
      auto& section = doc.sections.back();
      if (section.find(key) != nullptr) {
        throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");
      }
      section.entries.push_back(KvEntry{std::string(key), std::string(value), line_no});
    }
    if (eol == text.size()) break;
  }
  return doc;
}

const KvEntry* SectionReader::lookup(std::string_view key) {
  const auto* e = section_.find(key);
  if (e != nullptr) used_.insert(std::string(key));
  return e;
}

const KvEntry& SectionReader::require(std::string_view key) {
  const auto* e = lookup(key);
  if (e == nullptr) {
    throw ParseError(section_.line, "[" + section_.name + "] missing key '" +
                                        std::string(key) + "'");
  }
  return *e;
}

std::string SectionReader::text(std::string_view key) { return require(key).value; }

std::optional<std::string> SectionReader::optional_text(std::string_view key) {
  if (const auto* e = lookup(key)) return e->value;
  return std::nullopt;
}

double SectionReader::number(std::string_view key) {
  const auto& e = require(key);
  const auto v = parse_number(e.value);
  if (!v) throw ParseError(e.line, "'" + e.key + "' is not a number: " + e.value);
  return *v;
}

std::optional<double> SectionReader::optional_number(std::string_view key) {
  if (section_.find(key) == nullptr) return std::nullopt;
  return number(key);
}

std::int64_t SectionReader::integer(std::string_view key) {
  const auto& e = require(key);
  std::int64_t v = 0;
  const auto* end = e.value.data() + e.value.size();
  const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(e.line, "'" + e.key + "' is not an integer: " + e.value);
  }
  return v;
}

void SectionReader::finish() const {
  for (const auto& e : section_.entries) {
    if (!used_.contains(e.key)) {
      throw ParseError(e.line, "unknown key '" + e.key + "' in [" + section_.name + "]");
    }
  }
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

KvWriter& KvWriter::comment(std::string_view text) {
  out_ += "# ";
  out_ += text;
  out_ += '\n';
  return *this;
}

KvWriter& KvWriter::section(std::string_view name) {
  if (!out_.empty() && out_.back() == '\n' && out_.size() > 1 &&
      out_[out_.size() - 2] != '\n') {
    out_ += '\n';
  }
  out_ += '[';
  out_ += name;
  out_ += "]\n";
  return *this;
}

KvWriter& KvWriter::put(std::string_view key, std::string_view value) {
  out_ += key;
  out_ += " = ";
  out_ += value;
  out_ += '\n';
  return *this;
}

KvWriter& KvWriter::put(std::string_view key, double value) {
  return put(key, std::string_view(format_number(value)));
}

KvWriter& KvWriter::put(std::string_view key, std::int64_t value) {
  return put(key, std::string_view(std::to_string(value)));
}

}  // namespace commstep
