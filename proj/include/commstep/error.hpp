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

#pragma once

#include <stdexcept>
#include <string>

namespace commstep {

/// Base of every error raised for bad user input (files, flags, scenario
/// parameters). The CLI maps these to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed document text. `line()` is 1-based; 0 when not line-specific.
class ParseError : public InputError {
 public:
  ParseError(int line, const std::string& what)
      : InputError(line > 0 ? "line " + std::to_string(line) + ": " + what
                            : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A parsed value violates a domain invariant. `field()` names it.
class InvariantError : public InputError {
 public:
  InvariantError(std::string field, const std::string& what)
      : InputError(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Rank counts, node counts or placements that cannot be realized.
class CapacityError : public InputError {
 public:
  using InputError::InputError;
};

/// Not enough (or unusable) data for a fit.
class FitError : public InputError {
 public:
  using InputError::InputError;
};

/// The scenario cannot run: the problem does not fit in the memory of the
/// requested nodes. Not an input error; the CLI maps it to exit code 2.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace commstep
