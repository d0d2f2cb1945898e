// Copyright 2026 The rexp3 Authors.
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

namespace rexp3 {

// V_T outside the admissible range [1/K, T/K].
class BudgetRangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A generated or supplied path whose total variation exceeds its budget.
class BudgetViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Misuse of the sequential policy protocol (out-of-order epochs,
// update without a preceding select, ...).
class PolicyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Degenerate input to a fit (too few points, non-positive regret, ...).
class FitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid experiment configuration; `field` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace rexp3
