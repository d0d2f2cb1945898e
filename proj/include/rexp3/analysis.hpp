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

// Log-log growth-rate fits and the theoretical regret envelopes.

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rexp3/env.hpp"

namespace rexp3 {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  // (ln T, ln regret) for log-log fits, raw (x, y) for linear ones.
  std::vector<std::pair<double, double>> points;
  double residual_max = 0.0;  // largest |residual|
};

// Unweighted least squares y = intercept + slope * x. Needs at least two
// distinct x values; throws FitError otherwise. r^2 is 1 when y is constant
// and fitted exactly.
SlopeFit linear_fit(std::span<const std::pair<double, double>> points);

// Least squares of ln(regret) on ln(T) over (T, regret) pairs. Throws
// FitError for fewer than two points, a non-positive T or regret, or a
// repeated T.
SlopeFit loglog_slope(std::span<const std::pair<double, double>> points);

struct BoundEnvelope {
  double lower;  // worst-case lower envelope, not a per-instance bound
  double upper;
  int horizon;
  int num_arms;
  double budget;
};

// 6 sqrt(e - 1) + 4.
double upper_bound_constant();
inline constexpr double kLowerBoundConstant = 1.0 / 8.0;

// (1/8) (K V)^{1/3} T^{2/3}. Throws BudgetRangeError outside the
// admissible budget range (or for V <= 0 when relaxed).
double theory_lower_bound(int horizon, int num_arms, double budget,
                          BudgetRange range = BudgetRange::kStrict);
// (6 sqrt(e - 1) + 4) (K ln K V)^{1/3} T^{2/3}, same range rules.
double theory_upper_bound(int horizon, int num_arms, double budget,
                          BudgetRange range = BudgetRange::kStrict);
BoundEnvelope bound_envelope(int horizon, int num_arms, double budget,
                             BudgetRange range = BudgetRange::kStrict);

struct SlopeRow {
  double beta;
  double slope;
  double r_squared;
  int n_points;
};

// One log-log fit per beta over that beta's (T, final regret) points,
// rows in ascending beta.
std::vector<SlopeRow> stage_two_slope_table(
    const std::map<double, std::vector<std::pair<double, double>>>& by_beta);

// Least-squares slope of the estimated slope against beta (linear axes).
// Throws FitError for fewer than two rows.
double slope_of_slopes(std::span<const SlopeRow> rows);

// `beta,slope,r_squared,n_points`, 17 significant digits.
void write_slope_csv(std::ostream& out, std::span<const SlopeRow> rows);
// Two-column text table, one row per beta.
void write_slope_table(std::ostream& out, std::span<const SlopeRow> rows);

}  // namespace rexp3
