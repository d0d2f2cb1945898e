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

#include "rexp3/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <set>

#include "rexp3/error.hpp"
#include "rexp3/io.hpp"

namespace rexp3 {

SlopeFit linear_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw FitError("fit needs at least two points");
  const double n = static_cast<double>(points.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [x, y] : points) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mean_x) * (x - mean_x);
    sxy += (x - mean_x) * (y - mean_y);
    syy += (y - mean_y) * (y - mean_y);
  }
  if (!(sxx > 0.0)) throw FitError("fit needs at least two distinct x values");

  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  fit.points.assign(points.begin(), points.end());
  double ss_res = 0.0;
  for (const auto& [x, y] : points) {
    const double r = y - (fit.intercept + fit.slope * x);
    ss_res += r * r;
    fit.residual_max = std::max(fit.residual_max, std::fabs(r));
  }
  // Residuals at rounding level count as a perfect fit, even for flat data.
  const double scale = n * std::max(1.0, mean_y * mean_y);
  if (ss_res <= 1e-24 * scale || !(syy > 0.0)) {
    fit.r_squared = 1.0;
  } else {
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

SlopeFit loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) {
    throw FitError("log-log fit needs at least two points");
  }
  std::set<double> seen;
  std::vector<std::pair<double, double>> logs;
  logs.reserve(points.size());
  for (const auto& [horizon, regret] : points) {
    if (!(horizon > 0.0)) throw FitError("log-log fit needs T > 0");
    if (!(regret > 0.0)) {
      throw FitError("log-log fit needs positive regret, got " +
                     io::format_double(regret) + " at T=" +
                     io::format_double(horizon));
    }
    if (!seen.insert(horizon).second) {
      throw FitError("duplicate T=" + io::format_double(horizon) +
                     " in log-log fit");
    }
    logs.emplace_back(std::log(horizon), std::log(regret));
  }
  return linear_fit(logs);
}

double upper_bound_constant() {
  return 6.0 * std::sqrt(std::numbers::e - 1.0) + 4.0;
}

double theory_lower_bound(int horizon, int num_arms, double budget,
                          BudgetRange range) {
  if (num_arms < 2) throw BudgetRangeError("bounds need K >= 2");
  check_budget_range(horizon, num_arms, budget, range);
  return kLowerBoundConstant * std::cbrt(num_arms * budget) *
         std::pow(static_cast<double>(horizon), 2.0 / 3.0);
}

double theory_upper_bound(int horizon, int num_arms, double budget,
                          BudgetRange range) {
  if (num_arms < 2) throw BudgetRangeError("bounds need K >= 2");
  check_budget_range(horizon, num_arms, budget, range);
  const double k = static_cast<double>(num_arms);
  return upper_bound_constant() * std::cbrt(k * std::log(k) * budget) *
         std::pow(static_cast<double>(horizon), 2.0 / 3.0);
}

BoundEnvelope bound_envelope(int horizon, int num_arms, double budget,
                             BudgetRange range) {
  return {theory_lower_bound(horizon, num_arms, budget, range),
          theory_upper_bound(horizon, num_arms, budget, range), horizon,
          num_arms, budget};
}

std::vector<SlopeRow> stage_two_slope_table(
    const std::map<double, std::vector<std::pair<double, double>>>& by_beta) {
  std::vector<SlopeRow> rows;
  rows.reserve(by_beta.size());
  for (const auto& [beta, points] : by_beta) {
    const SlopeFit fit = loglog_slope(points);
    rows.push_back(
        {beta, fit.slope, fit.r_squared, static_cast<int>(points.size())});
  }
  return rows;
}

double slope_of_slopes(std::span<const SlopeRow> rows) {
  if (rows.size() < 2) throw FitError("slope of slopes needs two or more rows");
  std::vector<std::pair<double, double>> points;
  points.reserve(rows.size());
  for (const SlopeRow& row : rows) points.emplace_back(row.beta, row.slope);
  return linear_fit(points).slope;
}

void write_slope_csv(std::ostream& out, std::span<const SlopeRow> rows) {
  out << "beta,slope,r_squared,n_points\n";
  for (const SlopeRow& row : rows) {
    out << io::format_double(row.beta) << ',' << io::format_double(row.slope)
        << ',' << io::format_double(row.r_squared) << ',' << row.n_points
        << '\n';
  }
}

void write_slope_table(std::ostream& out, std::span<const SlopeRow> rows) {
  out << "+------------+-----------------+\n"
      << "| beta value | Estimated slope |\n"
      << "+------------+-----------------+\n";
  char line[64];
  for (const SlopeRow& row : rows) {
    std::snprintf(line, sizeof(line), "| %10.1f | %15.4f |\n", row.beta,
                  row.slope);
    out << line;
  }
  out << "+------------+-----------------+\n";
}

}  // namespace rexp3
