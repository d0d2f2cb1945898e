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

#include <cmath>
#include <numbers>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "rexp3/analysis.hpp"
#include "rexp3/error.hpp"

namespace rexp3 {
namespace {

std::vector<std::pair<double, double>> power_law(double c, double a,
                                                 std::vector<double> horizons) {
  std::vector<std::pair<double, double>> points;
  for (double T : horizons) points.emplace_back(T, c * std::pow(T, a));
  return points;
}

// Published (beta, estimated slope) pairs.
const std::vector<SlopeRow> kPublishedTable = {
    {0.0, 0.6997, 1, 0}, {0.1, 0.7558, 1, 0}, {0.2, 0.7915, 1, 0},
    {0.3, 0.8421, 1, 0}, {0.4, 0.8801, 1, 0}, {0.5, 0.9210, 1, 0},
    {0.6, 0.9519, 1, 0}, {0.7, 0.9813, 1, 0}, {0.8, 0.9942, 1, 0},
    {0.9, 1.0036, 1, 0}};

TEST(LogLogSlopeTest, ExactPowerLaws) {
  for (double a : {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}) {
    const auto fit =
        loglog_slope(power_law(7.0, a, {2000, 4000, 8000, 16000, 40000}));
    EXPECT_NEAR(fit.slope, a, 1e-10) << a;
    EXPECT_NEAR(fit.intercept, std::log(7.0), 1e-9);
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
    EXPECT_LT(fit.residual_max, 1e-10);
  }
  EXPECT_NEAR(loglog_slope(power_law(7.0, 2.0 / 3.0, {3000, 9000})).slope,
              2.0 / 3.0, 1e-12);
  EXPECT_NEAR(loglog_slope(power_law(0.3, 1.0, {10, 20, 30})).slope, 1.0,
              1e-12);
}

TEST(LogLogSlopeTest, TwoPointHandCase) {
  const std::vector<std::pair<double, double>> points{{1000, 500},
                                                      {8000, 2000}};
  const auto fit = loglog_slope(points);
  EXPECT_NEAR(fit.slope, std::log(4.0) / std::log(8.0), 1e-14);
  EXPECT_NEAR(fit.slope, 2.0 / 3.0, 1e-14);
  EXPECT_EQ(fit.points.size(), 2u);
  EXPECT_DOUBLE_EQ(fit.points[0].first, std::log(1000.0));
}

TEST(LogLogSlopeTest, MatchesNormalEquations) {
  const std::vector<std::pair<double, double>> points{
      {2000, 51.2}, {4000, 80.9}, {8000, 133.0}, {16000, 207.5}};
  std::vector<double> x, y;
  for (auto [T, r] : points) {
    x.push_back(std::log(T));
    y.push_back(std::log(r));
  }
  const auto fit = loglog_slope(points);
  EXPECT_NEAR(fit.slope, testing::ols_slope(x, y), 1e-12);
  EXPECT_GT(fit.r_squared, 0.99);
  EXPECT_LE(fit.r_squared, 1.0);
  EXPECT_GT(fit.residual_max, 0.0);
}

TEST(LogLogSlopeTest, DegenerateInputs) {
  EXPECT_THROW(loglog_slope(std::vector<std::pair<double, double>>{{10, 1}}),
               FitError);
  EXPECT_THROW(loglog_slope(std::vector<std::pair<double, double>>{
                   {10, 1}, {20, 0}}),
               FitError);
  EXPECT_THROW(loglog_slope(std::vector<std::pair<double, double>>{
                   {10, 1}, {20, -3}}),
               FitError);
  EXPECT_THROW(loglog_slope(std::vector<std::pair<double, double>>{
                   {10, 1}, {10, 2}}),
               FitError);
}

TEST(BoundsTest, LowerBoundValues) {
  // 0.125 * 6^{1/3} * 5000^{2/3} = 66.41616...
  EXPECT_NEAR(theory_lower_bound(5000, 2, 3.0), 66.41616057391316, 1e-9);
  EXPECT_NEAR(theory_lower_bound(1, 2, 0.5), 0.125, 1e-15);
  EXPECT_NEAR(theory_lower_bound(10000, 2, 3.0) /
                  theory_lower_bound(5000, 2, 3.0),
              std::pow(2.0, 2.0 / 3.0), 1e-12);
}

TEST(BoundsTest, UpperBoundValues) {
  EXPECT_NEAR(upper_bound_constant(), 11.8650, 1e-4);
  EXPECT_NEAR(upper_bound_constant(),
              6 * std::sqrt(std::numbers::e - 1) + 4, 1e-15);
  EXPECT_NEAR(theory_upper_bound(5000, 2, 3.0), 5579.0, 2.0);
  EXPECT_NEAR(theory_upper_bound(5000, 2, 6.0) /
                  theory_upper_bound(5000, 2, 3.0),
              std::cbrt(2.0), 1e-12);
}

TEST(BoundsTest, RatioIsConstant) {
  for (int K : {2, 3, 10}) {
    const double expected =
        8.0 * upper_bound_constant() * std::cbrt(std::log(double(K)));
    for (int T : {100, 5000, 123456}) {
      for (double V : {1.0, 3.0, 7.5}) {
        const auto env = bound_envelope(T, K, V);
        EXPECT_LE(env.lower, env.upper);
        EXPECT_NEAR(env.upper / env.lower, expected, 1e-9 * expected);
      }
    }
  }
}

TEST(BoundsTest, RangeErrors) {
  EXPECT_THROW(theory_lower_bound(5000, 2, 0.1), BudgetRangeError);
  EXPECT_THROW(theory_upper_bound(5000, 2, 5000.0), BudgetRangeError);
  EXPECT_THROW(theory_upper_bound(5000, 1, 1.0), BudgetRangeError);
  EXPECT_NO_THROW(
      theory_upper_bound(5000, 2, 5000.0, BudgetRange::kRelaxed));
}

TEST(StageTwoTest, ExactMinimaxRates) {
  std::map<double, std::vector<std::pair<double, double>>> by_beta;
  for (double beta : {0.0, 0.1, 0.5, 0.9}) {
    by_beta[beta] = power_law(2.5, (2.0 + beta) / 3.0, {2000, 4000, 8000});
  }
  const auto rows = stage_two_slope_table(by_beta);
  ASSERT_EQ(rows.size(), 4u);
  for (const SlopeRow& row : rows) {
    EXPECT_NEAR(row.slope, (2.0 + row.beta) / 3.0, 1e-10);
    EXPECT_EQ(row.n_points, 3);
  }
  EXPECT_LT(rows[0].beta, rows[3].beta);
  EXPECT_NEAR(slope_of_slopes(rows), 1.0 / 3.0, 1e-12);
}

TEST(StageTwoTest, PropagatesFitErrors) {
  std::map<double, std::vector<std::pair<double, double>>> by_beta;
  by_beta[0.2] = {{100, 1.0}};
  EXPECT_THROW(stage_two_slope_table(by_beta), FitError);
}

TEST(SlopeOfSlopesTest, PublishedTable) {
  // OLS over the ten published rows: 0.3468606...
  std::vector<double> x, y;
  for (const auto& row : kPublishedTable) {
    x.push_back(row.beta);
    y.push_back(row.slope);
  }
  EXPECT_NEAR(slope_of_slopes(kPublishedTable), testing::ols_slope(x, y),
              1e-12);
  EXPECT_NEAR(slope_of_slopes(kPublishedTable), 0.344, 0.01);
}

TEST(SlopeOfSlopesTest, Degenerate) {
  EXPECT_THROW(slope_of_slopes(std::vector<SlopeRow>{{0.2, 0.8, 1, 3}}),
               FitError);
  EXPECT_THROW(slope_of_slopes(std::vector<SlopeRow>{}), FitError);
}

TEST(SlopeOutputTest, CsvAndTable) {
  const std::vector<SlopeRow> rows{{0.0, 0.6997, 0.999, 4},
                                   {0.3, 0.8421, 0.98, 4}};
  std::ostringstream csv;
  write_slope_csv(csv, rows);
  EXPECT_EQ(csv.str(),
            "beta,slope,r_squared,n_points\n"
            "0,0.69969999999999999,0.999,4\n"
            "0.29999999999999999,0.84209999999999996,0.97999999999999998,4\n");
  std::ostringstream table;
  write_slope_table(table, rows);
  EXPECT_NE(table.str().find("|        0.0 |          0.6997 |"),
            std::string::npos);
  EXPECT_NE(table.str().find("|        0.3 |          0.8421 |"),
            std::string::npos);
}

}  // namespace
}  // namespace rexp3
