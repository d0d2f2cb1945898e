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

// Non-stationary Bernoulli reward environments constrained by a variation
// budget. All epoch and arm arguments are 1-based: epochs run 1..T and arms
// 1..K, matching the formulas in the documentation. Storage is 0-based.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rexp3/rng.hpp"

namespace rexp3 {

// K x T matrix of expected rewards, every entry in [0, 1].
class MeanRewardPath {
 public:
  // `means` is arm-major: means[(k - 1) * T + (t - 1)] is the mean of arm k
  // at epoch t. Throws std::invalid_argument on K < 2, T < 1, a size
  // mismatch or an entry outside [0, 1].
  MeanRewardPath(int num_arms, int horizon, std::vector<double> means);

  // Builds the path by evaluating `mean(arm, t)` over 1..K x 1..T.
  static MeanRewardPath from_function(
      int num_arms, int horizon,
      const std::function<double(int arm, int t)>& mean);

  int num_arms() const { return num_arms_; }
  int horizon() const { return horizon_; }

  double mean(int arm, int t) const {
    return means_[static_cast<std::size_t>(arm - 1) * horizon_ + (t - 1)];
  }
  // Bounds-checked variant of mean().
  double at(int arm, int t) const;

  std::span<const double> arm_means(int arm) const;

  bool operator==(const MeanRewardPath&) const = default;

 private:
  int num_arms_;
  int horizon_;
  std::vector<double> means_;
};

enum class Generator { kSinusoidal, kCompressed, kWorstCase, kCustom };

std::string to_string(Generator generator);
Generator generator_from_string(const std::string& name);

// Whether V_T is required to lie in [1/K, T/K]. Budgets of the form
// c * T^beta leave that range as beta approaches 1, so sweeps over beta run
// relaxed: only V_T > 0 is enforced then, and the sinusoidal and compressed
// generators keep their formulas even where the path's variation overshoots
// V_T (the sinusoid does so for most non-integer V_T).
enum class BudgetRange { kStrict, kRelaxed };

// Throws BudgetRangeError when V_T is not admissible for (T, K).
void check_budget_range(int horizon, int num_arms, double budget,
                        BudgetRange range = BudgetRange::kStrict);

struct BudgetSpec {
  enum class Kind { kConstant, kPower };

  Kind kind = Kind::kConstant;
  double value = 1.0;        // constant: V_T = value
  double coefficient = 1.0;  // power:    V_T = coefficient * T^exponent
  double exponent = 0.0;     // beta in [0, 1)

  static BudgetSpec constant(double v);
  static BudgetSpec power(double c, double beta);

  // Throws std::invalid_argument for non-positive values or beta outside
  // [0, 1).
  void validate() const;
  double resolve(int horizon) const;

  bool operator==(const BudgetSpec&) const = default;
};

enum class RewardLaw { kBernoulli };

struct BanditInstance {
  MeanRewardPath path;
  RewardLaw noise = RewardLaw::kBernoulli;
  double budget = 0.0;
  Generator generator = Generator::kCustom;
  std::uint64_t gen_seed = 0;

  int num_arms() const { return path.num_arms(); }
  int horizon() const { return path.horizon(); }
};

// Sum over t = 1..T-1 of max_k |mu_t^k - mu_{t+1}^k|.
double total_variation(const MeanRewardPath& path);

inline constexpr double kBudgetTolerance = 1e-9;

bool check_budget(const MeanRewardPath& path, double budget);

// Two arms, mu^1_t = 1/2 + 1/2 sin(V pi t / T) and mu^2_t in antiphase.
// Under kStrict, throws BudgetViolationError when the path's variation
// exceeds V_T.
BanditInstance sinusoidal_instance(int horizon, double budget,
                                   BudgetRange range = BudgetRange::kStrict);

// The sinusoid at three times the frequency over epochs with 3t < T, then
// arm 1 fixed at 0 and arm 2 at 1. Under kStrict, throws
// BudgetViolationError when the path's variation exceeds V_T.
BanditInstance compressed_instance(int horizon, double budget,
                                   BudgetRange range = BudgetRange::kStrict);

// Batch length ceil(K^{1/3} (T / V)^{2/3}) of the lower-bound family.
int worst_case_batch_size(int horizon, int num_arms, double budget);
// Gap min{1/4, V * batch / T} of the good arm.
double worst_case_gap(int horizon, double budget, int batch);

// Partition 1..T into batches of `batch_override` (default
// worst_case_batch_size) epochs; in each batch one arm drawn uniformly from
// `rng` has mean 1/2 + gap and the rest 1/2. One variate per batch.
BanditInstance worst_case_instance(int horizon, int num_arms, double budget,
                                   Stream& rng,
                                   std::optional<int> batch_override = {},
                                   BudgetRange range = BudgetRange::kStrict);

// Same construction drawn from Stream(seed); records `seed` as gen_seed.
BanditInstance worst_case_instance(int horizon, int num_arms, double budget,
                                   std::uint64_t seed,
                                   std::optional<int> batch_override = {},
                                   BudgetRange range = BudgetRange::kStrict);

// Wraps a caller-supplied path. Throws BudgetViolationError when the path's
// variation exceeds `budget`.
BanditInstance custom_instance(MeanRewardPath path, double budget);

struct OracleStep {
  double best_mean;
  int best_arm;  // lowest index on ties
};

std::vector<OracleStep> oracle_path(const MeanRewardPath& path);

// Bernoulli(mu_t^arm) reward from one uniform variate.
inline int sample_bernoulli(double mean, Stream& rng) {
  return rng.uniform() < mean ? 1 : 0;
}

// Throws IndexError unless 1 <= arm <= K and 1 <= t <= T.
int sample_reward(const BanditInstance& instance, int arm, int t, Stream& rng);

// CSV with header `t,mu_1,...,mu_K`, 17 significant digits.
void write_path_csv(std::ostream& out, const MeanRewardPath& path);

}  // namespace rexp3
