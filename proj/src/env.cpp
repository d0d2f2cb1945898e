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

#include "rexp3/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "rexp3/error.hpp"
#include "rexp3/io.hpp"

namespace rexp3 {

namespace {

// sin(pi x) and cos(pi x) with exact zeros and unit values at integer and
// half-integer x. Plain std::sin(pi * x) leaves residues around 1e-16 there,
// which would turn exact ties between arms into arbitrary winners.
double sinpi(double x) {
  double r = std::fmod(std::fabs(x), 2.0);
  double sign = x < 0 ? -1.0 : 1.0;
  if (r >= 1.0) {
    r -= 1.0;
    sign = -sign;
  }
  double v;
  if (r <= 0.25) {
    v = std::sin(std::numbers::pi * r);
  } else if (r < 0.75) {
    v = std::cos(std::numbers::pi * (0.5 - r));
  } else {
    v = std::sin(std::numbers::pi * (1.0 - r));
  }
  return sign * v;
}

double cospi(double x) {
  double r = std::fmod(std::fabs(x), 2.0);
  double sign = 1.0;
  if (r >= 1.0) {
    r -= 1.0;
    sign = -1.0;
  }
  double v;
  if (r <= 0.25) {
    v = std::cos(std::numbers::pi * r);
  } else if (r < 0.75) {
    v = std::sin(std::numbers::pi * (0.5 - r));
  } else {
    v = -std::cos(std::numbers::pi * (1.0 - r));
  }
  return sign * v;
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

void require_budget(const BanditInstance& instance, const char* what) {
  const double tv = total_variation(instance.path);
  if (!(tv <= instance.budget + kBudgetTolerance)) {
    throw BudgetViolationError(std::string(what) + ": total variation " +
                               io::format_double(tv) + " exceeds budget " +
                               io::format_double(instance.budget));
  }
}

}  // namespace

MeanRewardPath::MeanRewardPath(int num_arms, int horizon,
                               std::vector<double> means)
    : num_arms_(num_arms), horizon_(horizon), means_(std::move(means)) {
  if (num_arms_ < 2) throw std::invalid_argument("path needs K >= 2 arms");
  if (horizon_ < 1) throw std::invalid_argument("path needs T >= 1 epochs");
  if (means_.size() != static_cast<std::size_t>(num_arms_) * horizon_) {
    throw std::invalid_argument("path storage does not have K*T entries");
  }
  for (double m : means_) {
    if (!(m >= 0.0 && m <= 1.0)) {
      throw std::invalid_argument("mean reward outside [0, 1]: " +
                                  io::format_double(m));
    }
  }
}

MeanRewardPath MeanRewardPath::from_function(
    int num_arms, int horizon,
    const std::function<double(int, int)>& mean) {
  if (num_arms < 2 || horizon < 1) {
    throw std::invalid_argument("path needs K >= 2 and T >= 1");
  }
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(num_arms) * horizon);
  for (int k = 1; k <= num_arms; ++k) {
    for (int t = 1; t <= horizon; ++t) means.push_back(mean(k, t));
  }
  return MeanRewardPath(num_arms, horizon, std::move(means));
}

double MeanRewardPath::at(int arm, int t) const {
  if (arm < 1 || arm > num_arms_ || t < 1 || t > horizon_) {
    throw IndexError("(arm " + std::to_string(arm) + ", epoch " +
                     std::to_string(t) + ") outside " +
                     std::to_string(num_arms_) + "x" +
                     std::to_string(horizon_) + " path");
  }
  return mean(arm, t);
}

std::span<const double> MeanRewardPath::arm_means(int arm) const {
  if (arm < 1 || arm > num_arms_) {
    throw IndexError("arm " + std::to_string(arm) + " out of range");
  }
  return {means_.data() + static_cast<std::size_t>(arm - 1) * horizon_,
          static_cast<std::size_t>(horizon_)};
}

std::string to_string(Generator generator) {
  switch (generator) {
    case Generator::kSinusoidal: return "sinusoidal";
    case Generator::kCompressed: return "compressed";
    case Generator::kWorstCase: return "worst_case";
    case Generator::kCustom: return "custom";
  }
  return "unknown";
}

Generator generator_from_string(const std::string& name) {
  if (name == "sinusoidal") return Generator::kSinusoidal;
  if (name == "compressed") return Generator::kCompressed;
  if (name == "worst_case") return Generator::kWorstCase;
  if (name == "custom") return Generator::kCustom;
  throw std::invalid_argument("unknown instance kind '" + name + "'");
}

void check_budget_range(int horizon, int num_arms, double budget,
                        BudgetRange range) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw BudgetRangeError("budget V_T must be positive and finite, got " +
                           io::format_double(budget));
  }
  if (range == BudgetRange::kRelaxed) return;
  const double lo = 1.0 / num_arms;
  const double hi = static_cast<double>(horizon) / num_arms;
  if (budget < lo || budget > hi) {
    throw BudgetRangeError("budget V_T = " + io::format_double(budget) +
                           " outside [1/K, T/K] = [" + io::format_double(lo) +
                           ", " + io::format_double(hi) + "]");
  }
}

BudgetSpec BudgetSpec::constant(double v) {
  BudgetSpec spec;
  spec.kind = Kind::kConstant;
  spec.value = v;
  return spec;
}

BudgetSpec BudgetSpec::power(double c, double beta) {
  BudgetSpec spec;
  spec.kind = Kind::kPower;
  spec.coefficient = c;
  spec.exponent = beta;
  return spec;
}

void BudgetSpec::validate() const {
  if (kind == Kind::kConstant) {
    if (!(value > 0.0)) throw std::invalid_argument("budget must be positive");
    return;
  }
  if (!(coefficient > 0.0)) {
    throw std::invalid_argument("budget coefficient must be positive");
  }
  if (!(exponent >= 0.0 && exponent < 1.0)) {
    throw std::invalid_argument("budget exponent beta must lie in [0, 1)");
  }
}

double BudgetSpec::resolve(int horizon) const {
  if (kind == Kind::kConstant) return value;
  return coefficient * std::pow(static_cast<double>(horizon), exponent);
}

double total_variation(const MeanRewardPath& path) {
  const int K = path.num_arms();
  const int T = path.horizon();
  double total = 0.0;
  for (int t = 1; t < T; ++t) {
    double step = 0.0;
    for (int k = 1; k <= K; ++k) {
      step = std::max(step, std::fabs(path.mean(k, t) - path.mean(k, t + 1)));
    }
    total += step;
  }
  return total;
}

bool check_budget(const MeanRewardPath& path, double budget) {
  return total_variation(path) <= budget + kBudgetTolerance;
}

BanditInstance sinusoidal_instance(int horizon, double budget,
                                   BudgetRange range) {
  if (horizon < 1) throw std::invalid_argument("sinusoidal needs T >= 1");
  check_budget_range(horizon, 2, budget, range);
  std::vector<double> means(2 * static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) {
    // sin(x + pi) = -sin(x), so the second arm mirrors the first exactly.
    const double s = sinpi(budget * t / horizon);
    means[t - 1] = clamp_unit(0.5 + 0.5 * s);
    means[horizon + t - 1] = clamp_unit(0.5 - 0.5 * s);
  }
  BanditInstance instance{
      MeanRewardPath(2, horizon, std::move(means)), RewardLaw::kBernoulli,
      budget, Generator::kSinusoidal, 0};
  if (range == BudgetRange::kStrict) {
    require_budget(instance, "sinusoidal instance");
  }
  return instance;
}

BanditInstance compressed_instance(int horizon, double budget,
                                   BudgetRange range) {
  if (horizon < 3) throw std::invalid_argument("compressed needs T >= 3");
  check_budget_range(horizon, 2, budget, range);
  std::vector<double> means(2 * static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) {
    if (3LL * t < horizon) {
      // sin(x + pi/2) = cos(x) and sin(x - pi/2) = -cos(x).
      const double c = cospi(3.0 * budget * t / horizon);
      means[t - 1] = clamp_unit(0.5 + 0.5 * c);
      means[horizon + t - 1] = clamp_unit(0.5 - 0.5 * c);
    } else {
      means[t - 1] = 0.0;
      means[horizon + t - 1] = 1.0;
    }
  }
  BanditInstance instance{
      MeanRewardPath(2, horizon, std::move(means)), RewardLaw::kBernoulli,
      budget, Generator::kCompressed, 0};
  if (range == BudgetRange::kStrict) {
    require_budget(instance, "compressed instance");
  }
  return instance;
}

int worst_case_batch_size(int horizon, int num_arms, double budget) {
  const double raw = std::cbrt(static_cast<double>(num_arms)) *
                     std::pow(horizon / budget, 2.0 / 3.0);
  return std::max(1, static_cast<int>(std::ceil(raw)));
}

double worst_case_gap(int horizon, double budget, int batch) {
  return std::min(0.25, budget * batch / horizon);
}

BanditInstance worst_case_instance(int horizon, int num_arms, double budget,
                                   Stream& rng,
                                   std::optional<int> batch_override,
                                   BudgetRange range) {
  if (num_arms < 2) throw std::invalid_argument("worst case needs K >= 2");
  if (horizon < 1) throw std::invalid_argument("worst case needs T >= 1");
  check_budget_range(horizon, num_arms, budget, range);
  const int batch = batch_override.value_or(
      worst_case_batch_size(horizon, num_arms, budget));
  if (batch < 1) throw std::invalid_argument("batch override must be >= 1");
  const double gap = worst_case_gap(horizon, budget, batch);

  std::vector<double> means(static_cast<std::size_t>(num_arms) * horizon, 0.5);
  for (int start = 1; start <= horizon; start += batch) {
    const int stop = std::min(horizon, start + batch - 1);
    const int good = std::min(
        num_arms, 1 + static_cast<int>(rng.uniform() * num_arms));
    double* row = means.data() + static_cast<std::size_t>(good - 1) * horizon;
    std::fill(row + (start - 1), row + stop, 0.5 + gap);
  }
  BanditInstance instance{
      MeanRewardPath(num_arms, horizon, std::move(means)),
      RewardLaw::kBernoulli, budget, Generator::kWorstCase, 0};
  require_budget(instance, "worst-case instance");
  return instance;
}

BanditInstance worst_case_instance(int horizon, int num_arms, double budget,
                                   std::uint64_t seed,
                                   std::optional<int> batch_override,
                                   BudgetRange range) {
  Stream rng(seed);
  BanditInstance instance = worst_case_instance(horizon, num_arms, budget, rng,
                                                batch_override, range);
  instance.gen_seed = seed;
  return instance;
}

BanditInstance custom_instance(MeanRewardPath path, double budget) {
  BanditInstance instance{std::move(path), RewardLaw::kBernoulli, budget,
                          Generator::kCustom, 0};
  require_budget(instance, "custom instance");
  return instance;
}

std::vector<OracleStep> oracle_path(const MeanRewardPath& path) {
  std::vector<OracleStep> steps;
  steps.reserve(path.horizon());
  for (int t = 1; t <= path.horizon(); ++t) {
    OracleStep best{path.mean(1, t), 1};
    for (int k = 2; k <= path.num_arms(); ++k) {
      if (path.mean(k, t) > best.best_mean) best = {path.mean(k, t), k};
    }
    steps.push_back(best);
  }
  return steps;
}

int sample_reward(const BanditInstance& instance, int arm, int t,
                  Stream& rng) {
  return sample_bernoulli(instance.path.at(arm, t), rng);
}

void write_path_csv(std::ostream& out, const MeanRewardPath& path) {
  out << 't';
  for (int k = 1; k <= path.num_arms(); ++k) out << ",mu_" << k;
  out << '\n';
  for (int t = 1; t <= path.horizon(); ++t) {
    out << t;
    for (int k = 1; k <= path.num_arms(); ++k) {
      out << ',' << io::format_double(path.mean(k, t));
    }
    out << '\n';
  }
}

}  // namespace rexp3
