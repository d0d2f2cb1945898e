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

#include "rexp3/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rexp3/error.hpp"

namespace rexp3 {

int batch_size(int horizon, int num_arms, double budget) {
  const double k = static_cast<double>(num_arms);
  const double raw = std::cbrt(k * std::log(k)) *
                     std::pow(horizon / budget, 2.0 / 3.0);
  const double rounded = std::ceil(raw);
  if (rounded >= horizon) return horizon;
  return std::max(1, static_cast<int>(rounded));
}

double exp3_gamma(int num_arms, int batch) {
  const double k = static_cast<double>(num_arms);
  const double ratio = k * std::log(k) / ((std::numbers::e - 1.0) * batch);
  return std::min(1.0, std::sqrt(ratio));
}

Exp3::Exp3(int num_arms, double gamma)
    : gamma_(gamma),
      log_weights_(static_cast<std::size_t>(num_arms), 0.0),
      probs_(static_cast<std::size_t>(num_arms), 0.0) {
  if (num_arms < 2) throw std::invalid_argument("Exp3 needs K >= 2");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("Exp3 gamma must lie in (0, 1]");
  }
}

void Exp3::mixing_probabilities(std::span<const double> log_weights,
                                double gamma, std::span<double> out) {
  const std::size_t K = log_weights.size();
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    out[k] = std::exp(log_weights[k] - top);
    total += out[k];
  }
  const double floor = gamma / static_cast<double>(K);
  const double scale = (1.0 - gamma) / total;
  for (std::size_t k = 0; k < K; ++k) out[k] = out[k] * scale + floor;
}

std::vector<double> Exp3::current_probabilities() const {
  std::vector<double> p(log_weights_.size());
  mixing_probabilities(log_weights_, gamma_, p);
  return p;
}

int Exp3::select_with_uniform(double u) {
  mixing_probabilities(log_weights_, gamma_, probs_);
  probs_valid_ = true;
  const int K = num_arms();
  double cumulative = 0.0;
  for (int k = 0; k < K - 1; ++k) {
    cumulative += probs_[k];
    if (u < cumulative) return k + 1;
  }
  return K;
}

void Exp3::update(int chosen, double reward) {
  if (!probs_valid_) {
    throw PolicyError("Exp3 update without a preceding select");
  }
  if (chosen < 1 || chosen > num_arms()) {
    throw IndexError("Exp3 update for arm " + std::to_string(chosen));
  }
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw std::invalid_argument("Exp3 reward outside [0, 1]");
  }
  probs_valid_ = false;
  if (reward == 0.0) return;
  const double estimate = reward / probs_[chosen - 1];
  log_weights_[chosen - 1] += gamma_ * estimate / num_arms();
  const double top =
      *std::max_element(log_weights_.begin(), log_weights_.end());
  for (double& w : log_weights_) w -= top;
}

void Exp3::reset() {
  std::fill(log_weights_.begin(), log_weights_.end(), 0.0);
  probs_valid_ = false;
}

Tuning resolve_tuning(const Rexp3Config& config) {
  if (config.num_arms < 2) throw std::invalid_argument("Rexp3 needs K >= 2");
  if (config.horizon < 1) throw std::invalid_argument("Rexp3 needs T >= 1");
  if (!(config.budget > 0.0)) {
    throw std::invalid_argument("Rexp3 needs a positive budget V_T");
  }
  Tuning tuning{};
  if (config.batch_size) {
    if (*config.batch_size < 1) {
      throw std::invalid_argument("batch size override must be >= 1");
    }
    tuning.batch_size = *config.batch_size;
  } else {
    tuning.batch_size =
        batch_size(config.horizon, config.num_arms, config.budget);
  }
  if (config.gamma) {
    if (!(*config.gamma > 0.0 && *config.gamma <= 1.0)) {
      throw std::invalid_argument("gamma override must lie in (0, 1]");
    }
    tuning.gamma = *config.gamma;
  } else {
    tuning.gamma = exp3_gamma(config.num_arms, tuning.batch_size);
  }
  return tuning;
}

Rexp3Policy::Rexp3Policy(const Rexp3Config& config)
    : horizon_(config.horizon),
      tuning_(resolve_tuning(config)),
      exp3_(config.num_arms, tuning_.gamma) {}

int Rexp3Policy::select_with_uniform(int t, double u) {
  if (t != next_epoch_ || pending_arm_ != 0) {
    throw PolicyError("Rexp3 expected select at epoch " +
                      std::to_string(next_epoch_) + ", got " +
                      std::to_string(t) +
                      (pending_arm_ != 0 ? " before observe" : ""));
  }
  if (t > horizon_) {
    throw PolicyError("Rexp3 epoch " + std::to_string(t) +
                      " beyond horizon " + std::to_string(horizon_));
  }
  if ((t - 1) % tuning_.batch_size == 0) {
    exp3_.reset();
    ++restarts_;
  }
  pending_arm_ = exp3_.select_with_uniform(u);
  return pending_arm_;
}

void Rexp3Policy::observe(int t, int arm, double reward) {
  if (pending_arm_ == 0 || t != next_epoch_ || arm != pending_arm_) {
    throw PolicyError("Rexp3 observe for (epoch " + std::to_string(t) +
                      ", arm " + std::to_string(arm) +
                      ") does not match the pending selection");
  }
  exp3_.update(arm, reward);
  pending_arm_ = 0;
  ++next_epoch_;
}

void Rexp3Policy::reset() {
  exp3_.reset();
  next_epoch_ = 1;
  pending_arm_ = 0;
  restarts_ = 0;
}

UniformRandomPolicy::UniformRandomPolicy(int num_arms) : num_arms_(num_arms) {
  if (num_arms < 2) throw std::invalid_argument("uniform policy needs K >= 2");
}

int UniformRandomPolicy::select_arm(int /*t*/, Stream& rng) {
  return std::min(num_arms_,
                  1 + static_cast<int>(rng.uniform() * num_arms_));
}

void UniformRandomPolicy::observe(int /*t*/, int arm, double /*reward*/) {
  if (arm < 1 || arm > num_arms_) {
    throw IndexError("uniform policy observe for arm " + std::to_string(arm));
  }
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kRexp3: return "rexp3";
    case PolicyKind::kExp3NoRestart: return "exp3_norestart";
    case PolicyKind::kUniformRandom: return "uniform_random";
  }
  return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "rexp3") return PolicyKind::kRexp3;
  if (name == "exp3_norestart") return PolicyKind::kExp3NoRestart;
  if (name == "uniform_random") return PolicyKind::kUniformRandom;
  throw std::invalid_argument("unknown policy kind '" + name + "'");
}

Tuning resolve_tuning(PolicyKind kind, const Rexp3Config& config) {
  switch (kind) {
    case PolicyKind::kRexp3:
      return resolve_tuning(config);
    case PolicyKind::kExp3NoRestart: {
      Rexp3Config single = config;
      single.batch_size = config.horizon;
      return resolve_tuning(single);
    }
    case PolicyKind::kUniformRandom:
      if (config.num_arms < 2) {
        throw std::invalid_argument("uniform policy needs K >= 2");
      }
      return {std::max(1, config.horizon), 1.0};
  }
  throw std::invalid_argument("unknown policy kind");
}

std::unique_ptr<Policy> make_policy(PolicyKind kind,
                                    const Rexp3Config& config) {
  switch (kind) {
    case PolicyKind::kRexp3:
      return std::make_unique<Rexp3Policy>(config);
    case PolicyKind::kExp3NoRestart: {
      Rexp3Config single = config;
      single.batch_size = config.horizon;
      return std::make_unique<Rexp3Policy>(single);
    }
    case PolicyKind::kUniformRandom:
      return std::make_unique<UniformRandomPolicy>(config.num_arms);
  }
  throw std::invalid_argument("unknown policy kind");
}

}  // namespace rexp3
