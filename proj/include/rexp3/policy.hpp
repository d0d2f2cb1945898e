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

// Exp3 and its restarting wrapper Rexp3, plus baselines, behind one
// sequential decision interface. Arms and epochs are 1-based.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rexp3/rng.hpp"

namespace rexp3 {

// Restart period ceil((K ln K)^{1/3} (T / V)^{2/3}), capped at T.
int batch_size(int horizon, int num_arms, double budget);

// Exploration rate min{1, sqrt(K ln K / ((e - 1) batch))}.
double exp3_gamma(int num_arms, int batch);

// Exponential weights with uniform mixing. Weights are kept as log-weights
// whose maximum is re-centered to 0 after every update, so they stay finite
// over arbitrarily long batches.
class Exp3 {
 public:
  Exp3(int num_arms, double gamma);

  // Computes p^k = (1 - gamma) w^k / sum w + gamma / K, caches it and draws
  // one arm by inverse CDF over k = 1..K using the single variate `u`.
  int select_with_uniform(double u);
  int select(Stream& rng) { return select_with_uniform(rng.uniform()); }

  // Adds gamma * (reward / p^chosen) / K to the chosen log-weight. Requires
  // the probabilities cached by the matching select; throws PolicyError
  // otherwise, and std::invalid_argument for a reward outside [0, 1].
  void update(int chosen, double reward);

  void reset();

  int num_arms() const { return static_cast<int>(log_weights_.size()); }
  double gamma() const { return gamma_; }
  std::span<const double> log_weights() const { return log_weights_; }
  // Probabilities from the last select (stale after update).
  std::span<const double> probabilities() const { return probs_; }
  bool probabilities_valid() const { return probs_valid_; }
  // Mixing probabilities for the current weights, without caching.
  std::vector<double> current_probabilities() const;

  // (1 - gamma) softmax(log_weights) + gamma / K, written into `out`.
  static void mixing_probabilities(std::span<const double> log_weights,
                                   double gamma, std::span<double> out);

 private:
  double gamma_;
  std::vector<double> log_weights_;
  std::vector<double> probs_;
  bool probs_valid_ = false;
};

// Sequential decision protocol. For each epoch t = 1, 2, ... the caller
// invokes select_arm(t, rng) and then observe(t, arm, reward). A policy may
// only use rewards from epochs before t when choosing at t.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual int select_arm(int t, Stream& rng) = 0;
  virtual void observe(int t, int arm, double reward) = 0;
  virtual void reset() = 0;

  virtual int num_arms() const = 0;
  virtual std::string name() const = 0;
};

struct Rexp3Config {
  int horizon = 1;
  int num_arms = 2;
  double budget = 1.0;
  std::optional<int> batch_size;  // overrides the tuned restart period
  std::optional<double> gamma;    // overrides the tuned exploration rate
};

struct Tuning {
  int batch_size;
  double gamma;

  bool operator==(const Tuning&) const = default;
};

// Resolves the restart period and exploration rate, applying overrides.
// Throws std::invalid_argument for K < 2, T < 1, V <= 0, a batch override
// below 1 or a gamma override outside (0, 1].
Tuning resolve_tuning(const Rexp3Config& config);

class Rexp3Policy final : public Policy {
 public:
  explicit Rexp3Policy(const Rexp3Config& config);

  // Restarts (all log-weights to 0) before epoch t whenever
  // (t - 1) mod batch == 0. Epochs must arrive as 1, 2, ..., T with one
  // observe between selects; anything else throws PolicyError.
  int select_arm(int t, Stream& rng) override {
    return select_with_uniform(t, rng.uniform());
  }
  int select_with_uniform(int t, double u);
  void observe(int t, int arm, double reward) override;
  void reset() override;

  int num_arms() const override { return exp3_.num_arms(); }
  std::string name() const override { return "rexp3"; }

  const Tuning& tuning() const { return tuning_; }
  const Exp3& exp3() const { return exp3_; }
  int restarts() const { return restarts_; }

 private:
  int horizon_;
  Tuning tuning_;
  Exp3 exp3_;
  int next_epoch_ = 1;
  int pending_arm_ = 0;  // 0 when no select awaits its observe
  int restarts_ = 0;
};

// Picks each arm with probability 1/K from one variate per epoch.
class UniformRandomPolicy final : public Policy {
 public:
  explicit UniformRandomPolicy(int num_arms);

  int select_arm(int t, Stream& rng) override;
  void observe(int t, int arm, double reward) override;
  void reset() override {}

  int num_arms() const override { return num_arms_; }
  std::string name() const override { return "uniform_random"; }

 private:
  int num_arms_;
};

enum class PolicyKind { kRexp3, kExp3NoRestart, kUniformRandom };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

// Tuning actually used by `kind`: exp3_norestart is rexp3 with the batch
// forced to T; uniform_random reports batch T and gamma 1.
Tuning resolve_tuning(PolicyKind kind, const Rexp3Config& config);

std::unique_ptr<Policy> make_policy(PolicyKind kind,
                                    const Rexp3Config& config);

}  // namespace rexp3
