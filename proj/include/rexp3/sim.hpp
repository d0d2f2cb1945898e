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

// Episodes of a policy against a bandit instance, replicated over derived
// random streams and aggregated into regret curves against the dynamic
// oracle.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rexp3/env.hpp"
#include "rexp3/policy.hpp"
#include "rexp3/rng.hpp"

namespace rexp3 {

// kMeanGap sums mu*_t - mu_t^{arm_t}; kRealized sums X_t^{k*_t} - X_t^{arm_t}.
enum class Estimator { kMeanGap, kRealized };

std::string to_string(Estimator estimator);
Estimator estimator_from_string(const std::string& name);

// Per-epoch trajectories of one episode; element t - 1 refers to epoch t.
struct EpisodeResult {
  std::vector<int> chosen_arms;
  std::vector<int> realized_rewards;
  std::vector<double> cum_policy_mean_reward;
  std::vector<double> cum_oracle_mean_reward;
  std::vector<double> cum_regret_mean_gap;  // oracle minus policy, as stored
  std::vector<double> cum_regret_realized;
};

// Plays epochs 1..T. Each epoch consumes exactly three variates from
// `rng`, in order: the policy's selection, the chosen arm's reward, and a
// reward draw for the oracle arm (used by the realized estimator only when
// the oracle arm differs from the chosen one). `policy` must be freshly
// reset.
EpisodeResult run_episode(const BanditInstance& instance, Policy& policy,
                          Stream& rng);

struct InstanceSpec {
  Generator kind = Generator::kSinusoidal;
  int horizon = 1;
  int num_arms = 2;
  double budget = 1.0;
  BudgetRange range = BudgetRange::kStrict;
  std::optional<int> worst_case_batch;
  // Required for Generator::kCustom, ignored otherwise.
  std::shared_ptr<const BanditInstance> custom;
};

// Builds the instance. Only kWorstCase draws from `rng`.
BanditInstance build_instance(const InstanceSpec& spec, Stream& rng);

struct PolicySpec {
  PolicyKind kind = PolicyKind::kRexp3;
  std::optional<int> batch_size;
  std::optional<double> gamma;

  bool operator==(const PolicySpec&) const = default;
};

Rexp3Config policy_config(const InstanceSpec& instance,
                          const PolicySpec& policy);

struct ReplicationPlan {
  InstanceSpec instance;
  PolicySpec policy;
  std::int64_t replications = 1;
  std::uint64_t master_seed = 0;
  Estimator estimator = Estimator::kMeanGap;
  bool record_trajectory = true;
  int trajectory_stride = 0;  // 0 picks max(1, T / 1000)
};

struct ExecutionOptions {
  int workers = 1;
};

struct RegretCurve {
  std::vector<int> epochs;
  std::vector<double> mean_cum_regret;
  std::vector<double> std_err;
  std::vector<double> mean_cum_policy_reward;
  std::vector<double> mean_cum_oracle_reward;
  std::int64_t replications = 0;
  double final_regret = 0.0;
  double final_regret_stderr = 0.0;

  Estimator estimator = Estimator::kMeanGap;
  // Both estimators at epoch T, whichever one the curve reports.
  double final_mean_gap = 0.0;
  double final_mean_gap_stderr = 0.0;
  double final_realized = 0.0;
  double final_realized_stderr = 0.0;

  int horizon = 0;
  int num_arms = 0;
  double budget = 0.0;
  std::string policy;
  Tuning tuning{1, 1.0};

  bool operator==(const RegretCurve&) const = default;
};

// Epochs at which curves are sampled: multiples of the stride, plus T.
// Only T when `record_trajectory` is false.
std::vector<int> sampled_epochs(int horizon, bool record_trajectory,
                                int stride);

// Runs R episodes; episode i uses derive(master_seed, i) for everything,
// including the fresh draw of a worst-case instance. Replications are
// reduced in fixed blocks with pairwise merges keyed by replication index,
// so the result is bitwise independent of `options.workers`.
RegretCurve replicate(const ReplicationPlan& plan,
                      const ExecutionOptions& options = {});

struct SweepPoint {
  int horizon;
  double budget;
  RegretCurve curve;
};

class SweepError : public std::runtime_error {
 public:
  SweepError(std::size_t index, const std::string& message)
      : std::runtime_error(message), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Replicates every plan, returning results in grid order. Throws
// std::invalid_argument on an empty grid and SweepError naming the first
// failing point.
std::vector<SweepPoint> sweep(std::span<const ReplicationPlan> plans,
                              const ExecutionOptions& options = {});

}  // namespace rexp3
