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

#include "rexp3/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rexp3/error.hpp"

namespace rexp3 {

namespace {

// Every epoch draws select, reward, oracle reward in this order.
template <typename OnEpoch>
void play(const BanditInstance& instance,
          const std::vector<OracleStep>& oracle, Policy& policy, Stream& rng,
          OnEpoch&& on_epoch) {
  const MeanRewardPath& path = instance.path;
  const int K = path.num_arms();
  const int T = path.horizon();
  for (int t = 1; t <= T; ++t) {
    const int arm = policy.select_arm(t, rng);
    if (arm < 1 || arm > K) {
      throw IndexError(policy.name() + " selected arm " + std::to_string(arm) +
                       " at epoch " + std::to_string(t));
    }
    const double mean = path.mean(arm, t);
    const int reward = sample_bernoulli(mean, rng);
    const OracleStep& best = oracle[t - 1];
    const int oracle_draw = sample_bernoulli(best.best_mean, rng);
    const int oracle_reward = arm == best.best_arm ? reward : oracle_draw;
    policy.observe(t, arm, reward);
    on_epoch(t, arm, reward, mean, best.best_mean, oracle_reward);
  }
}

// Count, mean and sum of squared deviations.
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }

  static Moments merge(const Moments& a, const Moments& b) {
    if (a.n == 0.0) return b;
    if (b.n == 0.0) return a;
    Moments out;
    out.n = a.n + b.n;
    const double delta = b.mean - a.mean;
    out.mean = a.mean + delta * (b.n / out.n);
    out.m2 = a.m2 + b.m2 + delta * delta * (a.n * b.n / out.n);
    return out;
  }

  double std_err() const {
    if (n < 2.0) return 0.0;
    return std::sqrt(m2 / (n - 1.0)) / std::sqrt(n);
  }
};

enum Field { kMeanGap = 0, kRealized, kPolicyReward, kOracleReward, kFields };

// One Moments per (sampled epoch, field).
using Accumulator = std::vector<Moments>;

Accumulator merge_range(std::vector<Accumulator>& blocks, std::size_t lo,
                        std::size_t hi) {
  if (hi - lo == 1) return std::move(blocks[lo]);
  const std::size_t mid = lo + (hi - lo) / 2;
  Accumulator left = merge_range(blocks, lo, mid);
  Accumulator right = merge_range(blocks, mid, hi);
  for (std::size_t i = 0; i < left.size(); ++i) {
    left[i] = Moments::merge(left[i], right[i]);
  }
  return left;
}

constexpr std::int64_t kBlockSize = 64;

}  // namespace

std::string to_string(Estimator estimator) {
  return estimator == Estimator::kMeanGap ? "mean_gap" : "realized";
}

Estimator estimator_from_string(const std::string& name) {
  if (name == "mean_gap") return Estimator::kMeanGap;
  if (name == "realized") return Estimator::kRealized;
  throw std::invalid_argument("unknown estimator '" + name + "'");
}

EpisodeResult run_episode(const BanditInstance& instance, Policy& policy,
                          Stream& rng) {
  const auto oracle = oracle_path(instance.path);
  const auto T = static_cast<std::size_t>(instance.horizon());
  EpisodeResult result;
  result.chosen_arms.reserve(T);
  result.realized_rewards.reserve(T);
  result.cum_policy_mean_reward.reserve(T);
  result.cum_oracle_mean_reward.reserve(T);
  result.cum_regret_mean_gap.reserve(T);
  result.cum_regret_realized.reserve(T);

  double policy_sum = 0.0;
  double oracle_sum = 0.0;
  double realized = 0.0;
  play(instance, oracle, policy, rng,
       [&](int, int arm, int reward, double mean, double best_mean,
           int oracle_reward) {
         policy_sum += mean;
         oracle_sum += best_mean;
         realized += oracle_reward - reward;
         result.chosen_arms.push_back(arm);
         result.realized_rewards.push_back(reward);
         result.cum_policy_mean_reward.push_back(policy_sum);
         result.cum_oracle_mean_reward.push_back(oracle_sum);
         result.cum_regret_mean_gap.push_back(oracle_sum - policy_sum);
         result.cum_regret_realized.push_back(realized);
       });
  return result;
}

BanditInstance build_instance(const InstanceSpec& spec, Stream& rng) {
  switch (spec.kind) {
    case Generator::kSinusoidal:
      return sinusoidal_instance(spec.horizon, spec.budget, spec.range);
    case Generator::kCompressed:
      return compressed_instance(spec.horizon, spec.budget, spec.range);
    case Generator::kWorstCase:
      return worst_case_instance(spec.horizon, spec.num_arms, spec.budget, rng,
                                 spec.worst_case_batch, spec.range);
    case Generator::kCustom:
      if (!spec.custom) {
        throw std::invalid_argument("custom instance spec without a path");
      }
      return *spec.custom;
  }
  throw std::invalid_argument("unknown instance kind");
}

Rexp3Config policy_config(const InstanceSpec& instance,
                          const PolicySpec& policy) {
  Rexp3Config config;
  config.horizon = instance.horizon;
  config.num_arms = instance.num_arms;
  config.budget = instance.budget;
  if (instance.kind == Generator::kSinusoidal ||
      instance.kind == Generator::kCompressed) {
    config.num_arms = 2;
  } else if (instance.kind == Generator::kCustom && instance.custom) {
    config.horizon = instance.custom->horizon();
    config.num_arms = instance.custom->num_arms();
  }
  config.batch_size = policy.batch_size;
  config.gamma = policy.gamma;
  return config;
}

std::vector<int> sampled_epochs(int horizon, bool record_trajectory,
                                int stride) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!record_trajectory) return {horizon};
  if (stride <= 0) stride = std::max(1, horizon / 1000);
  std::vector<int> epochs;
  epochs.reserve(static_cast<std::size_t>(horizon / stride) + 1);
  for (int t = stride; t <= horizon; t += stride) epochs.push_back(t);
  if (epochs.empty() || epochs.back() != horizon) epochs.push_back(horizon);
  return epochs;
}

RegretCurve replicate(const ReplicationPlan& plan,
                      const ExecutionOptions& options) {
  if (plan.replications < 1) {
    throw std::invalid_argument("replication count must be >= 1");
  }
  const Rexp3Config config = policy_config(plan.instance, plan.policy);
  const Tuning tuning = resolve_tuning(plan.policy.kind, config);

  // Deterministic generators are shared by all replications.
  std::shared_ptr<const BanditInstance> shared;
  std::shared_ptr<const std::vector<OracleStep>> shared_oracle;
  const bool redraw = plan.instance.kind == Generator::kWorstCase;
  if (!redraw) {
    Stream unused(0);
    shared = std::make_shared<const BanditInstance>(
        build_instance(plan.instance, unused));
    shared_oracle = std::make_shared<const std::vector<OracleStep>>(
        oracle_path(shared->path));
  }
  const int horizon = shared ? shared->horizon() : plan.instance.horizon;
  const int num_arms = shared ? shared->num_arms() : plan.instance.num_arms;

  const std::vector<int> epochs = sampled_epochs(
      horizon, plan.record_trajectory, plan.trajectory_stride);
  const std::size_t points = epochs.size();

  const std::int64_t R = plan.replications;
  const auto num_blocks =
      static_cast<std::size_t>((R + kBlockSize - 1) / kBlockSize);
  std::vector<Accumulator> blocks(num_blocks);

  auto run_block = [&](std::size_t b) {
    Accumulator acc(points * kFields);
    std::unique_ptr<Policy> policy = make_policy(plan.policy.kind, config);
    const std::int64_t first = static_cast<std::int64_t>(b) * kBlockSize;
    const std::int64_t last = std::min(R, first + kBlockSize);
    for (std::int64_t i = first; i < last; ++i) {
      Stream rng = derive(plan.master_seed, static_cast<std::uint64_t>(i));
      std::optional<BanditInstance> drawn;
      std::vector<OracleStep> drawn_oracle;
      if (redraw) {
        drawn.emplace(build_instance(plan.instance, rng));
        drawn_oracle = oracle_path(drawn->path);
      }
      const BanditInstance& instance = redraw ? *drawn : *shared;
      const auto& oracle = redraw ? drawn_oracle : *shared_oracle;

      policy->reset();
      double policy_sum = 0.0;
      double oracle_sum = 0.0;
      double realized = 0.0;
      std::size_t next = 0;
      play(instance, oracle, *policy, rng,
           [&](int t, int, int reward, double mean, double best_mean,
               int oracle_reward) {
             policy_sum += mean;
             oracle_sum += best_mean;
             realized += oracle_reward - reward;
             if (next < points && t == epochs[next]) {
               Moments* row = &acc[next * kFields];
               row[kMeanGap].add(oracle_sum - policy_sum);
               row[kRealized].add(realized);
               row[kPolicyReward].add(policy_sum);
               row[kOracleReward].add(oracle_sum);
               ++next;
             }
           });
    }
    blocks[b] = std::move(acc);
  };

  const int workers = static_cast<int>(std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(1, options.workers)), 1, num_blocks));
  if (workers == 1) {
    for (std::size_t b = 0; b < num_blocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next_block{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_block = num_blocks;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t b = next_block.fetch_add(1);
          if (b >= num_blocks) return;
          try {
            run_block(b);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            // Report the lowest failing block so errors are reproducible.
            if (b < error_block) {
              error_block = b;
              error = std::current_exception();
            }
          }
        }
      });
    }
    for (auto& thread : pool) thread.join();
    if (error) std::rethrow_exception(error);
  }

  const Accumulator total = merge_range(blocks, 0, num_blocks);
  const Field reported =
      plan.estimator == Estimator::kMeanGap ? kMeanGap : kRealized;

  RegretCurve curve;
  curve.epochs = epochs;
  curve.replications = R;
  curve.estimator = plan.estimator;
  curve.horizon = horizon;
  curve.num_arms = num_arms;
  curve.budget = plan.instance.budget;
  curve.policy = to_string(plan.policy.kind);
  curve.tuning = tuning;
  curve.mean_cum_regret.reserve(points);
  curve.std_err.reserve(points);
  curve.mean_cum_policy_reward.reserve(points);
  curve.mean_cum_oracle_reward.reserve(points);
  for (std::size_t j = 0; j < points; ++j) {
    const Moments* row = &total[j * kFields];
    curve.mean_cum_regret.push_back(row[reported].mean);
    curve.std_err.push_back(row[reported].std_err());
    curve.mean_cum_policy_reward.push_back(row[kPolicyReward].mean);
    curve.mean_cum_oracle_reward.push_back(row[kOracleReward].mean);
  }
  const Moments* last = &total[(points - 1) * kFields];
  curve.final_regret = curve.mean_cum_regret.back();
  curve.final_regret_stderr = curve.std_err.back();
  curve.final_mean_gap = last[kMeanGap].mean;
  curve.final_mean_gap_stderr = last[kMeanGap].std_err();
  curve.final_realized = last[kRealized].mean;
  curve.final_realized_stderr = last[kRealized].std_err();
  return curve;
}

std::vector<SweepPoint> sweep(std::span<const ReplicationPlan> plans,
                              const ExecutionOptions& options) {
  if (plans.empty()) throw std::invalid_argument("sweep over an empty grid");
  std::vector<SweepPoint> results;
  results.reserve(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const ReplicationPlan& plan = plans[i];
    try {
      RegretCurve curve = replicate(plan, options);
      const int horizon = curve.horizon;
      results.push_back({horizon, plan.instance.budget, std::move(curve)});
    } catch (const std::exception& e) {
      throw SweepError(i, "grid point " + std::to_string(i) + " (T=" +
                              std::to_string(plan.instance.horizon) +
                              ", V_T=" + std::to_string(plan.instance.budget) +
                              "): " + e.what());
    }
  }
  return results;
}

}  // namespace rexp3
