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

// Experiment configuration: one JSON document per experiment.
//
//   {
//     "name": "stage_one_sinusoidal",
//     "instance": {"kind": "sinusoidal"},          // worst_case also takes "K"
//     "budget": {"kind": "constant", "value": 3},  // or power: coefficient, beta
//     "horizons": [2000, 4000, 8000, 16000],
//     "policy": {"kind": "rexp3"},                 // optional delta_T, gamma
//     "replications": 1000,
//     "master_seed": 1,
//     "estimator": "mean_gap",
//     "output_dir": "out/stage_one",
//     "beta_grid": [0.0, 0.3],                     // sweep-beta only
//     "workers": 4,
//     "budget_range": "strict",                    // or "relaxed"
//     "trajectory": {"record": true, "stride": 0}
//   }

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rexp3/env.hpp"
#include "rexp3/sim.hpp"

namespace rexp3 {

struct ExperimentConfig {
  std::string name = "experiment";
  Generator instance_kind = Generator::kSinusoidal;
  int num_arms = 2;
  std::optional<int> worst_case_batch;
  BudgetSpec budget;
  std::vector<int> horizons;
  PolicySpec policy;
  std::int64_t replications = 1000;
  std::uint64_t master_seed = 0;
  Estimator estimator = Estimator::kMeanGap;
  std::string output_dir = "out";
  std::optional<std::vector<double>> beta_grid;
  std::optional<int> workers;
  // Unset means strict for `run` and relaxed for `sweep-beta`.
  std::optional<BudgetRange> budget_range;
  bool record_trajectory = true;
  int trajectory_stride = 0;

  bool operator==(const ExperimentConfig&) const = default;
};

enum class CommandMode { kRun, kSweepBeta };

// Throws ConfigError naming the offending field. Unknown keys are errors.
ExperimentConfig config_from_json(const nlohmann::json& document);
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

nlohmann::json config_to_json(const ExperimentConfig& config);
std::string serialize_config(const ExperimentConfig& config);

BudgetRange effective_range(const ExperimentConfig& config, CommandMode mode);

// Checks everything mode-specific: horizons, budget admissibility per T,
// beta grid presence and range, policy overrides. Throws ConfigError.
void validate_config(const ExperimentConfig& config, CommandMode mode);

// V_T at horizon T, with `beta` replacing the budget exponent when given.
double resolve_budget(const ExperimentConfig& config, int horizon,
                      std::optional<double> beta = {});

// Plan for one horizon of the grid.
ReplicationPlan make_plan(const ExperimentConfig& config, int horizon,
                          double budget, BudgetRange range);

}  // namespace rexp3
