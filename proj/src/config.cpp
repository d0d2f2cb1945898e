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

#include "rexp3/config.hpp"

#include <limits>
#include <set>

#include "rexp3/error.hpp"
#include "rexp3/io.hpp"

namespace rexp3 {

using nlohmann::json;

namespace {

void reject_unknown(const json& object, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (const auto& item : object.items()) {
    if (!allowed.contains(item.key())) {
      throw ConfigError(where.empty() ? item.key() : where + "." + item.key(),
                        "unknown key");
    }
  }
}

const json& require(const json& object, const std::string& key,
                    const std::string& field) {
  if (!object.contains(key)) throw ConfigError(field, "missing");
  return object.at(key);
}

template <typename T>
T get_as(const json& value, const std::string& field) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, std::string("wrong type: ") + e.what());
  }
}

double get_number(const json& value, const std::string& field) {
  if (!value.is_number()) throw ConfigError(field, "expected a number");
  return value.get<double>();
}

int get_int(const json& value, const std::string& field) {
  if (!value.is_number_integer()) {
    throw ConfigError(field, "expected an integer");
  }
  const auto v = value.get<long long>();
  if (v < std::numeric_limits<int>::min() ||
      v > std::numeric_limits<int>::max()) {
    throw ConfigError(field, "integer out of range");
  }
  return static_cast<int>(v);
}

std::string range_name(BudgetRange range) {
  return range == BudgetRange::kStrict ? "strict" : "relaxed";
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");
  reject_unknown(doc, "",
                 {"name", "instance", "budget", "horizons", "policy",
                  "replications", "master_seed", "estimator", "output_dir",
                  "beta_grid", "workers", "budget_range", "trajectory"});
  ExperimentConfig config;

  if (doc.contains("name")) {
    config.name = get_as<std::string>(doc.at("name"), "name");
  }

  const json& instance = require(doc, "instance", "instance");
  if (!instance.is_object()) throw ConfigError("instance", "expected object");
  reject_unknown(instance, "instance", {"kind", "K", "batch_override"});
  try {
    config.instance_kind = generator_from_string(get_as<std::string>(
        require(instance, "kind", "instance.kind"), "instance.kind"));
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError("instance.kind", e.what());
  }
  if (instance.contains("K")) {
    config.num_arms = get_int(instance.at("K"), "instance.K");
  }
  if (instance.contains("batch_override")) {
    config.worst_case_batch =
        get_int(instance.at("batch_override"), "instance.batch_override");
  }

  const json& budget = require(doc, "budget", "budget");
  if (!budget.is_object()) throw ConfigError("budget", "expected object");
  const auto kind = get_as<std::string>(
      require(budget, "kind", "budget.kind"), "budget.kind");
  if (kind == "constant") {
    reject_unknown(budget, "budget", {"kind", "value"});
    config.budget = BudgetSpec::constant(
        get_number(require(budget, "value", "budget.value"), "budget.value"));
  } else if (kind == "power") {
    reject_unknown(budget, "budget", {"kind", "coefficient", "beta"});
    const double c =
        get_number(require(budget, "coefficient", "budget.coefficient"),
                   "budget.coefficient");
    const double beta = budget.contains("beta")
                            ? get_number(budget.at("beta"), "budget.beta")
                            : 0.0;
    config.budget = BudgetSpec::power(c, beta);
  } else {
    throw ConfigError("budget.kind", "expected 'constant' or 'power'");
  }

  const json& horizons = require(doc, "horizons", "horizons");
  if (!horizons.is_array()) throw ConfigError("horizons", "expected array");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    config.horizons.push_back(
        get_int(horizons[i], "horizons[" + std::to_string(i) + "]"));
  }

  if (doc.contains("policy")) {
    const json& policy = doc.at("policy");
    if (!policy.is_object()) throw ConfigError("policy", "expected object");
    reject_unknown(policy, "policy", {"kind", "delta_T", "gamma"});
    if (policy.contains("kind")) {
      try {
        config.policy.kind = policy_kind_from_string(
            get_as<std::string>(policy.at("kind"), "policy.kind"));
      } catch (const std::invalid_argument& e) {
        if (dynamic_cast<const ConfigError*>(&e)) throw;
        throw ConfigError("policy.kind", e.what());
      }
    }
    if (policy.contains("delta_T") && !policy.at("delta_T").is_null()) {
      config.policy.batch_size =
          get_int(policy.at("delta_T"), "policy.delta_T");
    }
    if (policy.contains("gamma") && !policy.at("gamma").is_null()) {
      config.policy.gamma = get_number(policy.at("gamma"), "policy.gamma");
    }
  }

  if (doc.contains("replications")) {
    const json& r = doc.at("replications");
    if (!r.is_number_integer()) {
      throw ConfigError("replications", "expected an integer");
    }
    config.replications = r.get<std::int64_t>();
  }
  if (doc.contains("master_seed")) {
    const json& s = doc.at("master_seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() &&
                                     s.get<long long>() >= 0)) {
      throw ConfigError("master_seed", "expected a non-negative integer");
    }
    config.master_seed = s.get<std::uint64_t>();
  }
  if (doc.contains("estimator")) {
    try {
      config.estimator = estimator_from_string(
          get_as<std::string>(doc.at("estimator"), "estimator"));
    } catch (const std::invalid_argument& e) {
      if (dynamic_cast<const ConfigError*>(&e)) throw;
      throw ConfigError("estimator", e.what());
    }
  }
  if (doc.contains("output_dir")) {
    config.output_dir = get_as<std::string>(doc.at("output_dir"), "output_dir");
  }
  if (doc.contains("beta_grid") && !doc.at("beta_grid").is_null()) {
    const json& grid = doc.at("beta_grid");
    if (!grid.is_array()) throw ConfigError("beta_grid", "expected array");
    std::vector<double> betas;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      betas.push_back(
          get_number(grid[i], "beta_grid[" + std::to_string(i) + "]"));
    }
    config.beta_grid = std::move(betas);
  }
  if (doc.contains("workers") && !doc.at("workers").is_null()) {
    config.workers = get_int(doc.at("workers"), "workers");
  }
  if (doc.contains("budget_range") && !doc.at("budget_range").is_null()) {
    const auto range =
        get_as<std::string>(doc.at("budget_range"), "budget_range");
    if (range == "strict") {
      config.budget_range = BudgetRange::kStrict;
    } else if (range == "relaxed") {
      config.budget_range = BudgetRange::kRelaxed;
    } else {
      throw ConfigError("budget_range", "expected 'strict' or 'relaxed'");
    }
  }
  if (doc.contains("trajectory")) {
    const json& traj = doc.at("trajectory");
    if (!traj.is_object()) throw ConfigError("trajectory", "expected object");
    reject_unknown(traj, "trajectory", {"record", "stride"});
    if (traj.contains("record")) {
      config.record_trajectory =
          get_as<bool>(traj.at("record"), "trajectory.record");
    }
    if (traj.contains("stride")) {
      config.trajectory_stride =
          get_int(traj.at("stride"), "trajectory.stride");
    }
  }
  return config;
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("config", e.what());
  }
  return parse_config(text);
}

json config_to_json(const ExperimentConfig& config) {
  json doc;
  doc["name"] = config.name;
  json instance{{"kind", to_string(config.instance_kind)},
                {"K", config.num_arms}};
  if (config.worst_case_batch) {
    instance["batch_override"] = *config.worst_case_batch;
  }
  doc["instance"] = instance;
  if (config.budget.kind == BudgetSpec::Kind::kConstant) {
    doc["budget"] = {{"kind", "constant"}, {"value", config.budget.value}};
  } else {
    doc["budget"] = {{"kind", "power"},
                     {"coefficient", config.budget.coefficient},
                     {"beta", config.budget.exponent}};
  }
  doc["horizons"] = config.horizons;
  json policy{{"kind", to_string(config.policy.kind)}};
  policy["delta_T"] = config.policy.batch_size
                          ? json(*config.policy.batch_size)
                          : json(nullptr);
  policy["gamma"] =
      config.policy.gamma ? json(*config.policy.gamma) : json(nullptr);
  doc["policy"] = policy;
  doc["replications"] = config.replications;
  doc["master_seed"] = config.master_seed;
  doc["estimator"] = to_string(config.estimator);
  doc["output_dir"] = config.output_dir;
  doc["beta_grid"] = config.beta_grid ? json(*config.beta_grid) : json(nullptr);
  doc["workers"] = config.workers ? json(*config.workers) : json(nullptr);
  doc["budget_range"] = config.budget_range
                            ? json(range_name(*config.budget_range))
                            : json(nullptr);
  doc["trajectory"] = {{"record", config.record_trajectory},
                       {"stride", config.trajectory_stride}};
  return doc;
}

std::string serialize_config(const ExperimentConfig& config) {
  return config_to_json(config).dump(2);
}

BudgetRange effective_range(const ExperimentConfig& config, CommandMode mode) {
  if (config.budget_range) return *config.budget_range;
  return mode == CommandMode::kRun ? BudgetRange::kStrict
                                   : BudgetRange::kRelaxed;
}

double resolve_budget(const ExperimentConfig& config, int horizon,
                      std::optional<double> beta) {
  BudgetSpec spec = config.budget;
  if (beta) {
    if (spec.kind == BudgetSpec::Kind::kConstant) {
      spec = BudgetSpec::power(spec.value, *beta);
    } else {
      spec.exponent = *beta;
    }
  }
  return spec.resolve(horizon);
}

void validate_config(const ExperimentConfig& config, CommandMode mode) {
  if (config.instance_kind == Generator::kCustom) {
    throw ConfigError("instance.kind",
                      "custom paths are a library feature, not a config kind");
  }
  if (config.instance_kind == Generator::kWorstCase) {
    if (config.num_arms < 2) throw ConfigError("instance.K", "must be >= 2");
  } else if (config.num_arms != 2) {
    throw ConfigError("instance.K", "sinusoidal and compressed use K = 2");
  }
  if (config.worst_case_batch) {
    if (config.instance_kind != Generator::kWorstCase) {
      throw ConfigError("instance.batch_override", "only for worst_case");
    }
    if (*config.worst_case_batch < 1) {
      throw ConfigError("instance.batch_override", "must be >= 1");
    }
  }
  try {
    config.budget.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("budget", e.what());
  }

  if (config.horizons.empty()) throw ConfigError("horizons", "empty");
  const int min_horizon =
      config.instance_kind == Generator::kCompressed ? 3 : 1;
  for (std::size_t i = 0; i < config.horizons.size(); ++i) {
    if (config.horizons[i] < min_horizon) {
      throw ConfigError("horizons[" + std::to_string(i) + "]",
                        "must be >= " + std::to_string(min_horizon));
    }
    if (i > 0 && config.horizons[i] <= config.horizons[i - 1]) {
      throw ConfigError("horizons", "must be strictly increasing");
    }
  }
  if (config.replications < 1) {
    throw ConfigError("replications", "must be >= 1");
  }
  if (config.policy.batch_size && *config.policy.batch_size < 1) {
    throw ConfigError("policy.delta_T", "must be >= 1");
  }
  if (config.policy.gamma &&
      !(*config.policy.gamma > 0.0 && *config.policy.gamma <= 1.0)) {
    throw ConfigError("policy.gamma", "must lie in (0, 1]");
  }
  if (config.workers && *config.workers < 1) {
    throw ConfigError("workers", "must be >= 1");
  }
  if (config.trajectory_stride < 0) {
    throw ConfigError("trajectory.stride", "must be >= 0");
  }
  if (config.output_dir.empty()) throw ConfigError("output_dir", "empty");

  std::vector<std::optional<double>> betas;
  if (mode == CommandMode::kRun) {
    if (config.beta_grid) {
      throw ConfigError("beta_grid", "use the sweep-beta command");
    }
    betas.emplace_back();
  } else {
    if (!config.beta_grid || config.beta_grid->empty()) {
      throw ConfigError("beta_grid", "sweep-beta needs a non-empty beta grid");
    }
    std::set<double> seen;
    for (std::size_t i = 0; i < config.beta_grid->size(); ++i) {
      const double beta = (*config.beta_grid)[i];
      const std::string field = "beta_grid[" + std::to_string(i) + "]";
      if (!(beta >= 0.0 && beta < 1.0)) {
        throw ConfigError(field, "beta must lie in [0, 1)");
      }
      if (!seen.insert(beta).second) throw ConfigError(field, "duplicate");
      betas.emplace_back(beta);
    }
  }

  const BudgetRange range = effective_range(config, mode);
  for (const auto& beta : betas) {
    for (int horizon : config.horizons) {
      const double v = resolve_budget(config, horizon, beta);
      try {
        check_budget_range(horizon, config.num_arms, v, range);
      } catch (const BudgetRangeError& e) {
        throw ConfigError("budget", std::string(e.what()) + " at T=" +
                                        std::to_string(horizon));
      }
    }
  }
}

ReplicationPlan make_plan(const ExperimentConfig& config, int horizon,
                          double budget, BudgetRange range) {
  ReplicationPlan plan;
  plan.instance.kind = config.instance_kind;
  plan.instance.horizon = horizon;
  plan.instance.num_arms = config.num_arms;
  plan.instance.budget = budget;
  plan.instance.range = range;
  plan.instance.worst_case_batch = config.worst_case_batch;
  plan.policy = config.policy;
  plan.replications = config.replications;
  plan.master_seed = config.master_seed;
  plan.estimator = config.estimator;
  plan.record_trajectory = config.record_trajectory;
  plan.trajectory_stride = config.trajectory_stride;
  return plan;
}

}  // namespace rexp3
