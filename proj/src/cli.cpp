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

#include "rexp3/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "rexp3/error.hpp"
#include "rexp3/io.hpp"

namespace rexp3::cli {

using nlohmann::json;

namespace {

constexpr const char* kGridHeader =
    "T,final_regret,std_err,theory_lower,theory_upper";
constexpr const char* kTrajectoryHeader =
    "epoch,mean_cum_regret,std_err,mean_policy_reward,mean_oracle_reward";

int default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

bool within_budget(double variation, double budget) {
  return variation <= budget + kBudgetTolerance;
}

json resolved_point(const GridPoint& point) {
  return {{"T", point.horizon},
          {"K", point.curve.num_arms},
          {"V_T", point.budget},
          {"delta_T", point.curve.tuning.batch_size},
          {"gamma", point.curve.tuning.gamma},
          {"in_theorem_range", point.in_theorem_range},
          {"path_variation", point.path_variation
                                 ? json(*point.path_variation)
                                 : json(nullptr)}};
}

json provenance(const ExperimentConfig& config, const StageOneResult& result) {
  json resolved = json::array();
  for (const auto& point : result.points) {
    resolved.push_back(resolved_point(point));
  }
  json doc{{"config", config_to_json(config)}, {"resolved", resolved}};
  if (result.beta) doc["beta"] = *result.beta;
  return doc;
}

json fit_json(const std::optional<SlopeFit>& fit) {
  if (!fit) return "n/a";
  return {{"slope", fit->slope},
          {"intercept", fit->intercept},
          {"r_squared", fit->r_squared},
          {"residual_max", fit->residual_max},
          {"n_points", fit->points.size()}};
}

std::optional<SlopeFit> try_fit(const std::vector<GridPoint>& points) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& point : points) {
    pairs.emplace_back(point.horizon, point.curve.final_regret);
  }
  try {
    return loglog_slope(pairs);
  } catch (const FitError&) {
    return std::nullopt;
  }
}

std::string beta_dirname(double beta) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "beta_%g", beta);
  return buffer;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  io::write_file(path.string(), text);
}

}  // namespace

Overrides environment_overrides() {
  Overrides env;
  if (const char* dir = std::getenv("REXP3_OUTPUT_DIR"); dir && *dir) {
    env.output_dir = dir;
  }
  if (const char* workers = std::getenv("REXP3_WORKERS");
      workers && *workers) {
    try {
      const long long n = io::parse_integer(workers);
      if (n < 1 || n > std::numeric_limits<int>::max()) {
        throw std::invalid_argument("out of range");
      }
      env.workers = static_cast<int>(n);
    } catch (const std::invalid_argument&) {
      throw ConfigError("REXP3_WORKERS", "expected a positive integer");
    }
  }
  return env;
}

ExperimentConfig apply_overrides(ExperimentConfig config, const Overrides& env,
                                 const Overrides& flags) {
  for (const Overrides* layer : {&env, &flags}) {
    if (layer->workers) config.workers = layer->workers;
    if (layer->seed) config.master_seed = *layer->seed;
    if (layer->output_dir) config.output_dir = *layer->output_dir;
  }
  return config;
}

StageOneResult run_stage_one(const ExperimentConfig& config,
                             std::optional<double> beta, BudgetRange range) {
  ExecutionOptions options;
  options.workers = config.workers.value_or(default_workers());
  StageOneResult result;
  result.beta = beta;
  for (std::size_t i = 0; i < config.horizons.size(); ++i) {
    const int horizon = config.horizons[i];
    const double budget = resolve_budget(config, horizon, beta);
    const ReplicationPlan plan = make_plan(config, horizon, budget, range);
    const auto start = std::chrono::steady_clock::now();
    RegretCurve curve;
    try {
      curve = replicate(plan, options);
    } catch (const std::exception& e) {
      throw SweepError(i, "grid point T=" + std::to_string(horizon) + ": " +
                              e.what());
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    bool in_range = true;
    try {
      check_budget_range(horizon, curve.num_arms, budget, BudgetRange::kStrict);
    } catch (const BudgetRangeError&) {
      in_range = false;
    }
    const BoundEnvelope bounds = bound_envelope(
        horizon, curve.num_arms, budget,
        in_range ? BudgetRange::kStrict : BudgetRange::kRelaxed);
    std::optional<double> variation;
    if (plan.instance.kind != Generator::kWorstCase) {
      Stream unused(0);
      variation = total_variation(build_instance(plan.instance, unused).path);
      if (!within_budget(*variation, budget)) in_range = false;
    }
    result.points.push_back({horizon, budget, std::move(curve), bounds,
                             in_range, variation, seconds});
  }
  result.fit = try_fit(result.points);
  return result;
}

void write_stage_one(const ExperimentConfig& config,
                     const StageOneResult& result,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const json provenance_doc = provenance(config, result);

  for (const auto& point : result.points) {
    const RegretCurve& curve = point.curve;
    const std::string suffix = "_T" + std::to_string(point.horizon);

    std::ostringstream csv;
    json header{{"config", config_to_json(config)},
                {"resolved", resolved_point(point)}};
    if (result.beta) header["beta"] = *result.beta;
    io::write_comment_block(csv, header.dump());
    csv << kTrajectoryHeader << '\n';
    for (std::size_t j = 0; j < curve.epochs.size(); ++j) {
      csv << curve.epochs[j] << ',' << io::format_double(curve.mean_cum_regret[j])
          << ',' << io::format_double(curve.std_err[j]) << ','
          << io::format_double(curve.mean_cum_policy_reward[j]) << ','
          << io::format_double(curve.mean_cum_oracle_reward[j]) << '\n';
    }
    write_text(dir / ("trajectory" + suffix + ".csv"), csv.str());

    json summary{
        {"T", point.horizon},
        {"K", curve.num_arms},
        {"V_T", point.budget},
        {"policy", curve.policy},
        {"delta_T", curve.tuning.batch_size},
        {"gamma", curve.tuning.gamma},
        {"R", curve.replications},
        {"master_seed", config.master_seed},
        {"estimator", to_string(curve.estimator)},
        {"final_regret", curve.final_regret},
        {"final_regret_stderr", curve.final_regret_stderr},
        {"final_regret_mean_gap", curve.final_mean_gap},
        {"final_regret_mean_gap_stderr", curve.final_mean_gap_stderr},
        {"final_regret_realized", curve.final_realized},
        {"final_regret_realized_stderr", curve.final_realized_stderr},
        {"theory_lower", point.bounds.lower},
        {"theory_lower_label", "worst-case envelope"},
        {"theory_upper", point.bounds.upper},
        {"in_theorem_range", point.in_theorem_range},
        {"path_variation", point.path_variation ? json(*point.path_variation)
                                                : json(nullptr)},
        {"wall_time_seconds", point.wall_time_seconds},
        {"config", config_to_json(config)}};
    if (result.beta) summary["beta"] = *result.beta;
    write_text(dir / ("summary" + suffix + ".json"), summary.dump(2) + "\n");
  }

  std::ostringstream grid;
  io::write_comment_block(grid, provenance_doc.dump());
  grid << kGridHeader << '\n';
  for (const auto& point : result.points) {
    grid << point.horizon << ',' << io::format_double(point.curve.final_regret)
         << ',' << io::format_double(point.curve.final_regret_stderr) << ','
         << io::format_double(point.bounds.lower) << ','
         << io::format_double(point.bounds.upper) << '\n';
  }
  write_text(dir / "grid.csv", grid.str());

  json summary = provenance_doc;
  summary["fit"] = fit_json(result.fit);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

void cmd_run(const ExperimentConfig& config, std::ostream& log) {
  validate_config(config, CommandMode::kRun);
  const BudgetRange range = effective_range(config, CommandMode::kRun);
  const StageOneResult result = run_stage_one(config, std::nullopt, range);
  write_stage_one(config, result, config.output_dir);
  for (const auto& point : result.points) {
    log << "T=" << point.horizon << " V_T=" << io::format_double(point.budget)
        << " delta_T=" << point.curve.tuning.batch_size
        << " regret=" << io::format_double(point.curve.final_regret)
        << " +- " << io::format_double(point.curve.final_regret_stderr)
        << '\n';
  }
  if (result.fit) {
    log << "slope=" << io::format_double(result.fit->slope)
        << " r_squared=" << io::format_double(result.fit->r_squared) << '\n';
  } else {
    log << "slope=n/a\n";
  }
}

void cmd_sweep_beta(const ExperimentConfig& config, std::ostream& log) {
  validate_config(config, CommandMode::kSweepBeta);
  const BudgetRange range = effective_range(config, CommandMode::kSweepBeta);
  const std::filesystem::path root = config.output_dir;

  std::map<double, std::vector<std::pair<double, double>>> by_beta;
  json per_beta = json::array();
  for (double beta : *config.beta_grid) {
    const StageOneResult result = run_stage_one(config, beta, range);
    write_stage_one(config, result, root / beta_dirname(beta));
    auto& points = by_beta[beta];
    for (const auto& point : result.points) {
      points.emplace_back(point.horizon, point.curve.final_regret);
    }
    per_beta.push_back(provenance(config, result));
    log << "beta=" << io::format_double(beta) << " slope="
        << (result.fit ? io::format_double(result.fit->slope) : "n/a") << '\n';
  }

  const std::vector<SlopeRow> rows = stage_two_slope_table(by_beta);
  const json provenance_doc{{"config", config_to_json(config)},
                            {"per_beta", per_beta}};

  std::ostringstream csv;
  io::write_comment_block(csv, provenance_doc.dump());
  write_slope_csv(csv, rows);
  write_text(root / "slopes.csv", csv.str());

  std::ostringstream table;
  io::write_comment_block(table, provenance_doc.dump());
  write_slope_table(table, rows);
  write_text(root / "slopes.txt", table.str());

  json summary = provenance_doc;
  json row_docs = json::array();
  for (const SlopeRow& row : rows) {
    row_docs.push_back({{"beta", row.beta},
                        {"slope", row.slope},
                        {"r_squared", row.r_squared},
                        {"n_points", row.n_points}});
  }
  summary["rows"] = row_docs;
  try {
    summary["slope_of_slopes"] = slope_of_slopes(rows);
  } catch (const FitError&) {
    summary["slope_of_slopes"] = "n/a";
  }
  write_text(root / "sweep_summary.json", summary.dump(2) + "\n");
  write_slope_table(log, rows);
  log << "slope_of_slopes="
      << (summary["slope_of_slopes"].is_number()
              ? io::format_double(summary["slope_of_slopes"].get<double>())
              : std::string("n/a"))
      << '\n';
}

std::vector<GridRow> read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<GridRow> rows;
  std::string line;
  int line_number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::string where = path + ":" + std::to_string(line_number);
    if (!header_seen) {
      if (line != kGridHeader) {
        throw InputError(where + ": expected header '" +
                         std::string(kGridHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = io::split_csv_line(line);
    if (fields.size() != 5) {
      throw InputError(where + ": expected 5 fields, got " +
                       std::to_string(fields.size()));
    }
    try {
      const long long horizon = io::parse_integer(fields[0]);
      if (horizon < 1 || horizon > std::numeric_limits<int>::max()) {
        throw std::invalid_argument("T out of range");
      }
      rows.push_back({static_cast<int>(horizon), io::parse_double(fields[1]),
                      io::parse_double(fields[2]), io::parse_double(fields[3]),
                      io::parse_double(fields[4])});
    } catch (const std::invalid_argument& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  if (!header_seen) throw InputError(path + ": empty grid CSV (no header)");
  if (rows.empty()) throw InputError(path + ": grid CSV has no data rows");
  return rows;
}

SlopeFit cmd_analyze(const std::string& input,
                     const std::optional<std::string>& output,
                     std::ostream& log) {
  const std::vector<GridRow> rows = read_grid_csv(input);
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(rows.size());
  for (const GridRow& row : rows) {
    pairs.emplace_back(row.horizon, row.final_regret);
  }
  SlopeFit fit;
  try {
    fit = loglog_slope(pairs);
  } catch (const FitError& e) {
    throw InputError(input + ": " + e.what());
  }
  log << "n_points=" << fit.points.size() << '\n'
      << "slope=" << io::format_double(fit.slope) << '\n'
      << "intercept=" << io::format_double(fit.intercept) << '\n'
      << "r_squared=" << io::format_double(fit.r_squared) << '\n'
      << "residual_max=" << io::format_double(fit.residual_max) << '\n';
  json report = fit_json(fit);
  report["input"] = input;
  json points = json::array();
  for (const auto& [x, y] : fit.points) points.push_back({x, y});
  report["points"] = points;
  const std::string target = output.value_or(input + ".analysis.json");
  io::write_file(target, report.dump(2) + "\n");
  return fit;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rexp3 non-stationary bandit experiments", "rexp3"};
  app.require_subcommand(1);
  Overrides flags;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  app.add_option("--workers", workers, "Worker threads")->check(
      CLI::PositiveNumber);
  app.add_option("--seed", seed, "Master seed override");
  app.add_option("--output-dir", output_dir, "Output directory override");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Fixed-budget horizon grid");
  run_cmd->add_option("--config", config_path, "Config JSON")->required();
  run_cmd->fallthrough();

  std::string sweep_config_path;
  auto* sweep_cmd =
      app.add_subcommand("sweep-beta", "Budget V_T = c T^beta over a beta grid");
  sweep_cmd->add_option("--config", sweep_config_path, "Config JSON")
      ->required();
  sweep_cmd->fallthrough();

  std::string input_path;
  std::optional<std::string> report_path;
  auto* analyze_cmd =
      app.add_subcommand("analyze", "Log-log fit of a stored grid CSV");
  analyze_cmd->add_option("--input", input_path, "grid.csv")->required();
  analyze_cmd->add_option("--output", report_path, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  flags.workers = workers;
  flags.seed = seed;
  flags.output_dir = output_dir;

  try {
    if (*analyze_cmd) {
      cmd_analyze(input_path, report_path, out);
      return kExitOk;
    }
    const bool sweeping = static_cast<bool>(*sweep_cmd);
    ExperimentConfig config =
        load_config(sweeping ? sweep_config_path : config_path);
    config = apply_overrides(std::move(config), environment_overrides(), flags);
    if (sweeping) {
      cmd_sweep_beta(config, out);
    } else {
      cmd_run(config, out);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace rexp3::cli
