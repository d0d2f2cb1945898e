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

// Experiment pipelines behind the `rexp3` command line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rexp3/analysis.hpp"
#include "rexp3/config.hpp"
#include "rexp3/sim.hpp"

namespace rexp3::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct Overrides {
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
};

// REXP3_OUTPUT_DIR and REXP3_WORKERS. Throws ConfigError on a malformed
// worker count.
Overrides environment_overrides();

// Flags win over environment, environment over the config file.
ExperimentConfig apply_overrides(ExperimentConfig config, const Overrides& env,
                                 const Overrides& flags);

struct GridPoint {
  int horizon;
  double budget;
  RegretCurve curve;
  BoundEnvelope bounds;
  // V_T in [1/K, T/K] and, for deterministic paths, variation within V_T.
  bool in_theorem_range;
  std::optional<double> path_variation;  // empty for worst_case
  double wall_time_seconds;
};

struct StageOneResult {
  std::optional<double> beta;
  std::vector<GridPoint> points;
  std::optional<SlopeFit> fit;  // empty when the grid cannot be fitted
};

// Replicates every horizon of `config` (budget exponent replaced by `beta`
// when given).
StageOneResult run_stage_one(const ExperimentConfig& config,
                             std::optional<double> beta, BudgetRange range);

// Writes trajectory_T<T>.csv, summary_T<T>.json, grid.csv and summary.json.
void write_stage_one(const ExperimentConfig& config,
                     const StageOneResult& result,
                     const std::filesystem::path& dir);

void cmd_run(const ExperimentConfig& config, std::ostream& log);
void cmd_sweep_beta(const ExperimentConfig& config, std::ostream& log);

struct GridRow {
  int horizon;
  double final_regret;
  double std_err;
  double theory_lower;
  double theory_upper;
};

// Raised for malformed grid CSVs; the message names the line number.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads the `T,final_regret,std_err,theory_lower,theory_upper` schema,
// skipping `#` comment lines.
std::vector<GridRow> read_grid_csv(const std::string& path);

// Fits the grid, prints the fit and writes a JSON report to `output`
// (default: `<input>.analysis.json`).
SlopeFit cmd_analyze(const std::string& input,
                     const std::optional<std::string>& output,
                     std::ostream& log);

// Full command line entry point; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rexp3::cli
