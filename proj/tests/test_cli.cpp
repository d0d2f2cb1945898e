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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "gtest/gtest.h"
#include "json.hpp"
#include "rexp3/cli.hpp"
#include "rexp3/error.hpp"
#include "rexp3/io.hpp"

namespace rexp3::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kSource = REXP3_SOURCE_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "rexp3");
  std::vector<char*> argv;
  for (auto& arg : args) argv.push_back(arg.data());
  std::ostringstream out, err;
  const int code =
      run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("rexp3_cli_") + info->name() + "_" +
            std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path path = dir_ / name;
    io::write_file(path.string(), text);
    return path;
  }

  fs::path dir_;
};

json without_wall_time(json doc) {
  doc.erase("wall_time_seconds");
  if (doc.contains("resolved")) {
    for (auto& point : doc["resolved"]) point.erase("wall_time_seconds");
  }
  return doc;
}

TEST_F(CliTest, DeskConfigWritesGridAndRerunsIdentically) {
  const std::string config =
      (kSource / "configs" / "stage_one_sinusoidal.json").string();
  const fs::path a = dir_ / "a";
  const Outcome first =
      invoke({"--output-dir", a.string(), "run", "--config", config});
  ASSERT_EQ(first.code, kExitOk) << first.err;
  std::map<std::string, std::string> before;
  for (const auto& entry : fs::directory_iterator(a)) {
    before[entry.path().filename().string()] =
        io::read_file(entry.path().string());
  }
  const Outcome second =
      invoke({"run", "--config", config, "--output-dir", a.string()});
  ASSERT_EQ(second.code, kExitOk) << second.err;

  int trajectories = 0;
  for (const auto& [name, mine] : before) {
    if (name.starts_with("trajectory_T")) ++trajectories;
    const std::string again = io::read_file((a / name).string());
    if (name.ends_with(".json")) {
      EXPECT_EQ(without_wall_time(json::parse(mine)),
                without_wall_time(json::parse(again)))
          << name;
    } else {
      // CSV comment blocks carry no timing, so reruns match byte for byte.
      EXPECT_EQ(mine, again) << name;
    }
  }
  EXPECT_EQ(trajectories, 4);
  for (int T : {2000, 4000, 8000, 16000}) {
    EXPECT_TRUE(fs::exists(a / ("trajectory_T" + std::to_string(T) + ".csv")));
    EXPECT_TRUE(fs::exists(a / ("summary_T" + std::to_string(T) + ".json")));
  }

  const auto rows = read_grid_csv((a / "grid.csv").string());
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].horizon, 2000);
  EXPECT_EQ(rows[3].horizon, 16000);

  const json summary = json::parse(io::read_file((a / "summary.json").string()));
  const json per_t =
      json::parse(io::read_file((a / "summary_T4000.json").string()));
  EXPECT_EQ(per_t["T"], 4000);
  EXPECT_EQ(per_t["K"], 2);
  EXPECT_EQ(per_t["R"], 1000);
  EXPECT_EQ(per_t["delta_T"], 136);
  EXPECT_EQ(per_t["estimator"], "mean_gap");
  EXPECT_EQ(per_t["in_theorem_range"], true);
  EXPECT_EQ(per_t["final_regret"], rows[1].final_regret);

  // analyze reproduces the stored fit exactly.
  const Outcome analyzed =
      invoke({"analyze", "--input", (a / "grid.csv").string()});
  ASSERT_EQ(analyzed.code, kExitOk) << analyzed.err;
  const json report =
      json::parse(io::read_file((a / "grid.csv.analysis.json").string()));
  EXPECT_EQ(report["slope"], summary["fit"]["slope"]);
  EXPECT_EQ(report["intercept"], summary["fit"]["intercept"]);
  EXPECT_EQ(report["r_squared"], summary["fit"]["r_squared"]);
  EXPECT_NE(analyzed.out.find("n_points=4"), std::string::npos);
}

TEST_F(CliTest, TrajectoryFileLayout) {
  const fs::path config = write("c.json", R"({
    "instance": {"kind": "worst_case", "K": 3},
    "budget": {"kind": "constant", "value": 2},
    "horizons": [50, 120],
    "replications": 5,
    "output_dir": "ignored",
    "trajectory": {"stride": 25}
  })");
  const fs::path out = dir_ / "out";
  ASSERT_EQ(invoke({"run", "--config", config.string(), "--output-dir",
                    out.string()})
                .code,
            kExitOk);
  std::istringstream csv(io::read_file((out / "trajectory_T120.csv").string()));
  std::string line;
  std::getline(csv, line);
  ASSERT_TRUE(line.starts_with("# {"));
  const json header = json::parse(line.substr(2));
  EXPECT_EQ(header["config"]["instance"]["K"], 3);
  std::getline(csv, line);
  EXPECT_EQ(line,
            "epoch,mean_cum_regret,std_err,mean_policy_reward,"
            "mean_oracle_reward");
  std::vector<int> epochs;
  while (std::getline(csv, line)) {
    epochs.push_back(std::stoi(io::split_csv_line(line)[0]));
  }
  EXPECT_EQ(epochs, (std::vector<int>{25, 50, 75, 100, 120}));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(invoke({}).code, kExitConfig);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(invoke({"run"}).code, kExitConfig);
  EXPECT_EQ(invoke({"--workers", "0", "run", "--config", "x"}).code,
            kExitConfig);
  EXPECT_EQ(invoke({"run", "--config", (dir_ / "missing.json").string()}).code,
            kExitConfig);

  const fs::path bad = write("bad.json", R"({
    "instance": {"kind": "sinusoidal"},
    "budget": {"kind": "constant", "value": 2000},
    "horizons": [2000]
  })");
  const Outcome budget = invoke({"run", "--config", bad.string()});
  EXPECT_EQ(budget.code, kExitConfig);
  EXPECT_NE(budget.err.find("budget"), std::string::npos);

  const fs::path unknown = write("unknown.json", R"({
    "instance": {"kind": "sinusoidal"},
    "budget": {"kind": "constant", "value": 2},
    "horizons": [100],
    "replication": 3
  })");
  const Outcome typo = invoke({"run", "--config", unknown.string()});
  EXPECT_EQ(typo.code, kExitConfig);
  EXPECT_NE(typo.err.find("replication"), std::string::npos);

  EXPECT_EQ(invoke({"analyze", "--input", (dir_ / "nope.csv").string()}).code,
            kExitRuntime);
  const fs::path empty = write("empty.csv", "");
  const Outcome empty_run = invoke({"analyze", "--input", empty.string()});
  EXPECT_EQ(empty_run.code, kExitRuntime);
  EXPECT_NE(empty_run.err.find("empty"), std::string::npos);

  const fs::path malformed = write(
      "bad.csv",
      "T,final_regret,std_err,theory_lower,theory_upper\n10,1,0,0,0\n20,x,0,0,0\n");
  const Outcome bad_row = invoke({"analyze", "--input", malformed.string()});
  EXPECT_EQ(bad_row.code, kExitRuntime);
  EXPECT_NE(bad_row.err.find(":3"), std::string::npos);

  const fs::path single = write(
      "single.csv", "T,final_regret,std_err,theory_lower,theory_upper\n10,1,0,0,0\n");
  EXPECT_EQ(invoke({"analyze", "--input", single.string()}).code,
            kExitRuntime);
}

TEST_F(CliTest, BinaryReportsExitCodes) {
  const std::string cli = REXP3_CLI_PATH;
  const auto status = [&](const std::string& args) {
    const int raw = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status("--help"), kExitOk);
  EXPECT_EQ(status("run"), kExitConfig);
  EXPECT_EQ(status("analyze --input " + (dir_ / "none.csv").string()),
            kExitRuntime);
}

TEST_F(CliTest, AnalyzeExactPowerLaw) {
  std::ostringstream csv;
  csv << "# synthetic\nT,final_regret,std_err,theory_lower,theory_upper\n";
  for (int T : {1000, 2000, 4000, 8000, 16000}) {
    csv << T << ',' << io::format_double(5.0 * std::pow(T, 2.0 / 3.0))
        << ",0,0,0\n";
  }
  const fs::path input = write("power.csv", csv.str());
  const fs::path report = dir_ / "report.json";
  std::ostringstream log;
  const SlopeFit fit = cmd_analyze(input.string(), report.string(), log);
  EXPECT_NEAR(fit.slope, 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(fit.intercept, std::log(5.0), 1e-9);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  const json doc = json::parse(io::read_file(report.string()));
  EXPECT_EQ(doc["n_points"], 5);
  EXPECT_EQ(doc["points"].size(), 5u);
  EXPECT_NE(log.str().find("slope=0.66666"), std::string::npos);
}

TEST_F(CliTest, SingleBetaSweepHasNoSlopeOfSlopes) {
  const fs::path config = write("sweep.json", R"({
    "instance": {"kind": "sinusoidal"},
    "budget": {"kind": "power", "coefficient": 3},
    "horizons": [200, 400, 800],
    "replications": 20,
    "beta_grid": [0.2],
    "trajectory": {"record": false}
  })");
  const fs::path out = dir_ / "sweep";
  const Outcome result = invoke(
      {"sweep-beta", "--config", config.string(), "--output-dir", out.string()});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_NE(result.out.find("slope_of_slopes=n/a"), std::string::npos);

  const json summary =
      json::parse(io::read_file((out / "sweep_summary.json").string()));
  EXPECT_EQ(summary["slope_of_slopes"], "n/a");
  ASSERT_EQ(summary["rows"].size(), 1u);
  EXPECT_EQ(summary["rows"][0]["beta"], 0.2);
  EXPECT_EQ(summary["rows"][0]["n_points"], 3);

  std::istringstream csv(io::read_file((out / "slopes.csv").string()));
  std::vector<std::string> data;
  for (std::string line; std::getline(csv, line);) {
    if (!line.starts_with("#")) data.push_back(line);
  }
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data[0], "beta,slope,r_squared,n_points");
  EXPECT_TRUE(data[1].starts_with("0.20000000000000001,"));
  EXPECT_TRUE(fs::exists(out / "beta_0.2" / "grid.csv"));
  EXPECT_TRUE(fs::exists(out / "slopes.txt"));

  const json point =
      json::parse(io::read_file((out / "beta_0.2" / "summary_T400.json").string()));
  EXPECT_DOUBLE_EQ(point["V_T"].get<double>(), 3.0 * std::pow(400.0, 0.2));
  EXPECT_EQ(point["beta"], 0.2);
}

TEST_F(CliTest, SweepFlagsOutOfRangeBudgets) {
  const fs::path config = write("sweep.json", R"({
    "instance": {"kind": "sinusoidal"},
    "budget": {"kind": "power", "coefficient": 3},
    "horizons": [100, 200],
    "replications": 4,
    "beta_grid": [0.0, 0.9]
  })");
  const fs::path out = dir_ / "sweep";
  ASSERT_EQ(invoke({"sweep-beta", "--config", config.string(), "--output-dir",
                    out.string()})
                .code,
            kExitOk);
  const auto in_range = [&](const std::string& beta, int T) {
    return json::parse(io::read_file(
        (out / beta / ("summary_T" + std::to_string(T) + ".json")).string()))
        ["in_theorem_range"]
            .get<bool>();
  };
  EXPECT_TRUE(in_range("beta_0", 100));
  EXPECT_FALSE(in_range("beta_0.9", 200));

  // The same grid under `run` semantics is rejected up front.
  const fs::path strict = write("strict.json", R"({
    "instance": {"kind": "sinusoidal"},
    "budget": {"kind": "power", "coefficient": 3, "beta": 0.9},
    "horizons": [100, 200],
    "replications": 4
  })");
  EXPECT_EQ(invoke({"run", "--config", strict.string()}).code, kExitConfig);
}

TEST(OverridesTest, FlagsBeatEnvironmentBeatFile) {
  ExperimentConfig config;
  config.output_dir = "file";
  config.workers = 2;
  config.master_seed = 5;

  Overrides env{4, std::nullopt, "env"};
  Overrides flags{std::nullopt, 9, std::nullopt};
  ExperimentConfig merged = apply_overrides(config, env, flags);
  EXPECT_EQ(merged.output_dir, "env");
  EXPECT_EQ(merged.workers, 4);
  EXPECT_EQ(merged.master_seed, 9u);

  flags.output_dir = "flag";
  flags.workers = 8;
  merged = apply_overrides(config, env, flags);
  EXPECT_EQ(merged.output_dir, "flag");
  EXPECT_EQ(merged.workers, 8);

  merged = apply_overrides(config, {}, {});
  EXPECT_EQ(merged, config);
}

TEST(OverridesTest, ReadsEnvironment) {
  ::setenv("REXP3_OUTPUT_DIR", "/tmp/somewhere", 1);
  ::setenv("REXP3_WORKERS", "6", 1);
  Overrides env = environment_overrides();
  EXPECT_EQ(env.output_dir, "/tmp/somewhere");
  EXPECT_EQ(env.workers, 6);
  EXPECT_FALSE(env.seed);

  ::setenv("REXP3_WORKERS", "many", 1);
  EXPECT_THROW(environment_overrides(), ConfigError);
  ::setenv("REXP3_WORKERS", "0", 1);
  EXPECT_THROW(environment_overrides(), ConfigError);
  ::unsetenv("REXP3_WORKERS");
  ::unsetenv("REXP3_OUTPUT_DIR");
  env = environment_overrides();
  EXPECT_FALSE(env.output_dir);
  EXPECT_FALSE(env.workers);
}

}  // namespace
}  // namespace rexp3::cli
