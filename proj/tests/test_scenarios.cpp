// Copyright 2026 The becsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "becsq/presets.hpp"
#include "becsq/runner.hpp"
#include "becsq/scenario_config.hpp"

namespace becsq {
namespace {

namespace fs = std::filesystem;

const char* kSmall = R"(
name = "small"

[trap]
mu_target = 2.0

[grid]
x_max = 8
n_points = 320

[modes]
n_modes = 3

[[protocol.segments]]
label = "squeeze"
duration_periods = 2
kappa_sq = 100
frequencies = [[3, 3]]
delta_phi = 0.1

[[protocol.segments]]
label = "erase"
duration_periods = 1
kappa_sq = 20

[ensemble]
n_trajectories = 6
seed = 11
recorded_trajectories = 2

[outputs]
sample_interval_periods = 0.25
negativity = [[[1], [3]]]
purity = [[1, 2, 3]]
qnd_modes = [3]
hellinger_subset = [1, 3]
hellinger_blocks = [[3, 3]]
snapshot_periods = [1.0]
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("becsq_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(Config, ParsesSmallScenario) {
  const auto cfg = parse_scenario(kSmall);
  EXPECT_EQ(cfg.name, "small");
  EXPECT_EQ(cfg.n_modes, 3);
  ASSERT_EQ(cfg.segments.size(), 2u);
  EXPECT_NEAR(cfg.segments[0].duration, 4.0 * std::numbers::pi, 1e-12);
  EXPECT_TRUE(cfg.segments[0].lab_phase_reference);
  EXPECT_TRUE(cfg.segments[1].frequencies.empty());
  EXPECT_NEAR(cfg.total_duration(), 6.0 * std::numbers::pi, 1e-12);
  EXPECT_EQ(cfg.ensemble.seed, 11u);
  EXPECT_EQ(*cfg.grid.n_points, 320);
}

TEST(Config, ErrorsCarryLineNumbers) {
  try {
    parse_scenario("name = \"x\"\n\n[trap]\nmu_target = 2.0\nbogus = 1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 5);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
  std::string bad = kSmall;
  bad.replace(bad.find("delta_phi = 0.1"), 15, "delta_phi = \"wide\"");
  EXPECT_THROW(parse_scenario(bad), ConfigError);
  EXPECT_THROW(parse_scenario("name = \n"), ConfigError);
  std::string phase = kSmall;
  phase.replace(phase.find("delta_phi = 0.1"), 15, "delta_phi = 0.1\nphase_reference = \"wall\"");
  EXPECT_THROW(parse_scenario(phase), ConfigError);
}

TEST(Config, ValidationRejectsBadValues) {
  std::string bad = kSmall;
  bad.replace(bad.find("frequencies = [[3, 3]]"), 22, "frequencies = [[3, 7]]");
  EXPECT_THROW(parse_scenario(bad), ConfigError);
  std::string neg = kSmall;
  neg.replace(neg.find("kappa_sq = 20"), 13, "kappa_sq = -1");
  EXPECT_THROW(parse_scenario(neg), ConfigError);
}

TEST(Config, SegmentPhaseReference) {
  std::string seg = kSmall;
  seg.replace(seg.find("delta_phi = 0.1"), 15, "delta_phi = 0.1\nphase_reference = \"segment\"");
  EXPECT_FALSE(parse_scenario(seg).segments[0].lab_phase_reference);
}

TEST(Presets, Catalogue) {
  EXPECT_EQ(presets().size(), 8u);
  const auto fig3 = preset_config("fig3");
  EXPECT_EQ(fig3.segments[0].kappa_sq_per_two_pi, 30.0);
  EXPECT_EQ(preset_config("fig4_nofeedback").ensemble.n_trajectories, 1000);
  EXPECT_EQ(preset_config("fig4_feedback").segments[0].feedback_mode, 3);
  const auto b = preset_config("fig1b");
  ASSERT_EQ(b.segments.size(), 3u);
  EXPECT_EQ(b.segments[1].delta_phi_per_two_pi, 0.1);
  EXPECT_TRUE(b.segments[2].frequencies.empty());
  EXPECT_EQ(preset_config("fig2").sweep.values.size(), 7u);
  EXPECT_THROW(preset_config("fig9"), std::invalid_argument);
  for (const auto& p : presets()) EXPECT_NO_THROW(to_json(parse_scenario(p.toml))) << p.name;
}

TEST(Runner, WritesOutputsDeterministically) {
  const auto cfg = parse_scenario(kSmall);
  const fs::path a = fresh_dir("a"), b = fresh_dir("b");
  const auto report = run_scenario(cfg, a);
  run_scenario(cfg, b);
  for (const char* f : {"timeseries.csv", "covariance_final.csv", "trajectories.csv", "metadata.json", "modes.csv",
                        "pixel_overlaps.csv", "mode_overlaps.csv"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(slurp(a / "timeseries.csv").rfind(std::string("# ") + kTimeSeriesSchema, 0), 0u);
  EXPECT_EQ(slurp(a / "covariance_final.csv").rfind(std::string("# ") + kCovarianceSchema, 0), 0u);
  EXPECT_EQ(slurp(a / "trajectories.csv").rfind(std::string("# ") + kTrajectorySchema, 0), 0u);
  const std::string ts = slurp(a / "timeseries.csv");
  for (const char* col : {"var_x3_0", "var_p1_lab", "E_1_3", "P_1-2-3", "D_H", "N_nc", "var_qnd3", "min_symplectic",
                          "mean_x3_lab", "sigma_p3_0"}) {
    EXPECT_NE(ts.find(col), std::string::npos) << col;
  }
  EXPECT_EQ(report.metadata["seed"], 11);
  EXPECT_EQ(report.metadata["segments"].size(), 2u);
  EXPECT_FALSE(report.series.samples.empty());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Runner, SweepOutput) {
  std::string text = kSmall;
  text += "\n[sweep]\nsegment = 1\nparameter = \"delta_phi\"\nvalues = [0.05, 0.1]\n";
  const fs::path dir = fresh_dir("sweep");
  run_scenario(parse_scenario(text), dir);
  const std::string sweep = slurp(dir / "sweep.csv");
  EXPECT_EQ(sweep.rfind(std::string("# ") + kSweepSchema, 0), 0u);
  int rows = 0;
  std::istringstream in(sweep);
  for (std::string line; std::getline(in, line);) rows += !line.empty() && line[0] != '#';
  EXPECT_EQ(rows, 3);  // header + 2 values
  fs::remove_all(dir);
}

TEST(Runner, SweepValueOverride) {
  std::string text = kSmall;
  text += "\n[sweep]\nsegment = 2\nparameter = \"kappa_sq\"\nvalues = [5.0]\n";
  const auto cfg = parse_scenario(text);
  const auto swept = with_sweep_value(cfg, 5.0);
  EXPECT_EQ(swept.segments[1].kappa_sq_per_two_pi, 5.0);
  EXPECT_EQ(swept.segments[0].kappa_sq_per_two_pi, 100.0);
}

}  // namespace
}  // namespace becsq
