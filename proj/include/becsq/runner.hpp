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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "becsq/bogoliubov.hpp"
#include "becsq/optics.hpp"
#include "becsq/scenario_config.hpp"
#include "becsq/simulate.hpp"

namespace becsq {

inline constexpr const char* kTimeSeriesSchema = "becsq-timeseries v1";
inline constexpr const char* kCovarianceSchema = "becsq-covariance v1";
inline constexpr const char* kTrajectorySchema = "becsq-trajectories v1";
inline constexpr const char* kSweepSchema = "becsq-sweep v1";

/// Ground state, modes and overlaps for a scenario; shared by every run of it.
struct PreparedSystem {
  ModeBasis basis;
  OverlapTables overlaps;
  double resolution_length = 0.0;
  std::vector<std::string> warnings;
};

Grid scenario_grid(const ScenarioConfig& config);
PreparedSystem prepare_system(const ScenarioConfig& config);

/// Segments in internal units, with symbolic frequencies resolved on omega.
std::vector<ProtocolSegment> resolve_protocol(const ScenarioConfig& config, const Eigen::VectorXd& omega);
SimulationOptions simulation_options(const ScenarioConfig& config);
TimeSeries run_simulation(const ScenarioConfig& config, const PreparedSystem& system);

/// Copy of the config with the sweep parameter of the swept segment set.
ScenarioConfig with_sweep_value(const ScenarioConfig& config, double value);

struct SampleMetrics {
  std::vector<double> negativity;  // per outputs.negativity entry
  std::vector<double> purity;      // per outputs.purity subset
  double hellinger = 0.0;          // NaN when disabled
  double min_symplectic = 0.0;
  double noncondensate = 0.0;
  std::vector<double> var_qnd;     // per outputs.qnd_modes; NaN outside targeting segments
  std::vector<double> sigma_qnd;
};

SampleMetrics evaluate_sample(const ScenarioConfig& config, const PreparedSystem& system, const TimeSeries& series,
                              std::size_t sample);

/// Comoving-frame covariance at a sample.
Eigen::MatrixXd comoving_covariance(const TimeSeries& series, std::size_t sample);

/// True if a segment gates at 2 w_j (a frequency entry [j, j]).
bool segment_targets_mode(const SegmentConfig& segment, int mode);
bool segment_targets_pair(const SegmentConfig& segment, int j, int k);

struct RunReport {
  TimeSeries series;
  nlohmann::json metadata;
  std::vector<std::filesystem::path> files;
};

/// Runs the scenario (and its sweep) and writes timeseries.csv,
/// covariance_*.csv, trajectories.csv, sweep.csv and metadata.json.
RunReport run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir, std::ostream* log = nullptr);

}  // namespace becsq
