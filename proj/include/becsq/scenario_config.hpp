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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "becsq/meanfield.hpp"
#include "becsq/optics.hpp"
#include "becsq/schedule.hpp"

namespace becsq {

/// Invalid configuration, with the offending line when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A gating frequency: either a sum of mode frequencies (e.g. [1, 3] for
/// w_1 + w_3, [3, 3] for 2 w_3) or an explicit value in omega_x.
struct FrequencySpec {
  std::vector<int> modes;
  double value = 0.0;

  std::string describe() const;
};

struct SegmentConfig {
  std::string label;
  double duration = 0.0;             // 1 / omega_x
  double kappa_sq_per_two_pi = 0.0;  // kappa^2 in omega_x / 2pi
  std::optional<double> d0;          // kappa^2 = d0 eta when both are given
  std::optional<double> eta;
  std::vector<FrequencySpec> frequencies;  // empty: continuous
  double delta_phi_per_two_pi = 0.0;
  GatingRule rule = GatingRule::Intersection;
  int feedback_mode = 0;
  /// Pulse phases from the lab clock ("lab") or from the segment start ("segment").
  bool lab_phase_reference = true;
};

struct GridSettings {
  std::optional<double> x_max;
  std::optional<int> n_points;
  int stencil_order = 4;
};

struct OpticsSettings {
  double wavelength_nm = 780.0;
  std::optional<double> resolution_length;  // l_x; overrides sqrt(l_perp lambda)
  DetectorArray detector;
  double coupling_length = 0.5;
};

struct EnsembleSettings {
  int n_trajectories = 0;
  std::uint64_t seed = 1;
  int recorded_trajectories = 0;
  int threads = 0;
};

struct OutputSettings {
  double sample_interval = 0.0;  // 1 / omega_x
  bool sample_pulse_centres = false;
  std::vector<double> snapshot_times;  // 1 / omega_x
  std::vector<std::pair<std::vector<int>, std::vector<int>>> negativity;
  std::vector<std::vector<int>> purity_subsets;
  /// D_H is evaluated on this subset against a target that keeps only
  /// hellinger_blocks; empty subset disables it.
  std::vector<int> hellinger_subset;
  std::vector<std::pair<int, int>> hellinger_blocks;
  std::vector<int> qnd_modes;
  std::vector<std::pair<int, int>> qnd_pairs;
  bool write_modes = true;
};

struct SweepSettings {
  int segment = 0;  // 1-based; 0 disables
  std::string parameter;  // "delta_phi" or "kappa_sq", in config units
  std::vector<double> values;
  bool enabled() const { return segment > 0; }
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::string description;
  TrapConfig trap;
  GridSettings grid;
  OpticsSettings optics;
  int n_modes = 10;
  std::vector<SegmentConfig> segments;
  EnsembleSettings ensemble;
  OutputSettings outputs;
  SweepSettings sweep;

  /// Throws ConfigError.
  void validate() const;
  double total_duration() const;
};

ScenarioConfig parse_scenario(const std::string& toml_text, const std::string& source_name = "<config>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Fully resolved configuration, every default spelled out.
nlohmann::json to_json(const ScenarioConfig& config);

}  // namespace becsq
