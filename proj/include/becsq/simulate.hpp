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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "becsq/dynamics.hpp"
#include "becsq/optics.hpp"
#include "becsq/schedule.hpp"

namespace becsq {

/// One stage of a probing protocol. All quantities in internal units.
struct ProtocolSegment {
  std::string label;
  double duration = 0.0;
  double kappa_sq = 0.0;
  std::vector<double> frequencies;  // empty: continuous probing
  double delta_phi = 0.0;
  GatingRule rule = GatingRule::Intersection;
  FeedbackConfig feedback;
  /// Gate on varpi t with t the protocol clock; false restarts the phase at
  /// the segment start.
  bool lab_phase_reference = true;
};

struct SimulationOptions {
  double coupling_length = 0.5;
  /// Uniform sampling interval; 0 samples only segment ends (and pulse
  /// centres when requested).
  double sample_interval = 0.0;
  bool sample_pulse_centres = false;
  std::vector<double> extra_sample_times;
  /// Upper bound on the RK4 step inside pulses; 0 uses
  /// min(tau / 20, 2 pi / (50 omega_max)).
  double max_dt = 0.0;

  int n_trajectories = 0;
  std::uint64_t seed = 1;
  /// Trajectories whose means are kept sample by sample.
  int recorded_trajectories = 0;
  int n_threads = 0;  // 0: hardware concurrency
  bool noise = true;
  Eigen::VectorXd initial_means;  // empty: zero
  /// Also integrate C' = -D C - C D^T + A M A, the ensemble covariance of the
  /// conditional means.
  bool track_means_covariance = false;
};

struct Sample {
  double t = 0.0;
  int segment = 0;
  double segment_time = 0.0;
  bool probe_on = false;        // probe state over the interval ending here
  double probe_time = 0.0;      // accumulated since t = 0
  double segment_probe_time = 0.0;
  Eigen::MatrixXd A;
  Eigen::MatrixXd C;            // empty unless tracked
};

/// Moments over the trajectory ensemble, one column per sample.
struct EnsembleStats {
  int n_trajectories = 0;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd variance;
  Eigen::MatrixXd mean_comoving;
  Eigen::MatrixXd variance_comoving;
};

struct TimeSeries {
  Eigen::VectorXd omega;
  std::vector<Sample> samples;
  std::vector<StroboSchedule> schedules;
  std::vector<CouplingModel> couplings;
  std::vector<double> segment_starts;
  double duration = 0.0;
  double nominal_dt = 0.0;
  long steps_on = 0;
  long steps_off = 0;
  EnsembleStats ensemble;
  /// Per recorded trajectory: lab-frame means, 2n x n_samples.
  std::vector<Eigen::MatrixXd> trajectories;
  std::vector<std::string> warnings;

  GaussianState state(std::size_t sample, const Eigen::VectorXd& R) const {
    return {R, samples[sample].A, samples[sample].t};
  }
};

TimeSeries simulate(const OverlapTables& overlaps, const std::vector<ProtocolSegment>& protocol,
                    const SimulationOptions& options);

/// R <- exp(-D dt) R, block by block.
void apply_drift_propagator(Eigen::VectorXd& R, const Eigen::VectorXd& omega, const FeedbackConfig& feedback,
                            double dt);

}  // namespace becsq
