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

#include <random>

#include <Eigen/Dense>

#include "becsq/gaussian_state.hpp"
#include "becsq/optics.hpp"

namespace becsq {

/// Critical-damping feedback on one mode: its drift block becomes
/// [[0, -w], [w, 2w]]. It acts on the conditional means only.
struct FeedbackConfig {
  int target_mode = 0;  // 1-based; 0 disables
  bool enabled() const { return target_mode > 0; }
};

/// D with the feedback block applied.
Eigen::MatrixXd feedback_drift(const Eigen::VectorXd& omega, const FeedbackConfig& feedback);

/// exp(-D t) for the (possibly feedback-modified) drift, block by block in
/// closed form.
Eigen::MatrixXd drift_propagator(const Eigen::VectorXd& omega, const FeedbackConfig& feedback, double t);

/// exp(-[[0, -w], [w, 2w]] t) = e^{-wt} [[1 + wt, wt], [-wt, 1 - wt]].
Eigen::Matrix2d critically_damped_propagator(double omega, double t);

struct CovarianceStepOptions {
  /// Smallest symplectic eigenvalue accepted is 1/2 - tolerance.
  double physicality_tolerance = 1e-6;
  int max_halvings = 12;
};

/// Right-hand side of A' = E - D A - A D^T - A M A (E, M only while probing).
Eigen::MatrixXd riccati_rhs(const Eigen::MatrixXd& A, const CouplingModel& coupling, bool probe_on);

/// One RK4 step of the Riccati flow. Steps that leave the physical set are
/// retried as two half steps, recursively.
Eigen::MatrixXd step_covariance(const Eigen::MatrixXd& A, const CouplingModel& coupling, bool probe_on, double dt,
                                const CovarianceStepOptions& options = {});

/// Exact free rotation S A S^T with S = exp(-D t).
Eigen::MatrixXd rotate_covariance(const Eigen::MatrixXd& A, const Eigen::VectorXd& omega, double t);

/// True if A + (i/2) Omega is positive semidefinite up to the tolerance.
bool is_physical(const Eigen::MatrixXd& A, double tolerance);

/// Exponential Euler-Maruyama step of dR = -D R dt + A m dW:
/// R' = exp(-D dt) R + A m dW, with one N(0, dt) increment per pixel in the
/// p slots of dW and A taken at the start of the step.
Eigen::VectorXd step_means(const Eigen::VectorXd& R, const Eigen::MatrixXd& A, const CouplingModel& coupling,
                           bool probe_on, const FeedbackConfig& feedback, double dt, std::mt19937_64& rng);

/// Same update with a precomputed drift propagator and x columns of A.
void step_means_inplace(Eigen::VectorXd& R, const Eigen::MatrixXd& propagator, const Eigen::MatrixXd& A_x_cols,
                        const Eigen::MatrixXd& m_compact, double dt, std::mt19937_64& rng, Eigen::VectorXd& scratch);

/// Columns x_1, x_2, ... of A (2n x n).
Eigen::MatrixXd x_columns(const Eigen::MatrixXd& A);

/// Lab quadratures to the fixed frame: x0 = x cos wt - p sin wt,
/// p0 = x sin wt + p cos wt, per mode.
GaussianState rotate_to_comoving(const GaussianState& state, const Eigen::VectorXd& omega, double t);
Eigen::MatrixXd comoving_rotation(const Eigen::VectorXd& omega, double t);

}  // namespace becsq
