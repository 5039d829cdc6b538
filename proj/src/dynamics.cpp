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

#include "becsq/dynamics.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace becsq {

Eigen::MatrixXd feedback_drift(const Eigen::VectorXd& omega, const FeedbackConfig& feedback) {
  Eigen::MatrixXd d = rotation_drift(omega);
  if (feedback.enabled()) {
    if (feedback.target_mode > omega.size()) throw std::invalid_argument("feedback: target mode not retained");
    const int j = feedback.target_mode - 1;
    d(2 * j + 1, 2 * j + 1) = 2.0 * omega(j);
  }
  return d;
}

Eigen::Matrix2d critically_damped_propagator(double omega, double t) {
  const double wt = omega * t;
  Eigen::Matrix2d p;
  p << 1.0 + wt, wt, -wt, 1.0 - wt;
  return std::exp(-wt) * p;
}

Eigen::MatrixXd drift_propagator(const Eigen::VectorXd& omega, const FeedbackConfig& feedback, double t) {
  const int n = static_cast<int>(omega.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    if (feedback.target_mode == j + 1) {
      p.block<2, 2>(2 * j, 2 * j) = critically_damped_propagator(omega(j), t);
    } else {
      const double c = std::cos(omega(j) * t), s = std::sin(omega(j) * t);
      p.block<2, 2>(2 * j, 2 * j) << c, s, -s, c;
    }
  }
  return p;
}

Eigen::MatrixXd riccati_rhs(const Eigen::MatrixXd& A, const CouplingModel& coupling, bool probe_on) {
  const Eigen::MatrixXd da = coupling.D * A;
  Eigen::MatrixXd r = -da - da.transpose();
  if (probe_on && coupling.probing()) r += coupling.E - A * coupling.M * A;
  return r;
}

bool is_physical(const Eigen::MatrixXd& A, double tolerance) {
  const int n = static_cast<int>(A.rows()) / 2;
  Eigen::MatrixXcd h = A.cast<std::complex<double>>();
  h += std::complex<double>(0.0, 0.5) * symplectic_form(n).cast<std::complex<double>>();
  h.diagonal().array() += tolerance;
  Eigen::LLT<Eigen::MatrixXcd> llt(h);
  return llt.info() == Eigen::Success;
}

namespace {

Eigen::MatrixXd rk4(const Eigen::MatrixXd& A, const CouplingModel& coupling, bool on, double dt) {
  const Eigen::MatrixXd k1 = riccati_rhs(A, coupling, on);
  const Eigen::MatrixXd k2 = riccati_rhs(A + 0.5 * dt * k1, coupling, on);
  const Eigen::MatrixXd k3 = riccati_rhs(A + 0.5 * dt * k2, coupling, on);
  const Eigen::MatrixXd k4 = riccati_rhs(A + dt * k3, coupling, on);
  Eigen::MatrixXd out = A + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd step_recursive(const Eigen::MatrixXd& A, const CouplingModel& coupling, bool on, double dt,
                               const CovarianceStepOptions& options, int depth) {
  Eigen::MatrixXd out = rk4(A, coupling, on, dt);
  if (out.allFinite() && is_physical(out, options.physicality_tolerance)) return out;
  if (depth >= options.max_halvings) {
    throw std::runtime_error("step_covariance: covariance left the physical set after " + std::to_string(depth) +
                             " halvings (dt = " + std::to_string(dt) + ")");
  }
  const Eigen::MatrixXd half = step_recursive(A, coupling, on, 0.5 * dt, options, depth + 1);
  return step_recursive(half, coupling, on, 0.5 * dt, options, depth + 1);
}

}  // namespace

Eigen::MatrixXd step_covariance(const Eigen::MatrixXd& A, const CouplingModel& coupling, bool probe_on, double dt,
                                const CovarianceStepOptions& options) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_covariance: dt must be positive");
  return step_recursive(A, coupling, probe_on, dt, options, 0);
}

Eigen::MatrixXd rotate_covariance(const Eigen::MatrixXd& A, const Eigen::VectorXd& omega, double t) {
  const Eigen::MatrixXd s = drift_propagator(omega, {}, t);
  Eigen::MatrixXd out = s * A * s.transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd x_columns(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows()) / 2;
  Eigen::MatrixXd out(A.rows(), n);
  for (int j = 0; j < n; ++j) out.col(j) = A.col(2 * j);
  return out;
}

void step_means_inplace(Eigen::VectorXd& R, const Eigen::MatrixXd& propagator, const Eigen::MatrixXd& A_x_cols,
                        const Eigen::MatrixXd& m_compact, double dt, std::mt19937_64& rng, Eigen::VectorXd& scratch) {
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  scratch.resize(m_compact.cols());
  for (Eigen::Index d = 0; d < scratch.size(); ++d) scratch(d) = normal(rng);
  R = propagator * R + A_x_cols * (m_compact * scratch);
}

Eigen::VectorXd step_means(const Eigen::VectorXd& R, const Eigen::MatrixXd& A, const CouplingModel& coupling,
                           bool probe_on, const FeedbackConfig& feedback, double dt, std::mt19937_64& rng) {
  const Eigen::MatrixXd p = drift_propagator(coupling.omega, feedback, dt);
  if (!probe_on || !coupling.probing()) return p * R;
  Eigen::VectorXd out = R;
  Eigen::VectorXd scratch;
  step_means_inplace(out, p, x_columns(A), coupling.m_compact, dt, rng, scratch);
  return out;
}

Eigen::MatrixXd comoving_rotation(const Eigen::VectorXd& omega, double t) {
  const int n = static_cast<int>(omega.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    const double c = std::cos(omega(j) * t), s = std::sin(omega(j) * t);
    r.block<2, 2>(2 * j, 2 * j) << c, -s, s, c;
  }
  return r;
}

GaussianState rotate_to_comoving(const GaussianState& state, const Eigen::VectorXd& omega, double t) {
  const Eigen::MatrixXd r = comoving_rotation(omega, t);
  GaussianState out;
  out.R = r * state.R;
  out.A = r * state.A * r.transpose();
  out.A = 0.5 * (out.A + out.A.transpose()).eval();
  out.t = state.t;
  return out;
}

}  // namespace becsq
