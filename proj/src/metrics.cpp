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

#include "becsq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace becsq {
namespace {

struct SqrtPair {
  Eigen::MatrixXd root;
  Eigen::MatrixXd inverse_root;
};

SqrtPair matrix_sqrt(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (A + A.transpose()));
  if (eig.info() != Eigen::Success) throw std::runtime_error("williamson: eigensolver failed");
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("williamson: covariance matrix is not positive definite");
  }
  const Eigen::VectorXd s = eig.eigenvalues().cwiseSqrt();
  const Eigen::MatrixXd& v = eig.eigenvectors();
  return {v * s.asDiagonal() * v.transpose(), v * s.cwiseInverse().asDiagonal() * v.transpose()};
}

void check_modes(const std::vector<int>& modes, int n_modes) {
  for (int j : modes) {
    if (j < 1 || j > n_modes) throw std::invalid_argument("mode index " + std::to_string(j) + " out of range");
  }
}

double log_det_spd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw std::runtime_error("matrix is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double negativity_from_pt(const Eigen::MatrixXd& pt) {
  double e = 0.0;
  for (double nu : symplectic_eigenvalues(pt)) e += std::max(0.0, -std::log2(2.0 * nu));
  return e;
}

}  // namespace

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows()) / 2;
  const Eigen::MatrixXd root = matrix_sqrt(A).root;
  const Eigen::MatrixXd b = root * symplectic_form(n) * root;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b * b.transpose(), Eigen::EigenvaluesOnly);
  Eigen::VectorXd nu(n);
  for (int k = 0; k < n; ++k) {
    nu(k) = std::sqrt(std::max(0.0, 0.5 * (eig.eigenvalues()(2 * k) + eig.eigenvalues()(2 * k + 1))));
  }
  return nu;
}

double min_symplectic_eigenvalue(const Eigen::MatrixXd& A) { return symplectic_eigenvalues(A).minCoeff(); }

SymplecticSpectrum williamson(const Eigen::MatrixXd& A) {
  const int dim = static_cast<int>(A.rows());
  if (dim % 2 != 0 || A.cols() != dim) throw std::invalid_argument("williamson: need a square 2n x 2n matrix");
  const int n = dim / 2;
  const SqrtPair roots = matrix_sqrt(A);
  const Eigen::MatrixXd k = roots.inverse_root * symplectic_form(n) * roots.inverse_root;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k * k.transpose());

  // Eigenvalues of -K^2 are 1/nu^2 in degenerate pairs; each eigenspace is
  // K-invariant, so (u, -K u / kappa) pairs span it. Largest first gives
  // ascending nu.
  Eigen::MatrixXd o(dim, dim);
  Eigen::VectorXd nu(n);
  int filled = 0;
  for (int i = dim - 1; i >= 0 && filled < dim; --i) {
    Eigen::VectorXd u = eig.eigenvectors().col(i);
    for (int c = 0; c < filled; ++c) u -= o.col(c).dot(u) * o.col(c);
    const double norm = u.norm();
    if (norm < 0.5) continue;
    u /= norm;
    const double kappa = std::sqrt(std::max(eig.eigenvalues()(i), 0.0));
    Eigen::VectorXd v = -k * u / kappa;
    for (int c = 0; c < filled; ++c) v -= o.col(c).dot(v) * o.col(c);
    v -= u.dot(v) * u;
    v.normalize();
    o.col(filled) = u;
    o.col(filled + 1) = v;
    nu(filled / 2) = 1.0 / kappa;
    filled += 2;
  }
  if (filled != dim) throw std::runtime_error("williamson: failed to build a symplectic basis");

  Eigen::VectorXd scale(dim);
  for (int j = 0; j < n; ++j) scale(2 * j) = scale(2 * j + 1) = 1.0 / std::sqrt(nu(j));
  return {nu, roots.root * o * scale.asDiagonal()};
}

Eigen::MatrixXd reduce_modes(const Eigen::MatrixXd& A, const std::vector<int>& modes) {
  check_modes(modes, static_cast<int>(A.rows()) / 2);
  const int m = static_cast<int>(modes.size());
  Eigen::MatrixXd out(2 * m, 2 * m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) out.block<2, 2>(2 * a, 2 * b) = A.block<2, 2>(2 * (modes[a] - 1), 2 * (modes[b] - 1));
  }
  return out;
}

Eigen::VectorXd reduce_modes(const Eigen::VectorXd& R, const std::vector<int>& modes) {
  check_modes(modes, static_cast<int>(R.size()) / 2);
  Eigen::VectorXd out(2 * modes.size());
  for (std::size_t a = 0; a < modes.size(); ++a) out.segment<2>(2 * a) = R.segment<2>(2 * (modes[a] - 1));
  return out;
}

double log_negativity(const Eigen::MatrixXd& A, const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("log_negativity: both parts must be non-empty");
  for (int j : a) {
    if (std::find(b.begin(), b.end(), j) != b.end()) throw std::invalid_argument("log_negativity: parts overlap");
  }
  std::vector<int> modes = a;
  modes.insert(modes.end(), b.begin(), b.end());
  Eigen::MatrixXd pt = reduce_modes(A, modes);
  // Partial transpose of part b: p_k -> -p_k.
  for (std::size_t s = a.size(); s < modes.size(); ++s) {
    const int row = 2 * static_cast<int>(s) + 1;
    pt.row(row) *= -1.0;
    pt.col(row) *= -1.0;
  }
  return negativity_from_pt(pt);
}

double purity(const Eigen::MatrixXd& A, const std::vector<int>& modes) {
  if (modes.empty()) throw std::invalid_argument("purity: empty mode set");
  const Eigen::MatrixXd sub = reduce_modes(A, modes);
  const double n = static_cast<double>(modes.size());
  return std::exp(-n * std::log(2.0) - 0.5 * log_det_spd(sub));
}

double hellinger_distance(const Eigen::VectorXd& R1, const Eigen::MatrixXd& A1, const Eigen::VectorXd& R2,
                          const Eigen::MatrixXd& A2) {
  if (A1.rows() != A2.rows() || R1.size() != R2.size() || R1.size() != A1.rows()) {
    throw std::invalid_argument("hellinger_distance: dimension mismatch");
  }
  double log_c = 0.0;
  auto tilde = [&log_c](const Eigen::MatrixXd& A) {
    const auto w = williamson(A);
    Eigen::VectorXd diag(A.rows());
    for (int k = 0; k < w.nu.size(); ++k) {
      const double nu = std::max(w.nu(k), 0.5);
      diag(2 * k) = diag(2 * k + 1) = nu + std::sqrt(nu * nu - 0.25);
      log_c += std::log(std::sqrt(nu + 0.5) + std::sqrt(nu - 0.5));
    }
    return Eigen::MatrixXd(w.S * diag.asDiagonal() * w.S.transpose());
  };
  Eigen::MatrixXd sum = tilde(A1) + tilde(A2);
  sum = 0.5 * (sum + sum.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sum);
  if (llt.info() != Eigen::Success) throw std::runtime_error("hellinger_distance: singular covariance sum");
  const Eigen::VectorXd delta = R1 - R2;
  const double quad = delta.dot(llt.solve(delta));
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double overlap = std::exp(log_c - 0.5 * quad - 0.5 * log_det);
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

GaussianState hellinger_target_state(const GaussianState& state, const std::vector<std::pair<int, int>>& blocks) {
  const int n = state.n_modes();
  GaussianState out = GaussianState::vacuum(n);
  out.R = state.R;
  out.t = state.t;
  for (const auto& [j, k] : blocks) {
    if (j < 1 || j > n || k < 1 || k > n) throw std::invalid_argument("hellinger_target_state: block out of range");
    out.A.block<2, 2>(2 * (j - 1), 2 * (k - 1)) = state.A.block<2, 2>(2 * (j - 1), 2 * (k - 1));
    out.A.block<2, 2>(2 * (k - 1), 2 * (j - 1)) = state.A.block<2, 2>(2 * (k - 1), 2 * (j - 1));
  }
  Eigen::LLT<Eigen::MatrixXd> llt(out.A);
  if (llt.info() != Eigen::Success || min_symplectic_eigenvalue(out.A) < 0.5 - 1e-6) {
    throw std::invalid_argument("hellinger_target_state: target blocks give an unphysical covariance");
  }
  return out;
}

double qnd_variance(double nu, double probe_time) { return 0.5 / (1.0 + 2.0 * nu * probe_time); }

double overlap_beta(const Eigen::MatrixXd& mode_overlaps, int j, int k) {
  const double beta = std::abs(mode_overlaps(j - 1, k - 1)) /
                      std::sqrt(mode_overlaps(j - 1, j - 1) * mode_overlaps(k - 1, k - 1));
  if (!(beta < 1.0)) throw std::runtime_error("overlap_beta: beta >= 1 violates Cauchy-Schwarz");
  return beta;
}

double qnd_entanglement_asymptote(double beta) {
  if (beta < 0.0 || !(beta < 1.0)) throw std::invalid_argument("qnd_entanglement_asymptote: need 0 <= beta < 1");
  return std::log((1.0 + beta) / (1.0 - beta)) / std::log(4.0);
}

std::vector<double> qnd_entanglement_curve(const CouplingModel& coupling, int j, int k, double duty_cycle,
                                           const std::vector<double>& times) {
  const std::vector<int> pair{j, k};
  const Eigen::MatrixXd e = duty_cycle * reduce_modes(coupling.E, pair);
  const Eigen::MatrixXd m = duty_cycle * reduce_modes(coupling.M, pair);
  auto rhs = [&](const Eigen::MatrixXd& a) -> Eigen::MatrixXd { return e - a * m * a; };

  Eigen::MatrixXd a = 0.5 * Eigen::MatrixXd::Identity(4, 4);
  double t = 0.0;
  std::vector<double> out;
  for (double target : times) {
    if (target < t) throw std::invalid_argument("qnd_entanglement_curve: times must be ascending");
    while (t < target) {
      const double dt = std::min({target - t, 0.01, 0.2 / (a.norm() * m.norm() + 1e-300)});
      const Eigen::MatrixXd k1 = rhs(a);
      const Eigen::MatrixXd k2 = rhs(a + 0.5 * dt * k1);
      const Eigen::MatrixXd k3 = rhs(a + 0.5 * dt * k2);
      const Eigen::MatrixXd k4 = rhs(a + dt * k3);
      a += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      a = 0.5 * (a + a.transpose()).eval();
      t += dt;
    }
    out.push_back(log_negativity(a, {1}, {2}));
  }
  return out;
}

double noncondensate_population(const Eigen::VectorXd& R, const ModeBasis& basis) {
  if (R.size() != 2 * basis.size()) throw std::invalid_argument("noncondensate_population: size mismatch");
  double total = 0.0;
  for (int j = 1; j <= basis.size(); ++j) {
    const auto& mode = basis.mode(j);
    const double weight = basis.grid().integrate(mode.u().array().square().matrix() + mode.v().array().square().matrix());
    const double x = R(2 * (j - 1));
    const double p = R(2 * (j - 1) + 1);
    total += 0.5 * (x * x + p * p) * weight;
  }
  return total;
}

}  // namespace becsq
