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

#include "becsq/bogoliubov.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace becsq {
namespace {

// Reflection x -> -x commutes with every operator here, so each problem splits
// into an even and an odd sector of half the size. Sector basis vector k is
// (e_k +/- e_{n-1-k}) / sqrt(2), which keeps parity exact.
Eigen::MatrixXd sector_matrix(const Eigen::MatrixXd& op, Parity parity) {
  const int n = static_cast<int>(op.rows());
  const int h = n / 2;
  const double sign = parity == Parity::Even ? 1.0 : -1.0;
  Eigen::MatrixXd s(h, h);
  for (int l = 0; l < h; ++l) {
    for (int k = 0; k < h; ++k) s(k, l) = op(k, l) + sign * op(k, n - 1 - l);
  }
  return 0.5 * (s + s.transpose());
}

Eigen::VectorXd to_sector(const Eigen::VectorXd& f, Parity parity) {
  const int n = static_cast<int>(f.size());
  const double sign = parity == Parity::Even ? 1.0 : -1.0;
  Eigen::VectorXd y(n / 2);
  for (int k = 0; k < n / 2; ++k) y(k) = (f(k) + sign * f(n - 1 - k)) / std::numbers::sqrt2;
  return y;
}

Eigen::VectorXd from_sector(const Eigen::VectorXd& y, Parity parity) {
  const int h = static_cast<int>(y.size());
  const double sign = parity == Parity::Even ? 1.0 : -1.0;
  Eigen::VectorXd f(2 * h);
  for (int k = 0; k < h; ++k) {
    f(k) = y(k) / std::numbers::sqrt2;
    f(2 * h - 1 - k) = sign * y(k) / std::numbers::sqrt2;
  }
  return f;
}

struct SectorMode {
  double omega;
  Eigen::VectorXd f_plus;   // sector coordinates
  Eigen::VectorXd f_minus;
};

void normalize_pair(double dx, Eigen::VectorXd& f_plus, Eigen::VectorXd& f_minus) {
  const double norm = dx * f_plus.dot(f_minus);
  if (!(norm > 0.0)) throw std::runtime_error("bdg: mode has non-positive norm int f+ f- dx");
  const double scale = 1.0 / std::sqrt(norm);
  f_plus *= scale;
  f_minus *= scale;
}

std::vector<SectorMode> solve_sector_decoupled(const Eigen::MatrixXd& lp, const Eigen::MatrixXd& lm,
                                               const Eigen::VectorXd* condensate, int n_wanted, double dx,
                                               const BdgOptions& options) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> lm_eig(lm);
  if (lm_eig.info() != Eigen::Success) throw std::runtime_error("bdg: eigensolver failed on L-");
  const Eigen::VectorXd& lambda = lm_eig.eigenvalues();
  const Eigen::MatrixXd& basis = lm_eig.eigenvectors();

  int zero_index = -1;
  if (condensate != nullptr) {
    (basis.transpose() * *condensate).cwiseAbs().maxCoeff(&zero_index);
    if (std::abs(lambda(zero_index)) > options.zero_mode_tolerance) {
      throw std::runtime_error("bdg: L- has no zero mode along f0 (eigenvalue " + std::to_string(lambda(zero_index)) +
                               "); the ground state is not converged");
    }
  }

  std::vector<int> kept;
  for (int i = 0; i < lambda.size(); ++i) {
    if (i == zero_index) continue;
    if (lambda(i) <= 0.0) {
      throw std::runtime_error("bdg: L- has a non-positive eigenvalue " + std::to_string(lambda(i)) +
                               " off the condensate direction (dynamical instability)");
    }
    kept.push_back(i);
  }
  const int m = static_cast<int>(kept.size());
  Eigen::MatrixXd v(lm.rows(), m);
  Eigen::VectorXd sqrt_lambda(m);
  for (int c = 0; c < m; ++c) {
    v.col(c) = basis.col(kept[c]);
    sqrt_lambda(c) = std::sqrt(lambda(kept[c]));
  }

  Eigen::MatrixXd w = sqrt_lambda.asDiagonal() * (v.transpose() * lp * v) * sqrt_lambda.asDiagonal();
  w = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> w_eig(w);
  if (w_eig.info() != Eigen::Success) throw std::runtime_error("bdg: eigensolver failed on the product form");

  std::vector<SectorMode> out;
  for (int i = 0; i < std::min(n_wanted, m); ++i) {
    const double omega_sq = w_eig.eigenvalues()(i);
    if (omega_sq <= 0.0) {
      throw std::runtime_error("bdg: squared frequency " + std::to_string(omega_sq) +
                               " <= 0 (complex BdG eigenvalue; ground state not converged)");
    }
    const double omega = std::sqrt(omega_sq);
    Eigen::VectorXd f_minus = v * (sqrt_lambda.asDiagonal() * w_eig.eigenvectors().col(i));
    // L+ f- carries the f0 component that the projected form drops.
    Eigen::VectorXd f_plus = lp * f_minus / omega;
    normalize_pair(dx, f_plus, f_minus);
    out.push_back({omega, std::move(f_plus), std::move(f_minus)});
  }
  return out;
}

std::vector<SectorMode> solve_sector_block(const Eigen::MatrixXd& lp, const Eigen::MatrixXd& lm, int n_wanted,
                                           double dx) {
  const int h = static_cast<int>(lp.rows());
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * h, 2 * h);
  block.topRightCorner(h, h) = lp;
  block.bottomLeftCorner(h, h) = lm;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(block);
  if (solver.info() != Eigen::Success) throw std::runtime_error("bdg: block eigensolver failed");

  std::vector<std::pair<double, int>> positive;
  const auto& values = solver.eigenvalues();
  for (int i = 0; i < values.size(); ++i) {
    if (values(i).real() > 1e-4 && std::abs(values(i).imag()) < 1e-6 * std::max(1.0, values(i).real())) {
      positive.emplace_back(values(i).real(), i);
    }
  }
  std::sort(positive.begin(), positive.end());

  std::vector<SectorMode> out;
  for (int k = 0; k < std::min<int>(n_wanted, static_cast<int>(positive.size())); ++k) {
    const int i = positive[k].second;
    Eigen::VectorXcd vec = solver.eigenvectors().col(i);
    Eigen::Index pivot = 0;
    vec.cwiseAbs().maxCoeff(&pivot);
    vec *= std::conj(vec(pivot)) / std::abs(vec(pivot));
    Eigen::VectorXd f_plus = vec.head(h).real();
    Eigen::VectorXd f_minus = vec.tail(h).real();
    normalize_pair(dx, f_plus, f_minus);
    out.push_back({positive[k].first, std::move(f_plus), std::move(f_minus)});
  }
  return out;
}

void fix_sign(BdGMode& mode) {
  const double half = 0.5 * mode.f_minus.cwiseAbs().maxCoeff();
  for (int i = 0; i < mode.f_minus.size(); ++i) {
    if (std::abs(mode.f_minus(i)) > half) {
      if (mode.f_minus(i) < 0.0) {
        mode.f_minus = -mode.f_minus;
        mode.f_plus = -mode.f_plus;
      }
      return;
    }
  }
}

std::vector<std::string> resolution_warnings(const Grid& grid, const std::vector<BdGMode>& modes,
                                             const BdgOptions& options) {
  std::vector<std::string> warnings;
  if (static_cast<int>(modes.size()) > options.warn_above_modes) {
    warnings.push_back("more than " + std::to_string(options.warn_above_modes) +
                       " modes requested; high modes are suppressed by the measurement kernel");
  }
  if (modes.empty()) return warnings;
  const auto& top = modes.back();
  const double threshold = 1e-3 * top.f_minus.cwiseAbs().maxCoeff();
  int first = -1, last = -1, crossings = 0;
  for (int i = 0; i < grid.size(); ++i) {
    if (std::abs(top.f_minus(i)) < threshold) continue;
    if (first < 0) first = i;
    if (last >= 0 && (top.f_minus(i) > 0.0) != (top.f_minus(last) > 0.0)) ++crossings;
    last = i;
  }
  if (crossings > 0) {
    const double points_per_wavelength = 2.0 * (last - first) / static_cast<double>(crossings);
    if (points_per_wavelength < 16.0) {
      warnings.push_back("grid resolves mode " + std::to_string(top.index) + " with only " +
                         std::to_string(points_per_wavelength) + " points per oscillation (< 16)");
    }
  }
  return warnings;
}

template <typename SectorSolver>
ModeBasis assemble(const CondensateGroundState& gs, int n_modes, const BdgOptions& options, SectorSolver&& solve) {
  if (n_modes < 1) throw std::invalid_argument("bdg: n_modes must be >= 1");
  const Eigen::MatrixXd lp = bdg_operator_plus(gs);
  const Eigen::MatrixXd lm = bdg_operator_minus(gs);
  const double dx = gs.grid.dx();

  std::vector<BdGMode> modes;
  for (Parity parity : {Parity::Even, Parity::Odd}) {
    const Eigen::MatrixXd lp_s = sector_matrix(lp, parity);
    const Eigen::MatrixXd lm_s = sector_matrix(lm, parity);
    Eigen::VectorXd f0_s = to_sector(gs.f0, Parity::Even);
    f0_s.normalize();
    const Eigen::VectorXd* condensate = parity == Parity::Even ? &f0_s : nullptr;
    for (auto& sm : solve(lp_s, lm_s, condensate, n_modes, dx)) {
      BdGMode mode;
      mode.omega = sm.omega;
      mode.parity = parity;
      mode.f_plus = from_sector(sm.f_plus, parity);
      mode.f_minus = from_sector(sm.f_minus, parity);
      modes.push_back(std::move(mode));
    }
  }
  std::sort(modes.begin(), modes.end(), [](const BdGMode& a, const BdGMode& b) { return a.omega < b.omega; });
  if (static_cast<int>(modes.size()) < n_modes) {
    throw std::runtime_error("bdg: grid supports only " + std::to_string(modes.size()) + " modes");
  }
  modes.resize(static_cast<std::size_t>(n_modes));
  for (int j = 0; j < n_modes; ++j) {
    modes[j].index = j + 1;
    fix_sign(modes[j]);
  }
  auto warnings = resolution_warnings(gs.grid, modes, options);
  return ModeBasis(gs, std::move(modes), std::move(warnings));
}

}  // namespace

ModeBasis::ModeBasis(CondensateGroundState ground_state, std::vector<BdGMode> modes, std::vector<std::string> warnings)
    : ground_state_(std::move(ground_state)), modes_(std::move(modes)), warnings_(std::move(warnings)) {}

Eigen::VectorXd ModeBasis::omegas() const {
  Eigen::VectorXd w(size());
  for (int j = 0; j < size(); ++j) w(j) = modes_[j].omega;
  return w;
}

ModeBasis ModeBasis::truncated(int n) const {
  if (n < 1 || n > size()) throw std::invalid_argument("mode basis: cannot truncate to " + std::to_string(n));
  return ModeBasis(ground_state_, std::vector<BdGMode>(modes_.begin(), modes_.begin() + n), warnings_);
}

Eigen::MatrixXd bdg_operator_plus(const CondensateGroundState& gs) {
  Eigen::MatrixXd op = Eigen::MatrixXd(single_particle_hamiltonian(gs.grid, gs.stencil_order));
  op.diagonal() += (3.0 * gs.interaction_potential().array() - gs.mu).matrix();
  return op;
}

Eigen::MatrixXd bdg_operator_minus(const CondensateGroundState& gs) {
  Eigen::MatrixXd op = Eigen::MatrixXd(single_particle_hamiltonian(gs.grid, gs.stencil_order));
  op.diagonal() += (gs.interaction_potential().array() - gs.mu).matrix();
  return op;
}

ModeBasis solve_bdg(const CondensateGroundState& gs, int n_modes, const BdgOptions& options) {
  return assemble(gs, n_modes, options,
                  [&](const Eigen::MatrixXd& lp, const Eigen::MatrixXd& lm, const Eigen::VectorXd* f0, int n,
                      double dx) { return solve_sector_decoupled(lp, lm, f0, n, dx, options); });
}

ModeBasis solve_bdg_block(const CondensateGroundState& gs, int n_modes, const BdgOptions& options) {
  return assemble(gs, n_modes, options,
                  [](const Eigen::MatrixXd& lp, const Eigen::MatrixXd& lm, const Eigen::VectorXd*, int n, double dx) {
                    return solve_sector_block(lp, lm, n, dx);
                  });
}

}  // namespace becsq
