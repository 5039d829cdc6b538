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

#include "becsq/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace becsq {
namespace {

std::vector<double> second_derivative_stencil(int order) {
  switch (order) {
    case 2: return {-2.0, 1.0};
    case 4: return {-5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0};
    case 6: return {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
    default: throw std::invalid_argument("stencil order must be 2, 4 or 6");
  }
}

void symmetrize_even(Eigen::VectorXd& f) {
  const Eigen::VectorXd mirrored = f.reverse();
  f = 0.5 * (f + mirrored);
}

void normalize(const Grid& grid, Eigen::VectorXd& f) { f /= grid.norm(f); }

Eigen::VectorXd initial_guess(const Grid& grid, double g_total) {
  const double mu_tf = g_total > 0.0 ? std::pow(3.0 * g_total / (4.0 * std::numbers::sqrt2), 2.0 / 3.0) : 0.5;
  const double width = std::max(1.0, std::sqrt(2.0 * mu_tf) / 2.0);
  Eigen::VectorXd f = (-grid.points().array().square() / (2.0 * width * width)).exp().matrix();
  normalize(grid, f);
  return f;
}

struct Evaluation {
  double mu;
  double residual;
};

Evaluation evaluate(const Eigen::SparseMatrix<double>& h1, const Grid& grid, double g_total,
                    const Eigen::VectorXd& f) {
  const Eigen::VectorXd hf = h1 * f + g_total * (f.array().cube()).matrix();
  const double mu = grid.inner(f, hf);
  return {mu, grid.norm(hf - mu * f)};
}

}  // namespace

void TrapConfig::validate() const {
  if (!(atom_number > 0.0)) throw std::invalid_argument("trap: atom_number must be positive");
  if (!(omega_perp_ratio > 0.0)) throw std::invalid_argument("trap: omega_perp_ratio must be positive");
  if (g1d.has_value() == mu_target.has_value()) {
    throw std::invalid_argument("trap: set exactly one of g1d or mu_target");
  }
  if (g1d && *g1d < 0.0) throw std::invalid_argument("trap: negative g1d rejected");
  if (mu_target && !(*mu_target > 0.0)) throw std::invalid_argument("trap: mu_target must be positive");
  if (!(omega_x_hz > 0.0) || !(mass_amu > 0.0)) throw std::invalid_argument("trap: omega_x_hz and mass_amu must be positive");
}

double TrapConfig::perp_length() const { return 1.0 / std::sqrt(omega_perp_ratio); }

Eigen::SparseMatrix<double> single_particle_hamiltonian(const Grid& grid, int stencil_order) {
  const auto stencil = second_derivative_stencil(stencil_order);
  const int n = grid.size();
  const double scale = -0.5 / (grid.dx() * grid.dx());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(n) * (2 * stencil.size() - 1));
  for (int i = 0; i < n; ++i) {
    entries.emplace_back(i, i, scale * stencil[0] + 0.5 * grid.x(i) * grid.x(i));
    for (std::size_t k = 1; k < stencil.size(); ++k) {
      const int off = static_cast<int>(k);
      if (i + off < n) entries.emplace_back(i, i + off, scale * stencil[k]);
      if (i - off >= 0) entries.emplace_back(i, i - off, scale * stencil[k]);
    }
  }
  Eigen::SparseMatrix<double> h(n, n);
  h.setFromTriplets(entries.begin(), entries.end());
  return h;
}

CondensateGroundState solve_gpe_fixed_coupling(double g1d, double atom_number, const Grid& grid,
                                               const GpeOptions& options, const Eigen::VectorXd* guess) {
  if (g1d < 0.0) throw std::invalid_argument("gpe: negative g1d rejected");
  const int n = grid.size();
  const double g_total = g1d * atom_number;
  const Eigen::SparseMatrix<double> h1 = single_particle_hamiltonian(grid, options.stencil_order);

  Eigen::VectorXd f = (guess != nullptr && guess->size() == n) ? *guess : initial_guess(grid, g_total);
  symmetrize_even(f);
  normalize(grid, f);

  Eigen::SparseMatrix<double> identity(n, n);
  identity.setIdentity();

  // Imaginary-time relaxation: (1 + dtau H[f]) f' = f, renormalized.
  Evaluation eval = evaluate(h1, grid, g_total, f);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  for (int step = 0; step < options.max_imaginary_steps && eval.residual > options.imaginary_tolerance; ++step) {
    Eigen::SparseMatrix<double> op = h1;
    for (int i = 0; i < n; ++i) op.coeffRef(i, i) += g_total * f(i) * f(i);
    op = identity + options.imaginary_dt * op;
    ldlt.compute(op);
    if (ldlt.info() != Eigen::Success) throw ConvergenceError("gpe: imaginary-time factorization failed", eval.residual);
    f = ldlt.solve(f);
    symmetrize_even(f);
    normalize(grid, f);
    eval = evaluate(h1, grid, g_total, f);
  }

  // Newton on (f, mu) with the norm constraint as the extra row.
  double mu = eval.mu;
  double previous = std::numeric_limits<double>::infinity();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int step = 0; step < options.max_newton_steps; ++step) {
    const Eigen::VectorXd hf = h1 * f + g_total * f.array().cube().matrix();
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = -(hf - mu * f);
    rhs(n) = -0.5 * (grid.inner(f, f) - 1.0);
    const double current = rhs.norm() * std::sqrt(grid.dx());
    // Stop once roundoff dominates: quadratic convergence has stalled.
    if (current < 1e-14 || (current < 1e-10 && current > 0.5 * previous)) break;
    previous = current;

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(h1.nonZeros() + 3 * n);
    for (int k = 0; k < h1.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(h1, k); it; ++it) {
        entries.emplace_back(it.row(), it.col(), it.value());
      }
    }
    for (int i = 0; i < n; ++i) {
      entries.emplace_back(i, i, 3.0 * g_total * f(i) * f(i) - mu);
      entries.emplace_back(i, n, -f(i));
      entries.emplace_back(n, i, grid.dx() * f(i));
    }
    Eigen::SparseMatrix<double> jac(n + 1, n + 1);
    jac.setFromTriplets(entries.begin(), entries.end());
    jac.makeCompressed();
    lu.compute(jac);
    if (lu.info() != Eigen::Success) throw ConvergenceError("gpe: Newton factorization failed", eval.residual);
    const Eigen::VectorXd delta = lu.solve(rhs);
    f += delta.head(n);
    mu += delta(n);
    symmetrize_even(f);
  }
  normalize(grid, f);

  if (f.sum() < 0.0) f = -f;
  const double floor = 1e-10 * f.maxCoeff();
  for (int i = 0; i < n; ++i) {
    if (f(i) < 0.0) {
      if (f(i) < -floor) throw ConvergenceError("gpe: ground state changes sign (excited-state convergence)", eval.residual);
      f(i) = 0.0;
    }
  }
  normalize(grid, f);

  eval = evaluate(h1, grid, g_total, f);
  CondensateGroundState gs{grid, f, eval.mu, g1d, atom_number, eval.residual, options.stencil_order, {}};
  if (eval.residual > options.residual_tolerance) {
    throw ConvergenceError("gpe: did not reach residual tolerance", eval.residual);
  }
  return gs;
}

CondensateGroundState solve_gpe_ground_state(const TrapConfig& trap, const Grid& grid, const GpeOptions& options) {
  trap.validate();
  std::vector<std::string> warnings;
  if (trap.omega_perp_ratio < 10.0) {
    warnings.push_back("omega_perp/omega_x = " + std::to_string(trap.omega_perp_ratio) +
                       " is not >> 1; the 1D reduction is questionable");
  }

  if (trap.g1d) {
    auto gs = solve_gpe_fixed_coupling(*trap.g1d, trap.atom_number, grid, options);
    gs.warnings = std::move(warnings);
    return gs;
  }

  const double target = *trap.mu_target;
  const double tol = 0.1 * options.mu_tolerance;
  auto lo_state = solve_gpe_fixed_coupling(0.0, trap.atom_number, grid, options);
  if (std::abs(lo_state.mu - target) <= tol) {
    lo_state.warnings = std::move(warnings);
    return lo_state;
  }
  if (target < lo_state.mu) {
    throw std::invalid_argument("trap: mu_target " + std::to_string(target) +
                                " is below the noninteracting ground energy " + std::to_string(lo_state.mu));
  }

  double g_lo = 0.0;
  double g_hi = 4.0 * std::numbers::sqrt2 / 3.0 * std::pow(target, 1.5) / trap.atom_number;
  auto hi_state = solve_gpe_fixed_coupling(g_hi, trap.atom_number, grid, options, &lo_state.f0);
  for (int grow = 0; hi_state.mu < target; ++grow) {
    if (grow > 60) throw ConvergenceError("gpe: could not bracket mu_target", hi_state.mu - target);
    g_lo = g_hi;
    lo_state = std::move(hi_state);
    g_hi *= 2.0;
    hi_state = solve_gpe_fixed_coupling(g_hi, trap.atom_number, grid, options, &lo_state.f0);
  }

  CondensateGroundState best = hi_state;
  for (int step = 0; step < options.max_bisection_steps; ++step) {
    const double g_mid = 0.5 * (g_lo + g_hi);
    auto mid = solve_gpe_fixed_coupling(g_mid, trap.atom_number, grid, options, &best.f0);
    const bool below = mid.mu < target;
    if (std::abs(mid.mu - target) < std::abs(best.mu - target)) best = mid;
    if (std::abs(mid.mu - target) <= tol) break;
    (below ? g_lo : g_hi) = g_mid;
    if (g_hi - g_lo <= 1e-15 * g_hi) break;
  }
  if (std::abs(best.mu - target) > options.mu_tolerance) {
    throw ConvergenceError("gpe: bisection on g1d missed mu_target", best.mu - target);
  }
  best.warnings = std::move(warnings);
  return best;
}

double gpe_residual(const CondensateGroundState& gs) {
  const auto h1 = single_particle_hamiltonian(gs.grid, gs.stencil_order);
  const Eigen::VectorXd r = h1 * gs.f0 + (gs.interaction_potential().array() * gs.f0.array()).matrix() - gs.mu * gs.f0;
  return gs.grid.norm(r);
}

double chemical_potential_expectation(const CondensateGroundState& gs) {
  const auto h1 = single_particle_hamiltonian(gs.grid, gs.stencil_order);
  const Eigen::VectorXd hf = h1 * gs.f0 + (gs.interaction_potential().array() * gs.f0.array()).matrix();
  return gs.grid.inner(gs.f0, hf);
}

Grid default_grid(double mu_estimate) {
  const double radius = std::sqrt(2.0 * std::max(mu_estimate, 0.5));
  const double x_max = std::max(8.0, std::ceil(radius + 6.0));
  const int n = static_cast<int>(std::lround(x_max * 80.0));  // dx = 1/40
  return Grid(x_max, n);
}

}  // namespace becsq
