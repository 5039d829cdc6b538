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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "becsq/grid.hpp"
#include "becsq/units.hpp"

namespace becsq {

/// Raised when an iterative solver stops short of its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (final residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct TrapConfig {
  double atom_number = 1000.0;
  double omega_perp_ratio = 100.0;  // omega_perp / omega_x
  /// Exactly one of g1d (per-atom 1D coupling, trap units) or mu_target
  /// (chemical potential in hbar omega_x) selects the interaction strength.
  std::optional<double> g1d;
  std::optional<double> mu_target;
  /// Physical scale, only used to convert optical lengths into l_x.
  double omega_x_hz = 150.0;
  double mass_amu = units::kRb87MassAmu;

  void validate() const;
  double length_scale_m() const { return units::oscillator_length_m(mass_amu, omega_x_hz); }
  /// l_perp / l_x.
  double perp_length() const;
};

struct GpeOptions {
  int stencil_order = 4;           // 2, 4 or 6
  double imaginary_dt = 1.0;       // implicit Euler step in imaginary time
  int max_imaginary_steps = 5000;
  double imaginary_tolerance = 1e-7;
  int max_newton_steps = 40;
  double residual_tolerance = 1e-8;
  double mu_tolerance = 1e-6;
  int max_bisection_steps = 200;
};

struct CondensateGroundState {
  Grid grid;
  Eigen::VectorXd f0;  // real, non-negative, even, unit L2 norm
  double mu = 0.0;
  double g1d = 0.0;    // per-atom coupling; n0 = N f0^2
  double atom_number = 0.0;
  double residual = 0.0;
  int stencil_order = 4;
  std::vector<std::string> warnings;

  Eigen::VectorXd n0() const { return atom_number * f0.array().square().matrix(); }
  /// g1d * n0(x): the mean-field potential.
  Eigen::VectorXd interaction_potential() const { return g1d * n0(); }
};

/// -1/2 d^2/dx^2 + x^2/2 with a centred finite-difference stencil of the given
/// order and zero (hard-wall) values outside the grid.
Eigen::SparseMatrix<double> single_particle_hamiltonian(const Grid& grid, int stencil_order = 4);

/// Ground state at a fixed per-atom coupling g1d. `guess` warm-starts the solver.
CondensateGroundState solve_gpe_fixed_coupling(double g1d, double atom_number, const Grid& grid,
                                               const GpeOptions& options = {},
                                               const Eigen::VectorXd* guess = nullptr);

/// Ground state for a trap configuration; with mu_target set, g1d is found by
/// bisection so that the chemical potential matches.
CondensateGroundState solve_gpe_ground_state(const TrapConfig& trap, const Grid& grid,
                                             const GpeOptions& options = {});

/// L2 norm of [H1 + g1d n0 - mu] f0.
double gpe_residual(const CondensateGroundState& gs);

/// <f0| H1 + g1d n0 |f0>.
double chemical_potential_expectation(const CondensateGroundState& gs);

/// Box that keeps the condensate density negligible at the walls, keeping dx
/// at or below 1/40 l_x (so l_x/10 pixels are 4 cells).
Grid default_grid(double mu_estimate);

}  // namespace becsq
