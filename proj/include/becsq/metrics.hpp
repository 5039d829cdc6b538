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

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "becsq/bogoliubov.hpp"
#include "becsq/gaussian_state.hpp"
#include "becsq/optics.hpp"

namespace becsq {

/// A = S diag(nu_1, nu_1, ..., nu_n, nu_n) S^T with S Omega S^T = Omega.
struct SymplecticSpectrum {
  Eigen::VectorXd nu;  // ascending
  Eigen::MatrixXd S;
};

SymplecticSpectrum williamson(const Eigen::MatrixXd& A);

/// Symplectic eigenvalues only (ascending); cheaper than williamson().
Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& A);
double min_symplectic_eigenvalue(const Eigen::MatrixXd& A);

/// Rows and columns of the listed modes (1-based), in the given order.
Eigen::MatrixXd reduce_modes(const Eigen::MatrixXd& A, const std::vector<int>& modes);
Eigen::VectorXd reduce_modes(const Eigen::VectorXd& R, const std::vector<int>& modes);

/// Logarithmic negativity between mode sets a and b (1-based, disjoint).
double log_negativity(const Eigen::MatrixXd& A, const std::vector<int>& a, const std::vector<int>& b);

/// 1 / (2^n sqrt(det A_sub)).
double purity(const Eigen::MatrixXd& A, const std::vector<int>& modes);

/// 1 - Tr(sqrt(rho_1) sqrt(rho_2)) for two Gaussian states.
double hellinger_distance(const Eigen::VectorXd& R1, const Eigen::MatrixXd& A1, const Eigen::VectorXd& R2,
                          const Eigen::MatrixXd& A2);

/// Same R; A keeps only the listed (j, k) blocks (and their transposes), with
/// vacuum everywhere else. Throws if the result is unphysical.
GaussianState hellinger_target_state(const GaussianState& state, const std::vector<std::pair<int, int>>& blocks);

/// 1 / (2 (1 + 2 nu tau)).
double qnd_variance(double nu, double probe_time);

/// |fbar2_jk| / sqrt(fbar2_jj fbar2_kk).
double overlap_beta(const Eigen::MatrixXd& mode_overlaps, int j, int k);

/// log_4((1 + beta) / (1 - beta)).
double qnd_entanglement_asymptote(double beta);

/// Negativity of modes j, k under the rotation-free two-mode flow
/// A' = E - A M A with E, M scaled by the duty cycle, from vacuum, sampled at
/// the requested (ascending) times.
std::vector<double> qnd_entanglement_curve(const CouplingModel& coupling, int j, int k, double duty_cycle,
                                           const std::vector<double>& times);

/// Coherent-excitation population sum_j |b_j|^2 int (u_j^2 + v_j^2) dx with
/// b_j = (x_j + i p_j) / sqrt(2).
double noncondensate_population(const Eigen::VectorXd& R, const ModeBasis& basis);

}  // namespace becsq
