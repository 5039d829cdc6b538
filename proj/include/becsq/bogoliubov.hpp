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

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "becsq/meanfield.hpp"

namespace becsq {

enum class Parity { Even, Odd };

/// One Bogoliubov excitation: L+ f- = omega f+, L- f+ = omega f-, with
/// L(+/-) = H1 - mu + (2 +/- 1) g1d n0 and the normalization int f+ f- dx = 1.
struct BdGMode {
  int index = 0;  // 1-based, ascending in omega
  double omega = 0.0;
  Eigen::VectorXd f_plus;
  Eigen::VectorXd f_minus;
  Parity parity = Parity::Even;

  /// Bogoliubov amplitudes u = (f+ + f-)/2, v = (f+ - f-)/2.
  Eigen::VectorXd u() const { return 0.5 * (f_plus + f_minus); }
  Eigen::VectorXd v() const { return 0.5 * (f_plus - f_minus); }
};

class ModeBasis {
 public:
  ModeBasis(CondensateGroundState ground_state, std::vector<BdGMode> modes, std::vector<std::string> warnings = {});

  const CondensateGroundState& ground_state() const { return ground_state_; }
  const Grid& grid() const { return ground_state_.grid; }
  int size() const { return static_cast<int>(modes_.size()); }
  /// 1-based access, matching the mode labels used everywhere else.
  const BdGMode& mode(int j) const { return modes_.at(static_cast<std::size_t>(j - 1)); }
  const std::vector<BdGMode>& modes() const { return modes_; }
  Eigen::VectorXd omegas() const;
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Keeps modes 1..n.
  ModeBasis truncated(int n) const;

 private:
  CondensateGroundState ground_state_;
  std::vector<BdGMode> modes_;
  std::vector<std::string> warnings_;
};

struct BdgOptions {
  /// Largest |eigenvalue| of L- (trap units) accepted for the condensate
  /// zero mode.
  double zero_mode_tolerance = 1e-6;
  int warn_above_modes = 20;
};

/// Lowest n_modes positive-frequency solutions, via the symmetric form
/// L-^(1/2) L+ L-^(1/2) z = omega^2 z in each parity sector, with the
/// condensate direction projected out of L-.
ModeBasis solve_bdg(const CondensateGroundState& gs, int n_modes, const BdgOptions& options = {});

/// Same modes from the non-symmetric 2x2 block eigenproblem. Slow; used to
/// cross-check solve_bdg.
ModeBasis solve_bdg_block(const CondensateGroundState& gs, int n_modes, const BdgOptions& options = {});

/// Dense L+ and L- on the full grid.
Eigen::MatrixXd bdg_operator_plus(const CondensateGroundState& gs);
Eigen::MatrixXd bdg_operator_minus(const CondensateGroundState& gs);

}  // namespace becsq
