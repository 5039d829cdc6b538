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

#include <Eigen/Dense>

namespace becsq {

/// First moments R and covariance A over n modes, ordered x_1, p_1, x_2, p_2, ...
/// Vacuum has A = I/2.
struct GaussianState {
  Eigen::VectorXd R;
  Eigen::MatrixXd A;
  double t = 0.0;

  int n_modes() const { return static_cast<int>(R.size() / 2); }

  static GaussianState vacuum(int n_modes) {
    return {Eigen::VectorXd::Zero(2 * n_modes), 0.5 * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes), 0.0};
  }
};

/// Block-diagonal [[0, 1], [-1, 0]] per mode.
inline Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int j = 0; j < n_modes; ++j) {
    omega(2 * j, 2 * j + 1) = 1.0;
    omega(2 * j + 1, 2 * j) = -1.0;
  }
  return omega;
}

}  // namespace becsq
