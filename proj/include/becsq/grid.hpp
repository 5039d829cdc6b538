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

/// Uniform cell-centred grid on [-x_max, x_max]. Point i sits at the centre of
/// cell [x_max * (2i/n - 1), x_max * (2(i+1)/n - 1)], so the grid is symmetric
/// under i -> n-1-i and every cell edge is a candidate pixel boundary.
class Grid {
 public:
  Grid(double x_max, int n_points);

  double x_min() const { return -x_max_; }
  double x_max() const { return x_max_; }
  int size() const { return n_; }
  double dx() const { return dx_; }
  double x(int i) const { return x_(i); }
  const Eigen::VectorXd& points() const { return x_; }
  int mirror(int i) const { return n_ - 1 - i; }

  double integrate(const Eigen::VectorXd& f) const { return dx_ * f.sum(); }
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return dx_ * a.dot(b); }
  double norm(const Eigen::VectorXd& f) const;

  /// Integral over [a, b] treating f as constant on each cell (partial cells
  /// weighted by overlap). Summing over a tiling of [a, b] telescopes exactly.
  double integrate_interval(const Eigen::VectorXd& f, double a, double b) const;

  /// Samples of f(-x).
  Eigen::VectorXd reflect(const Eigen::VectorXd& f) const { return f.reverse(); }

 private:
  double x_max_;
  int n_;
  double dx_;
  Eigen::VectorXd x_;
};

}  // namespace becsq
