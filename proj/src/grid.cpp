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

#include "becsq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace becsq {

Grid::Grid(double x_max, int n_points) : x_max_(x_max), n_(n_points) {
  if (!(x_max > 0.0)) throw std::invalid_argument("grid: x_max must be positive");
  if (n_points < 8 || n_points % 2 != 0) {
    throw std::invalid_argument("grid: n_points must be even and >= 8, got " + std::to_string(n_points));
  }
  dx_ = 2.0 * x_max / n_points;
  x_.resize(n_);
  for (int i = 0; i < n_; ++i) x_(i) = -x_max + (i + 0.5) * dx_;
  // Exact mirror symmetry, independent of rounding in the formula above.
  for (int i = 0; i < n_ / 2; ++i) x_(n_ - 1 - i) = -x_(i);
}

double Grid::norm(const Eigen::VectorXd& f) const { return std::sqrt(inner(f, f)); }

double Grid::integrate_interval(const Eigen::VectorXd& f, double a, double b) const {
  if (b < a) return -integrate_interval(f, b, a);
  a = std::max(a, -x_max_);
  b = std::min(b, x_max_);
  if (b <= a) return 0.0;
  const int first = std::clamp(static_cast<int>(std::floor((a + x_max_) / dx_)), 0, n_ - 1);
  const int last = std::clamp(static_cast<int>(std::ceil((b + x_max_) / dx_)) - 1, 0, n_ - 1);
  double sum = 0.0;
  for (int i = first; i <= last; ++i) {
    const double lo = -x_max_ + i * dx_;
    const double overlap = std::min(b, lo + dx_) - std::max(a, lo);
    if (overlap > 0.0) sum += overlap * f(i);
  }
  return sum;
}

}  // namespace becsq
