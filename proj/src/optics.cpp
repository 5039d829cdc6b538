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

#include "becsq/optics.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/FFT>

namespace becsq {

void DetectorArray::validate() const {
  if (!(length > 0.0) || !(pixel_width > 0.0)) throw std::invalid_argument("detector: lengths must be positive");
  const double ratio = length / pixel_width;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw std::invalid_argument("detector: length " + std::to_string(length) + " is not a whole number of pixels of width " +
                                std::to_string(pixel_width));
  }
}

int DetectorArray::n_pixels() const { return static_cast<int>(std::lround(length / pixel_width)); }

double DetectorArray::edge(int d) const { return -0.5 * length + d * pixel_width; }

double resolution_length(double perp_length, double wavelength_m, double length_scale_m) {
  if (!(perp_length > 0.0) || !(wavelength_m > 0.0) || !(length_scale_m > 0.0)) {
    throw std::invalid_argument("resolution_length: arguments must be positive");
  }
  return std::sqrt(perp_length * wavelength_m / length_scale_m);
}

MeasurementKernel::MeasurementKernel(const Grid& grid, double resolution_length, double alpha)
    : n_(grid.size()), alpha_(alpha), resolution_length_(resolution_length), multiplier_(grid.size()) {
  if (resolution_length < 0.0 || !(alpha > 0.0)) throw std::invalid_argument("kernel: need l_R >= 0 and alpha > 0");
  if (resolution_length > 0.0 && grid.dx() > 0.5 * resolution_length) {
    throw std::invalid_argument("kernel: grid spacing " + std::to_string(grid.dx()) + " does not resolve l_R = " +
                                std::to_string(resolution_length) + " (need dx <= l_R / 2)");
  }
  const double dk = 2.0 * std::numbers::pi / (n_ * grid.dx());
  for (int i = 0; i < n_; ++i) {
    const int m = i <= n_ / 2 ? i : i - n_;
    multiplier_(i) = transfer(m * dk);
  }
}

double MeasurementKernel::transfer(double k) const {
  const double a = alpha_ * resolution_length_ * k;
  return std::exp(-(a * a * a * a) / (64.0 * std::numbers::pi * std::numbers::pi));
}

Eigen::VectorXd MeasurementKernel::convolve(const Eigen::VectorXd& field) const {
  if (field.size() != n_) throw std::invalid_argument("kernel: field size does not match the grid");
  if (resolution_length_ == 0.0) return field;
  Eigen::FFT<double> fft;
  std::vector<double> in(field.data(), field.data() + n_);
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, in);
  for (int i = 0; i < n_; ++i) spectrum[i] *= multiplier_(i);
  std::vector<double> out;
  fft.inv(out, spectrum);
  return Eigen::Map<Eigen::VectorXd>(out.data(), n_);
}

namespace {

std::vector<Eigen::VectorXd> density_profiles(const ModeBasis& basis) {
  const Eigen::VectorXd& f0 = basis.ground_state().f0;
  std::vector<Eigen::VectorXd> g;
  for (const auto& mode : basis.modes()) g.push_back(f0.cwiseProduct(mode.f_minus));
  return g;
}

}  // namespace

Eigen::MatrixXd pixel_overlaps(const ModeBasis& basis, const DetectorArray& detector, const MeasurementKernel& kernel) {
  detector.validate();
  const Grid& grid = basis.grid();
  if (0.5 * detector.length > grid.x_max() + 1e-12) {
    throw std::invalid_argument("detector: array extends beyond the grid");
  }
  const int np = detector.n_pixels();
  const auto profiles = density_profiles(basis);
  Eigen::MatrixXd out(basis.size(), np);
  for (int j = 0; j < basis.size(); ++j) {
    const Eigen::VectorXd smoothed = kernel.convolve(profiles[j]);
    for (int d = 0; d < np; ++d) out(j, d) = grid.integrate_interval(smoothed, detector.edge(d), detector.edge(d + 1));
  }
  return out;
}

Eigen::MatrixXd mode_overlaps(const ModeBasis& basis, const MeasurementKernel& kernel) {
  const auto profiles = density_profiles(basis);
  const int n = basis.size();
  std::vector<Eigen::VectorXd> smoothed;
  for (const auto& g : profiles) smoothed.push_back(kernel.convolve(g));
  Eigen::MatrixXd out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) out(j, k) = basis.grid().inner(profiles[j], smoothed[k]);
  }
  return 0.5 * (out + out.transpose());
}

OverlapTables compute_overlaps(const ModeBasis& basis, const DetectorArray& detector, double resolution_length) {
  OverlapTables t;
  t.detector = detector;
  t.resolution_length = resolution_length;
  t.omega = basis.omegas();
  t.pixel = pixel_overlaps(basis, detector, MeasurementKernel(basis.grid(), resolution_length, 1.0));
  t.mode = mode_overlaps(basis, MeasurementKernel(basis.grid(), resolution_length, std::pow(2.0, 0.25)));
  return t;
}

Eigen::MatrixXd rotation_drift(const Eigen::VectorXd& omega) {
  const int n = static_cast<int>(omega.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    d(2 * j, 2 * j + 1) = -omega(j);
    d(2 * j + 1, 2 * j) = omega(j);
  }
  return d;
}

CouplingModel build_coupling(const OverlapTables& overlaps, double kappa_sq, double coupling_length) {
  if (kappa_sq < 0.0) throw std::invalid_argument("coupling: kappa^2 must be non-negative");
  if (!(coupling_length > 0.0)) throw std::invalid_argument("coupling: coupling length must be positive");
  const int n = static_cast<int>(overlaps.omega.size());
  const int np = static_cast<int>(overlaps.pixel.cols());
  const double kappa = -std::sqrt(kappa_sq);

  CouplingModel c;
  c.kappa_sq = kappa_sq;
  c.coupling_length = coupling_length;
  c.pixel_width = overlaps.detector.pixel_width;
  c.omega = overlaps.omega;
  c.D = rotation_drift(c.omega);
  c.m_compact = -std::sqrt(coupling_length / c.pixel_width) * 2.0 * kappa * overlaps.pixel;
  c.m = Eigen::MatrixXd::Zero(2 * n, 2 * np);
  c.M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  c.E = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  const Eigen::MatrixXd mm = c.m_compact * c.m_compact.transpose();
  for (int j = 0; j < n; ++j) {
    for (int d = 0; d < np; ++d) c.m(2 * j, 2 * d + 1) = c.m_compact(j, d);
    for (int k = 0; k < n; ++k) {
      c.M(2 * j, 2 * k) = mm(j, k);
      c.E(2 * j + 1, 2 * k + 1) = kappa_sq * coupling_length * overlaps.mode(j, k);
    }
  }
  c.nu = kappa_sq * coupling_length * overlaps.mode.diagonal();
  c.nu_bar = c.nu.cwiseQuotient(c.omega);
  return c;
}

double kernel_structure_mismatch(const CouplingModel& coupling) {
  const int n = coupling.n_modes();
  Eigen::MatrixXd mx(n, n), ep(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      mx(j, k) = 0.25 * coupling.M(2 * j, 2 * k);
      ep(j, k) = coupling.E(2 * j + 1, 2 * k + 1);
    }
  }
  const double scale = ep.norm();
  return scale > 0.0 ? (mx - ep).norm() / scale : 0.0;
}

}  // namespace becsq
