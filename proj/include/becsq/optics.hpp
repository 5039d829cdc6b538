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

#include <vector>

#include <Eigen/Dense>

#include "becsq/bogoliubov.hpp"
#include "becsq/grid.hpp"

namespace becsq {

/// Row of equal homodyne pixels centred on the trap.
struct DetectorArray {
  double length = 10.0;       // l_L, in l_x
  double pixel_width = 0.1;   // l_D, in l_x

  void validate() const;
  int n_pixels() const;
  /// Left edge of pixel d (0-based); edge(n_pixels()) is the right end.
  double edge(int d) const;
};

/// l_R = sqrt(l_perp lambda), both lengths in l_x.
double resolution_length(double perp_length, double wavelength_m, double length_scale_m);

/// Convolution with K_alpha, the kernel whose Fourier transform is
/// exp(-(alpha l_R k)^4 / 64 pi^2). The transform is tabulated once for the
/// grid and applied by FFT with periodic wrap over the box.
class MeasurementKernel {
 public:
  MeasurementKernel(const Grid& grid, double resolution_length, double alpha);

  double alpha() const { return alpha_; }
  double resolution_length() const { return resolution_length_; }
  /// Fourier weight at wavenumber k.
  double transfer(double k) const;
  Eigen::VectorXd convolve(const Eigen::VectorXd& field) const;

 private:
  int n_;
  double alpha_;
  double resolution_length_;
  Eigen::VectorXd multiplier_;  // indexed like the FFT output
};

/// fbar_jd = int_d [K_1 * (f0 f_j^-)](x) dx; rows are modes, columns pixels.
Eigen::MatrixXd pixel_overlaps(const ModeBasis& basis, const DetectorArray& detector, const MeasurementKernel& kernel);

/// fbar2_jk = int int f0 f_j^-(x) K(x - x') f0 f_k^-(x') dx dx', with K = K_{2^(1/4)}.
Eigen::MatrixXd mode_overlaps(const ModeBasis& basis, const MeasurementKernel& kernel);

struct OverlapTables {
  DetectorArray detector;
  double resolution_length = 0.0;
  Eigen::VectorXd omega;
  Eigen::MatrixXd pixel;  // n_modes x n_pixels
  Eigen::MatrixXd mode;   // n_modes x n_modes
};

OverlapTables compute_overlaps(const ModeBasis& basis, const DetectorArray& detector, double resolution_length);

/// Drift, noise and measurement matrices for one probing strength. Quadratures
/// are ordered x_1, p_1, x_2, p_2, ...
struct CouplingModel {
  double kappa_sq = 0.0;         // internal rate (omega_x)
  double coupling_length = 0.0;  // length multiplying kappa^2 in m and E
  double pixel_width = 0.0;
  Eigen::VectorXd omega;
  Eigen::MatrixXd D;        // 2n x 2n
  Eigen::MatrixXd m;        // 2n x 2 n_pixels, nonzero only at (x_j, p_d)
  Eigen::MatrixXd m_compact;  // n x n_pixels: the (x_j, p_d) entries of m
  Eigen::MatrixXd M;        // m m^T
  Eigen::MatrixXd E;
  Eigen::VectorXd nu;       // squeezing rates kappa^2 l fbar2_jj
  Eigen::VectorXd nu_bar;   // nu / omega

  int n_modes() const { return static_cast<int>(omega.size()); }
  bool probing() const { return kappa_sq > 0.0; }
};

/// kappa = -sqrt(kappa_sq). coupling_length is the length scale l that enters
/// m = -sqrt(l / l_D) 2 kappa fbar and E = kappa^2 l fbar2.
CouplingModel build_coupling(const OverlapTables& overlaps, double kappa_sq, double coupling_length);

/// Relative Frobenius mismatch between the x-block of M / 4 and the p-block of
/// E. Nonzero because the two use different kernels and a finite detector.
double kernel_structure_mismatch(const CouplingModel& coupling);

/// Rotation blocks [[0, -w], [w, 0]] for the given frequencies.
Eigen::MatrixXd rotation_drift(const Eigen::VectorXd& omega);

}  // namespace becsq
