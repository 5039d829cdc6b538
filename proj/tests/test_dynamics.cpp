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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "becsq/dynamics.hpp"
#include "becsq/metrics.hpp"
#include "becsq/simulate.hpp"

namespace becsq {
namespace {

// Two or three modes with a handful of pixels; E matches M / 4 exactly.
OverlapTables toy_overlaps(int n = 2, int np = 6) {
  OverlapTables t;
  t.detector.length = 0.6;
  t.detector.pixel_width = 0.1;
  t.omega = Eigen::VectorXd(n);
  for (int j = 0; j < n; ++j) t.omega(j) = 1.0 + 0.8137 * j + 0.05 * j * j;
  t.pixel = Eigen::MatrixXd(n, np);
  for (int j = 0; j < n; ++j) {
    for (int d = 0; d < np; ++d) t.pixel(j, d) = 0.1 * std::cos(0.7 * (j + 1) * (d - 2.5)) / (1.0 + j);
  }
  t.mode = t.pixel * t.pixel.transpose() / t.detector.pixel_width;
  return t;
}

Eigen::MatrixXd squeezed_thermal(double r, double nu, double angle) {
  Eigen::Matrix2d s;
  s << std::exp(-r), 0.0, 0.0, std::exp(r);
  Eigen::Matrix2d rot;
  rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return nu * rot * s * s.transpose() * rot.transpose();
}

TEST(Dynamics, FreeRotationKeepsVacuum) {
  const Eigen::VectorXd w = Eigen::Vector3d(1.0, 1.8, 2.7);
  const Eigen::MatrixXd vac = 0.5 * Eigen::MatrixXd::Identity(6, 6);
  EXPECT_LT((rotate_covariance(vac, w, 3.7) - vac).cwiseAbs().maxCoeff(), 1e-15);
  const auto c = build_coupling(toy_overlaps(3), 0.0, 0.5);
  EXPECT_LT((step_covariance(vac, c, false, 0.01) - vac).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Dynamics, RungeKuttaMatchesExactRotation) {
  const auto t = toy_overlaps(2);
  const auto c = build_coupling(t, 0.0, 0.5);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a.topLeftCorner(2, 2) = squeezed_thermal(0.4, 0.6, 0.3);
  a.bottomRightCorner(2, 2) = squeezed_thermal(0.2, 0.5, -1.0);
  Eigen::MatrixXd b = a;
  for (int i = 0; i < 1000; ++i) b = step_covariance(b, c, true, 0.003);
  EXPECT_LT((b - rotate_covariance(a, t.omega, 3.0)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Dynamics, MeansFreeRotation) {
  const auto c = build_coupling(toy_overlaps(2), 0.0, 0.5);
  std::mt19937_64 rng(1);
  Eigen::VectorXd r = Eigen::Vector4d(1.0, 0.0, 0.0, 0.0);
  const Eigen::MatrixXd a = 0.5 * Eigen::MatrixXd::Identity(4, 4);
  for (int i = 0; i < 200; ++i) r = step_means(r, a, c, false, {}, 0.01, rng);
  EXPECT_NEAR(r(0), std::cos(c.omega(0) * 2.0), 1e-12);
  EXPECT_NEAR(r(1), -std::sin(c.omega(0) * 2.0), 1e-12);
  EXPECT_EQ(r(2), 0.0);
}

TEST(Dynamics, CriticallyDampedClosedForm) {
  const double w = 2.66;
  Eigen::Matrix2d block;
  block << 0.0, -w, w, 2.0 * w;
  EXPECT_NEAR(block.trace(), 2.0 * w, 1e-15);
  EXPECT_NEAR(block.determinant(), w * w, 1e-12);  // double eigenvalue w
  for (double t : {0.0, 0.1, 1.0, 4.0}) {
    const Eigen::Matrix2d oracle = (-t * block).exp();
    EXPECT_LT((critically_damped_propagator(w, t) - oracle).cwiseAbs().maxCoeff(), 1e-12) << t;
  }
  const Eigen::VectorXd omega = Eigen::Vector3d(1.0, 1.8, w);
  const FeedbackConfig fb{3};
  const Eigen::MatrixXd d = feedback_drift(omega, fb);
  EXPECT_EQ(d(5, 5), 2.0 * w);
  EXPECT_LT((drift_propagator(omega, fb, 0.7) - Eigen::MatrixXd((-0.7 * d).exp())).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(6);
  r(4) = 1.0;
  apply_drift_propagator(r, omega, fb, 1.3);
  EXPECT_NEAR(r(4), std::exp(-w * 1.3) * (1.0 + w * 1.3), 1e-13);
  EXPECT_NEAR(r(5), -std::exp(-w * 1.3) * w * 1.3, 1e-13);
}

TEST(Dynamics, ComovingFrame) {
  const Eigen::VectorXd w = Eigen::Vector2d(1.0, 1.8);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a.topLeftCorner(2, 2) = squeezed_thermal(0.5, 0.5, 0.0);
  a.bottomRightCorner(2, 2) = squeezed_thermal(0.3, 0.7, 0.4);
  a(0, 2) = a(2, 0) = 0.05;
  const GaussianState s0{Eigen::Vector4d(0.3, -0.2, 1.0, 0.5), a, 0.0};
  const auto id = rotate_to_comoving(s0, w, 0.0);
  EXPECT_LT((id.A - a).cwiseAbs().maxCoeff(), 1e-15);
  const double t = 5.3;
  Eigen::VectorXd r = s0.R;
  apply_drift_propagator(r, w, {}, t);
  const auto back = rotate_to_comoving({r, rotate_covariance(a, w, t), t}, w, t);
  EXPECT_LT((back.A - a).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((back.R - s0.R).cwiseAbs().maxCoeff(), 1e-13);
}

// Single mode with E = M / 4 and rate nu: the lab-frame steady state has
// var x = sqrt(sqrt(1 + 4 nub^2) - 1) / (2 sqrt2 nub).
TEST(Dynamics, SingleModeSteadyState) {
  OverlapTables t;
  t.detector.length = 0.1;
  t.detector.pixel_width = 0.1;
  t.omega = Eigen::VectorXd::Constant(1, 1.3);
  t.pixel = Eigen::MatrixXd::Constant(1, 1, 0.2);
  t.mode = t.pixel * t.pixel.transpose() / 0.1;
  const auto c = build_coupling(t, 3.0, 0.5);
  Eigen::MatrixXd a = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  for (int i = 0; i < 40000; ++i) a = step_covariance(a, c, true, 0.001);
  const double nub = c.nu_bar(0);
  const double expected = std::sqrt(std::sqrt(1.0 + 4.0 * nub * nub) - 1.0) / (2.0 * std::sqrt(2.0) * nub);
  EXPECT_NEAR(a(0, 0), expected, 1e-8);
  EXPECT_NEAR(riccati_rhs(a, c, true).norm(), 0.0, 1e-8);
}

TEST(Dynamics, PhysicalityGuard) {
  EXPECT_TRUE(is_physical(0.5 * Eigen::MatrixXd::Identity(4, 4), 1e-9));
  EXPECT_FALSE(is_physical(0.4 * Eigen::MatrixXd::Identity(4, 4), 1e-9));
  const auto c = build_coupling(toy_overlaps(2), 500.0, 0.5);
  Eigen::MatrixXd a = 0.5 * Eigen::MatrixXd::Identity(4, 4);
  for (int i = 0; i < 20; ++i) {
    a = step_covariance(a, c, true, 0.05);
    ASSERT_TRUE(is_physical(a, 1e-6)) << i;
    ASSERT_GE(min_symplectic_eigenvalue(a), 0.5 - 1e-4) << i;
  }
}

TEST(Dynamics, XColumns) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(4, 4);
  const Eigen::MatrixXd x = x_columns(a);
  EXPECT_EQ(x.col(0), a.col(0));
  EXPECT_EQ(x.col(1), a.col(2));
}

std::vector<ProtocolSegment> strobe_protocol(const OverlapTables& t, double kappa_sq, double periods) {
  ProtocolSegment s;
  s.label = "strobe";
  s.duration = periods * 2.0 * std::numbers::pi;
  s.kappa_sq = kappa_sq;
  s.frequencies = {2.0 * t.omega(1)};
  s.delta_phi = 2.0 * std::numbers::pi * 0.02;
  return {s};
}

TEST(Simulate, CovarianceIndependentOfSeed) {
  const auto t = toy_overlaps(2);
  SimulationOptions o;
  o.n_trajectories = 20;
  o.sample_interval = 1.0;
  o.seed = 11;
  const auto a = simulate(t, strobe_protocol(t, 5.0, 5.0), o);
  o.seed = 12345;
  const auto b = simulate(t, strobe_protocol(t, 5.0, 5.0), o);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t s = 0; s < a.samples.size(); ++s) EXPECT_EQ(a.samples[s].A, b.samples[s].A);
  EXPECT_NE(a.ensemble.mean, b.ensemble.mean);
}

TEST(Simulate, ZeroLengthProtocol) {
  const auto t = toy_overlaps(2);
  auto prot = strobe_protocol(t, 5.0, 0.0);
  const auto ts = simulate(t, prot, {});
  ASSERT_EQ(ts.samples.size(), 1u);
  EXPECT_EQ(ts.samples[0].A, Eigen::MatrixXd(0.5 * Eigen::MatrixXd::Identity(4, 4)));
}

TEST(Simulate, ThreadCountDoesNotChangeResults) {
  const auto t = toy_overlaps(2);
  SimulationOptions o;
  o.n_trajectories = 37;
  o.recorded_trajectories = 3;
  o.sample_interval = 0.5;
  o.n_threads = 1;
  const auto a = simulate(t, strobe_protocol(t, 5.0, 3.0), o);
  o.n_threads = 4;
  const auto b = simulate(t, strobe_protocol(t, 5.0, 3.0), o);
  EXPECT_EQ(a.ensemble.mean, b.ensemble.mean);
  EXPECT_EQ(a.ensemble.variance, b.ensemble.variance);
  ASSERT_EQ(a.trajectories.size(), 3u);
  EXPECT_EQ(a.trajectories[2], b.trajectories[2]);
}

// The tracked ensemble covariance C of the conditional means is an exact
// moment equation; a large trajectory ensemble must agree with it.
TEST(Simulate, EnsembleMatchesMeansCovariance) {
  const auto t = toy_overlaps(2);
  SimulationOptions o;
  o.n_trajectories = 4000;
  o.track_means_covariance = true;
  o.sample_interval = 2.0;
  const auto ts = simulate(t, strobe_protocol(t, 20.0, 4.0), o);
  const auto& last = ts.samples.back();
  const auto col = static_cast<Eigen::Index>(ts.samples.size() - 1);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(ts.ensemble.variance(i, col) / last.C(i, i), 1.0, 0.08) << i;
  }
}

TEST(Simulate, HeisenbergAndQndMonotone) {
  const auto t = toy_overlaps(2);
  SimulationOptions o;
  o.sample_pulse_centres = true;
  const auto ts = simulate(t, strobe_protocol(t, 10.0, 10.0), o);
  double last = 0.5 + 1e-12;
  for (std::size_t s = 0; s < ts.samples.size(); ++s) {
    const auto& smp = ts.samples[s];
    for (int j = 0; j < 2; ++j) EXPECT_GE(smp.A(2 * j, 2 * j) * smp.A(2 * j + 1, 2 * j + 1), 0.25 - 1e-9);
    const Eigen::MatrixXd q = comoving_rotation(t.omega, smp.t);
    const double v = (q * smp.A * q.transpose())(2, 2);
    if (s > 0 && s + 1 < ts.samples.size()) {
      EXPECT_LE(v, last + 1e-9) << smp.t;
      last = v;
    }
  }
  EXPECT_LT(last, 0.3);
}

TEST(Simulate, FeedbackResponseWithoutNoise) {
  const auto t = toy_overlaps(2);
  auto prot = strobe_protocol(t, 5.0, 2.0);
  prot[0].feedback.target_mode = 2;
  SimulationOptions o;
  o.n_trajectories = 1;
  o.recorded_trajectories = 1;
  o.noise = false;
  o.sample_interval = 0.25;
  o.initial_means = Eigen::Vector4d(0.0, 0.0, 1.0, 0.0);
  const auto ts = simulate(t, prot, o);
  const double w = t.omega(1);
  for (std::size_t s = 0; s < ts.samples.size(); ++s) {
    const double tt = ts.samples[s].t;
    EXPECT_NEAR(ts.trajectories[0](2, static_cast<Eigen::Index>(s)), std::exp(-w * tt) * (1.0 + w * tt), 1e-12);
    EXPECT_NEAR(ts.trajectories[0](3, static_cast<Eigen::Index>(s)), -std::exp(-w * tt) * w * tt, 1e-12);
  }
}

}  // namespace
}  // namespace becsq
