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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "becsq/dynamics.hpp"
#include "becsq/metrics.hpp"
#include "becsq/presets.hpp"
#include "becsq/runner.hpp"
#include "fock.hpp"

namespace {

using namespace becsq;

struct Run {
  ScenarioConfig config;
  PreparedSystem system;
  TimeSeries series;
};

std::map<std::string, PreparedSystem> g_systems;
std::map<std::string, Run> g_runs;

const PreparedSystem& system_for(const std::string& preset) {
  auto it = g_systems.find(preset);
  if (it == g_systems.end()) it = g_systems.emplace(preset, prepare_system(preset_config(preset))).first;
  return it->second;
}

const Run& run_preset(const std::string& preset) {
  auto it = g_runs.find(preset);
  if (it == g_runs.end()) {
    const ScenarioConfig cfg = preset_config(preset);
    const PreparedSystem& sys = system_for(preset);
    it = g_runs.emplace(preset, Run{cfg, sys, run_simulation(cfg, sys)}).first;
  }
  return it->second;
}

double rel(double value, double reference) { return std::abs(value - reference) / std::abs(reference); }

// Single-mode conditional steady state under continuous x probing.
double steady_state_var_x(double nu_bar) {
  return std::sqrt(std::sqrt(1.0 + 4.0 * nu_bar * nu_bar) - 1.0) / (2.0 * std::sqrt(2.0) * nu_bar);
}

double qnd_var(double nu, double probe_time) { return 1.0 / (2.0 * (1.0 + 2.0 * nu * probe_time)); }

// Index of the sample at time t, or -1.
long sample_at(const TimeSeries& s, double t) {
  for (std::size_t i = 0; i < s.samples.size(); ++i)
    if (std::abs(s.samples[i].t - t) < 1e-9) return static_cast<long>(i);
  return -1;
}

bool p1() {
  const auto& b = system_for("fig2_noninteracting").basis;
  double worst = 0.0;
  for (int j = 1; j <= 10; ++j) worst = std::max(worst, std::abs(b.mode(j).omega - j));
  std::printf("  max_j<=10 |w_j - j| = %.3e (limit 1e-3)\n", worst);
  return b.size() >= 10 && worst < 1e-3;
}

bool p2() {
  const double w1 = system_for("fig2").basis.mode(1).omega;
  std::printf("  w_1 = %.8f (limit |w_1 - 1| < 1e-4)\n", w1);
  return std::abs(w1 - 1.0) < 1e-4;
}

bool p3() {
  ScenarioConfig cfg = preset_config("fig2");
  cfg.sweep = {};
  SegmentConfig seg;
  seg.label = "continuous";
  seg.duration = 30.0 * 2.0 * std::numbers::pi;
  seg.kappa_sq_per_two_pi = 100.0;
  cfg.segments = {seg};
  const PreparedSystem& sys = system_for("fig2");
  SimulationOptions opt = simulation_options(cfg);
  opt.sample_interval = 0.0;
  opt.sample_pulse_centres = false;
  const double end = seg.duration, window = 2.0 * std::numbers::pi;
  const int n = 2000;
  for (int i = 0; i <= n; ++i) opt.extra_sample_times.push_back(end - window + window * i / n);
  const TimeSeries s = simulate(sys.overlaps, resolve_protocol(cfg, sys.basis.omegas()), opt);
  bool ok = true;
  for (int j = 1; j <= 5; ++j) {
    const double w = sys.basis.mode(j).omega, period = 2.0 * std::numbers::pi / w;
    double sum = 0.0;
    int count = 0;
    for (const auto& smp : s.samples) {
      if (smp.t >= end - period - 1e-9) {
        sum += smp.A(2 * (j - 1), 2 * (j - 1));
        ++count;
      }
    }
    const double avg = sum / count;
    const double ref = steady_state_var_x(s.couplings[0].nu(j - 1) / w);
    std::printf("  mode %d: <var x> = %.5f, closed form %.5f, rel dev %.2f%% (limit 2%%)\n", j, avg, ref,
                100.0 * rel(avg, ref));
    ok = ok && rel(avg, ref) < 0.02;
  }
  return ok;
}

struct Fig2Check {
  double max_dev3 = 0.0, max_dev1 = 0.0, max_dev5 = 0.0, max_dh = 0.0, min_p = 1.0;
  int centres = 0;
};

Fig2Check check_fig2() {
  const Run& r = run_preset("fig2");
  const TimeSeries& s = r.series;
  const double nu3 = s.couplings[0].nu(2);
  Fig2Check out;
  for (const auto& pulse : s.schedules[0].pulses) {
    if (pulse.centre < 0.0 || pulse.centre > s.duration) continue;
    const long i = sample_at(s, pulse.centre);
    if (i < 0) continue;
    ++out.centres;
    const Eigen::MatrixXd a0 = comoving_covariance(s, static_cast<std::size_t>(i));
    out.max_dev3 = std::max(out.max_dev3, rel(a0(4, 4), qnd_var(nu3, s.samples[i].probe_time)));
    out.max_dev1 = std::max(out.max_dev1, rel(a0(0, 0), 0.5));
    out.max_dev5 = std::max(out.max_dev5, rel(a0(8, 8), 0.5));
    const SampleMetrics m = evaluate_sample(r.config, r.system, s, static_cast<std::size_t>(i));
    out.max_dh = std::max(out.max_dh, m.hellinger);
    out.min_p = std::min(out.min_p, m.purity.at(0));
  }
  return out;
}

bool p4() {
  const Fig2Check c = check_fig2();
  std::printf("  %d pulse centres; max rel dev of var x3^0 from QND = %.3f%% (limit 5%%)\n", c.centres,
              100.0 * c.max_dev3);
  std::printf("  max D_H = %.5f (limit 0.01), min P_135 = %.5f (limit 0.99)\n", c.max_dh, c.min_p);
  return c.centres > 100 && c.max_dev3 < 0.05 && c.max_dh < 0.01 && c.min_p > 0.99;
}

bool p5() {
  const Fig2Check c = check_fig2();
  std::printf("  max rel dev from 1/2: var x1^0 %.3f%%, var x5^0 %.3f%% (limit 2%%)\n", 100.0 * c.max_dev1,
              100.0 * c.max_dev5);
  return c.centres > 100 && c.max_dev1 < 0.02 && c.max_dev5 < 0.02;
}

bool p6() {
  const Run& r = run_preset("fig3");
  const std::size_t last = r.series.samples.size() - 1;
  const SampleMetrics m = evaluate_sample(r.config, r.system, r.series, last);
  const Eigen::MatrixXd& f2 = r.system.overlaps.mode;
  const double beta = std::abs(f2(0, 2)) / std::sqrt(f2(0, 0) * f2(2, 2));
  const double asym = std::log((1.0 + beta) / (1.0 - beta)) / std::log(4.0);
  const double e13 = m.negativity.at(0), p = m.purity.at(0);
  std::printf("  t = %.3f: E_13 = %.5f, asymptote %.5f (beta %.5f), rel dev %.2f%% (limit 10%%)\n",
              r.series.samples[last].t, e13, asym, beta, 100.0 * rel(e13, asym));
  std::printf("  P_135 = %.5f (limit [0.95, 0.99])\n", p);
  return rel(e13, asym) < 0.10 && p >= 0.95 && p <= 0.99;
}

bool p7() {
  ScenarioConfig cfg = preset_config("fig2");
  cfg.ensemble.n_trajectories = 8;
  cfg.ensemble.recorded_trajectories = 1;
  const PreparedSystem& sys = system_for("fig2");
  std::vector<TimeSeries> runs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.ensemble.seed = seed;
    runs.push_back(run_simulation(cfg, sys));
  }
  double worst = 0.0, spread = 0.0;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    if (runs[k].samples.size() != runs[0].samples.size()) return false;
    for (std::size_t i = 0; i < runs[0].samples.size(); ++i)
      worst = std::max(worst, (runs[k].samples[i].A - runs[0].samples[i].A).cwiseAbs().maxCoeff());
    spread = std::max(spread, (runs[k].trajectories.at(0) - runs[0].trajectories.at(0)).cwiseAbs().maxCoeff());
  }
  std::printf("  5 seeds, %zu samples: max |dA| = %.3e (limit 1e-12); max |dR| between seeds = %.3e\n",
              runs[0].samples.size(), worst, spread);
  return worst < 1e-12 && spread > 0.0;
}

bool p8() {
  bool ok = true;
  for (const auto& preset : presets()) {
    const ScenarioConfig base = preset_config(preset.name);
    std::vector<ScenarioConfig> cfgs{base};
    for (double v : base.sweep.values) cfgs.push_back(with_sweep_value(base, v));
    double worst = 1e300;
    std::size_t n = 0;
    for (std::size_t c = 0; c < cfgs.size(); ++c) {
      const TimeSeries& s = c == 0 ? run_preset(preset.name).series : run_simulation(cfgs[c], system_for(preset.name));
      for (const auto& smp : s.samples) worst = std::min(worst, min_symplectic_eigenvalue(smp.A));
      n += s.samples.size();
    }
    std::printf("  %-20s %2zu run(s), %6zu samples: min nu = %.9f\n", preset.name.c_str(), cfgs.size(), n, worst);
    ok = ok && worst >= 0.5 - 1e-6;
  }
  return ok;
}

struct EndSigma {
  double x = 0.0, p = 0.0;
};

EndSigma end_sigma(const TimeSeries& s, int mode) {
  const Eigen::Index col = s.ensemble.variance.cols() - 1;
  return {std::sqrt(s.ensemble.variance(2 * (mode - 1), col)), std::sqrt(s.ensemble.variance(2 * (mode - 1) + 1, col))};
}

bool p9() {
  const Run& r = run_preset("fig4_nofeedback");
  const TimeSeries& s = r.series;
  const double w3 = s.omega(2), period = 2.0 * std::numbers::pi / w3;
  const double tau_t = s.samples.back().probe_time;
  const double ref = std::sqrt(s.couplings[0].nu(2) * tau_t / 2.0);
  double vx = 0.0, vp = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    if (s.samples[i].t < s.duration - period - 1e-9) continue;
    vx += s.ensemble.variance(4, static_cast<Eigen::Index>(i));
    vp += s.ensemble.variance(5, static_cast<Eigen::Index>(i));
    ++count;
  }
  const double sx = std::sqrt(vx / count), sp = std::sqrt(vp / count);
  const EndSigma inst = end_sigma(s, 3);
  std::printf("  %d trajectories, tau_T = %.4f, sqrt(nu3 tau_T / 2) = %.4f\n", s.ensemble.n_trajectories, tau_t, ref);
  std::printf("  final-period rms sigma: x3 %.4f (%.2f%%), p3 %.4f (%.2f%%) (limit 10%%)\n", sx, 100.0 * rel(sx, ref), sp,
              100.0 * rel(sp, ref));
  std::printf("  instantaneous at t_end: sigma x3 %.4f, sigma p3 %.4f\n", inst.x, inst.p);
  return s.ensemble.n_trajectories == 1000 && rel(sx, ref) < 0.10 && rel(sp, ref) < 0.10;
}

bool p10() {
  const EndSigma off = end_sigma(run_preset("fig4_nofeedback").series, 3);
  const EndSigma on = end_sigma(run_preset("fig4_feedback").series, 3);
  std::printf("  end sigma with/without feedback: x3 %.4f / %.4f = %.3f, p3 %.4f / %.4f = %.3f (limit 0.30)\n", on.x,
              off.x, on.x / off.x, on.p, off.p, on.p / off.p);
  const bool suppressed = on.x <= 0.3 * off.x && on.p <= 0.3 * off.p;

  // Unit x3 displacement without measurement noise through the full pipeline.
  const Run& r = run_preset("fig4_feedback");
  ScenarioConfig cfg = r.config;
  cfg.ensemble.n_trajectories = 1;
  cfg.ensemble.recorded_trajectories = 1;
  SimulationOptions opt = simulation_options(cfg);
  opt.noise = false;
  opt.sample_interval = 0.05;
  opt.initial_means = Eigen::VectorXd::Zero(2 * r.system.basis.size());
  opt.initial_means(4) = 1.0;
  const TimeSeries s = simulate(r.system.overlaps, resolve_protocol(cfg, r.system.basis.omegas()), opt);
  const double w = s.omega(2);
  double worst = 0.0, others = 0.0;
  const Eigen::MatrixXd& tr = s.trajectories.at(0);
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    const double t = s.samples[i].t, e = std::exp(-w * t);
    worst = std::max(worst, std::abs(tr(4, i) - e * (1.0 + w * t)));
    worst = std::max(worst, std::abs(tr(5, i) - e * (-w * t)));
    for (Eigen::Index k = 0; k < tr.rows(); ++k)
      if (k != 4 && k != 5) others = std::max(others, std::abs(tr(k, static_cast<Eigen::Index>(i))));
  }
  std::printf("  noiseless unit displacement: max |R - closed form| = %.3e over %zu samples (limit 0.01); other modes "
              "max |R| = %.1e\n",
              worst, s.samples.size(), others);
  return suppressed && worst < 0.01 && others < 0.01;
}

bool p11() {
  double worst = 0.0;
  auto track = [&](const char* what, double gaussian, double brute) {
    std::printf("  %-34s gaussian %.6f, fock %.6f\n", what, gaussian, brute);
    worst = std::max(worst, std::abs(gaussian - brute));
  };
  {
    const int dim = 18;
    const fock::Matrix vac2 = Eigen::kroneckerProduct(fock::vacuum(dim), fock::vacuum(dim)).eval();
    const fock::Matrix tmsv = fock::conjugate(fock::two_mode_squeezer(dim, 0.4), vac2);
    const auto m = fock::moments(tmsv, 2, dim);
    track("E_N two-mode squeezed vacuum", log_negativity(m.A, {1}, {2}), fock::log_negativity(tmsv, dim));
    const fock::Matrix th = Eigen::kroneckerProduct(fock::thermal(dim, 0.2), fock::thermal(dim, 0.1)).eval();
    const fock::Matrix mixed = fock::conjugate(fock::two_mode_squeezer(dim, 0.5), th);
    const auto mm = fock::moments(mixed, 2, dim);
    track("E_N squeezed thermal pair", log_negativity(mm.A, {1}, {2}), fock::log_negativity(mixed, dim));
  }
  {
    const int dim = 50;
    const fock::Matrix a = fock::conjugate(fock::displacer(dim, 0.4),
                                           fock::conjugate(fock::squeezer(dim, 0.3), fock::thermal(dim, 0.15)));
    const fock::Matrix b = fock::thermal(dim, 0.3);
    const auto ma = fock::moments(a, 1, dim), mb = fock::moments(b, 1, dim);
    track("D_H single mode", hellinger_distance(ma.R, ma.A, mb.R, mb.A), fock::hellinger(a, b));
    const fock::Matrix vac = fock::vacuum(dim), sq = fock::conjugate(fock::squeezer(dim, 0.5), vac);
    const auto mv = fock::moments(vac, 1, dim), ms = fock::moments(sq, 1, dim);
    track("D_H squeezed vs vacuum", hellinger_distance(ms.R, ms.A, mv.R, mv.A), fock::hellinger(sq, vac));
  }
  {
    const int dim = 16;
    const fock::Matrix prod = Eigen::kroneckerProduct(fock::thermal(dim, 0.1), fock::vacuum(dim)).eval();
    const fock::Matrix tms = fock::conjugate(fock::two_mode_squeezer(dim, 0.3), prod);
    const auto m1 = fock::moments(tms, 2, dim), m2 = fock::moments(prod, 2, dim);
    track("D_H two mode", hellinger_distance(m1.R, m1.A, m2.R, m2.A), fock::hellinger(tms, prod));
  }
  std::printf("  max |gaussian - fock| = %.3e (limit 1e-3)\n", worst);
  return worst < 1e-3;
}

bool p12() {
  const Run& r = run_preset("fig1b");
  const Sample& last = r.series.samples.back();
  double worst_x = 0.0, worst_p = 0.0;
  for (int j = 1; j <= r.system.basis.size(); ++j) {
    const double vx = last.A(2 * (j - 1), 2 * (j - 1)), vp = last.A(2 * j - 1, 2 * j - 1);
    std::printf("  mode %2d: var x = %.4f, var p = %.4f\n", j, vx, vp);
    worst_x = std::max(worst_x, rel(vx, 0.5));
    worst_p = std::max(worst_p, rel(vp, 0.5));
  }
  std::printf("  t = %.3f: max rel dev of lab var x from 1/2 = %.2f%% (limit 5%%); var p (not scored) %.2f%%\n", last.t,
              100.0 * worst_x, 100.0 * worst_p);
  return worst_x < 0.05;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<bool()>>> criteria{
      {"P1 noninteracting spectrum", p1}, {"P2 Kohn mode", p2},
      {"P3 continuous steady state", p3}, {"P4 QND squeezing curve", p4},
      {"P5 selectivity", p5},             {"P6 entanglement asymptote", p6},
      {"P7 covariance determinism", p7},  {"P8 physicality", p8},
      {"P9 trajectory diffusion", p9},    {"P10 feedback suppression", p10},
      {"P11 metric oracles", p11},        {"P12 eraser", p12},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    std::printf("%s\n", name);
    bool ok = false;
    try {
      ok = check();
    } catch (const std::exception& e) {
      std::printf("  exception: %s\n", e.what());
    }
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
    std::fflush(stdout);
    failures += !ok;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
