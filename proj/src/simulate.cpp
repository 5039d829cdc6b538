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

#include "becsq/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace becsq {
namespace {

struct Step {
  double dt;
  int segment;
  int a_index;  // stored x columns of A at step start; -1 for free drift
  int sample;   // sample recorded after this step, or -1
};

bool near(double a, double b) { return std::abs(a - b) <= 1e-11 * (1.0 + std::abs(a) + std::abs(b)); }

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || !near(out.back(), x)) out.push_back(x);
  }
  v.swap(out);
}

bool contains(const std::vector<double>& sorted, double x) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x - 1e-11 * (1.0 + std::abs(x)));
  return it != sorted.end() && near(*it, x);
}

double nominal_dt(const ProtocolSegment& seg, const Eigen::VectorXd& omega, double max_dt) {
  if (max_dt > 0.0) return max_dt;
  double dt = 2.0 * std::numbers::pi / (50.0 * omega.maxCoeff());
  if (!seg.frequencies.empty()) {
    const double fastest = *std::max_element(seg.frequencies.begin(), seg.frequencies.end());
    dt = std::min(dt, seg.delta_phi / fastest / 20.0);
  }
  return dt;
}

// C(t + dt) for C' = -D C - C D^T + S(t), by Simpson's rule on the
// variation-of-constants integral with S sampled at both ends and midway.
Eigen::MatrixXd advance_means_covariance(const Eigen::MatrixXd& C, const Eigen::MatrixXd& s0,
                                         const Eigen::MatrixXd& s_mid, const Eigen::MatrixXd& s1,
                                         const Eigen::VectorXd& omega, const FeedbackConfig& fb, double dt) {
  const Eigen::MatrixXd p = drift_propagator(omega, fb, dt);
  const Eigen::MatrixXd ph = drift_propagator(omega, fb, 0.5 * dt);
  Eigen::MatrixXd out = p * C * p.transpose() +
                        dt / 6.0 * (p * s0 * p.transpose() + 4.0 * ph * s_mid * ph.transpose() + s1);
  return 0.5 * (out + out.transpose());
}

struct Accumulator {
  Eigen::MatrixXd sum, sum_sq, sum_co, sum_sq_co;
  void init(int dim, int samples) {
    sum = sum_sq = sum_co = sum_sq_co = Eigen::MatrixXd::Zero(dim, samples);
  }
};

}  // namespace

void apply_drift_propagator(Eigen::VectorXd& R, const Eigen::VectorXd& omega, const FeedbackConfig& feedback,
                            double dt) {
  for (int j = 0; j < omega.size(); ++j) {
    const double x = R(2 * j), p = R(2 * j + 1);
    if (feedback.target_mode == j + 1) {
      const Eigen::Matrix2d prop = critically_damped_propagator(omega(j), dt);
      R(2 * j) = prop(0, 0) * x + prop(0, 1) * p;
      R(2 * j + 1) = prop(1, 0) * x + prop(1, 1) * p;
    } else {
      const double c = std::cos(omega(j) * dt), s = std::sin(omega(j) * dt);
      R(2 * j) = c * x + s * p;
      R(2 * j + 1) = -s * x + c * p;
    }
  }
}

TimeSeries simulate(const OverlapTables& overlaps, const std::vector<ProtocolSegment>& protocol,
                    const SimulationOptions& options) {
  const Eigen::VectorXd& omega = overlaps.omega;
  const int n = static_cast<int>(omega.size());
  const int dim = 2 * n;
  if (options.n_trajectories < 0 || options.recorded_trajectories < 0) {
    throw std::invalid_argument("simulate: trajectory counts must be non-negative");
  }
  if (options.initial_means.size() != 0 && options.initial_means.size() != dim) {
    throw std::invalid_argument("simulate: initial_means has the wrong length");
  }
  const bool ensemble = options.n_trajectories > 0;

  TimeSeries ts;
  ts.omega = omega;
  Eigen::MatrixXd A = 0.5 * Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(dim, dim);
  double t0 = 0.0;
  double probe_total = 0.0;

  auto record = [&](int segment, double local, bool on, double seg_probe) {
    Sample s;
    s.t = t0 + local;
    s.segment = segment;
    s.segment_time = local;
    s.probe_on = on;
    s.probe_time = probe_total;
    s.segment_probe_time = seg_probe;
    s.A = A;
    if (options.track_means_covariance) s.C = C;
    ts.samples.push_back(std::move(s));
    return static_cast<int>(ts.samples.size()) - 1;
  };
  record(0, 0.0, false, 0.0);

  std::vector<Step> steps;
  std::vector<Eigen::MatrixXd> a_store;
  double total = 0.0;
  for (const auto& seg : protocol) {
    if (seg.duration < 0.0) throw std::invalid_argument("simulate: negative segment duration");
    total += seg.duration;
  }
  ts.duration = total;

  for (int si = 0; si < static_cast<int>(protocol.size()); ++si) {
    const auto& seg = protocol[si];
    ts.segment_starts.push_back(t0);
    ts.schedules.push_back(build_schedule(seg.frequencies, seg.delta_phi, seg.duration, seg.rule,
                                           seg.lab_phase_reference ? t0 : 0.0));
    ts.couplings.push_back(build_coupling(overlaps, seg.kappa_sq, options.coupling_length));
    const StroboSchedule& sched = ts.schedules.back();
    const CouplingModel& coupling = ts.couplings.back();
    for (const auto& w : sched.warnings) ts.warnings.push_back(seg.label + ": " + w);
    if (seg.feedback.target_mode > n) throw std::invalid_argument("simulate: feedback mode not retained");
    if (seg.duration == 0.0) continue;

    const double dt_nom = nominal_dt(seg, omega, options.max_dt);
    ts.nominal_dt = ts.nominal_dt == 0.0 ? dt_nom : std::min(ts.nominal_dt, dt_nom);
    const double dur = seg.duration;
    auto inside = [dur](double x) { return x > 1e-11 * (1.0 + dur) && x < dur - 1e-11 * (1.0 + dur); };

    std::vector<double> sample_local{dur};
    if (options.sample_interval > 0.0) {
      const long first = static_cast<long>(std::ceil(t0 / options.sample_interval - 1e-9));
      for (long k = std::max(first, 0L);; ++k) {
        const double local = k * options.sample_interval - t0;
        if (local >= dur) break;
        if (inside(local)) sample_local.push_back(local);
      }
    }
    if (options.sample_pulse_centres && !sched.continuous()) {
      for (const auto& p : sched.pulses) {
        if (inside(p.centre)) sample_local.push_back(p.centre);
      }
    }
    for (double t : options.extra_sample_times) {
      if (inside(t - t0)) sample_local.push_back(t - t0);
    }
    sort_unique(sample_local);

    std::vector<double> breaks = sample_local;
    breaks.push_back(0.0);
    for (const auto& p : sched.pulses) {
      if (inside(p.start)) breaks.push_back(p.start);
      if (inside(p.end)) breaks.push_back(p.end);
    }
    sort_unique(breaks);

    const double seg_probe_start = probe_total;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
      const double a_t = breaks[b], b_t = breaks[b + 1];
      const bool on = coupling.probing() && sched.is_on(0.5 * (a_t + b_t));
      if (!on) {
        const double dt = b_t - a_t;
        if (options.track_means_covariance) {
          const Eigen::MatrixXd p = drift_propagator(omega, seg.feedback, dt);
          C = p * C * p.transpose();
        }
        A = rotate_covariance(A, omega, dt);
        steps.push_back({dt, si, -1, -1});
        ++ts.steps_off;
      } else {
        double t = a_t;
        while (t < b_t && !near(t, b_t)) {
          const double stiff = 1.0 / ((A * coupling.M).norm() + 1e-300);
          const double cap = std::min(dt_nom, stiff);
          const long count = std::max(1L, static_cast<long>(std::ceil((b_t - t) / cap - 1e-9)));
          const double dt = (b_t - t) / static_cast<double>(count);
          int a_index = -1;
          if (ensemble) {
            a_store.push_back(x_columns(A));
            a_index = static_cast<int>(a_store.size()) - 1;
          }
          const Eigen::MatrixXd a_next = step_covariance(A, coupling, true, dt);
          if (options.track_means_covariance) {
            const Eigen::MatrixXd a_mid = 0.5 * (A + a_next);
            C = advance_means_covariance(C, A * coupling.M * A, a_mid * coupling.M * a_mid,
                                         a_next * coupling.M * a_next, omega, seg.feedback, dt);
          }
          A = a_next;
          steps.push_back({dt, si, a_index, -1});
          ++ts.steps_on;
          probe_total += dt;
          t = count == 1 ? b_t : t + dt;
        }
      }
      if (contains(sample_local, b_t)) {
        steps.back().sample = record(si, b_t, on, probe_total - seg_probe_start);
      }
    }
    t0 += dur;
  }

  const int n_samples = static_cast<int>(ts.samples.size());
  if (!ensemble) return ts;

  // Trajectories replay the stored step list. Chunks are fixed by the
  // trajectory count so the summation order never depends on threading.
  const int n_traj = options.n_trajectories;
  const int n_chunks = std::min(n_traj, 16);
  const int n_recorded = std::min(options.recorded_trajectories, n_traj);
  std::vector<Accumulator> partial(static_cast<std::size_t>(n_chunks));
  ts.trajectories.assign(static_cast<std::size_t>(n_recorded), Eigen::MatrixXd::Zero(dim, n_samples));

  Eigen::MatrixXd cos_t(n, n_samples), sin_t(n, n_samples);
  for (int s = 0; s < n_samples; ++s) {
    for (int j = 0; j < n; ++j) {
      cos_t(j, s) = std::cos(omega(j) * ts.samples[s].t);
      sin_t(j, s) = std::sin(omega(j) * ts.samples[s].t);
    }
  }
  const Eigen::VectorXd r0 = options.initial_means.size() == dim ? options.initial_means : Eigen::VectorXd::Zero(dim);

  auto run_chunk = [&](int chunk) {
    Accumulator& acc = partial[static_cast<std::size_t>(chunk)];
    acc.init(dim, n_samples);
    const int first = static_cast<int>(static_cast<long>(chunk) * n_traj / n_chunks);
    const int last = static_cast<int>(static_cast<long>(chunk + 1) * n_traj / n_chunks);
    Eigen::VectorXd dw, co(dim);
    for (int traj = first; traj < last; ++traj) {
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                        static_cast<std::uint32_t>(traj)};
      std::mt19937_64 rng(seq);
      Eigen::VectorXd R = r0;
      auto accumulate = [&](int s) {
        for (int j = 0; j < n; ++j) {
          const double x = R(2 * j), p = R(2 * j + 1);
          co(2 * j) = x * cos_t(j, s) - p * sin_t(j, s);
          co(2 * j + 1) = x * sin_t(j, s) + p * cos_t(j, s);
        }
        acc.sum.col(s) += R;
        acc.sum_sq.col(s) += R.cwiseAbs2();
        acc.sum_co.col(s) += co;
        acc.sum_sq_co.col(s) += co.cwiseAbs2();
        if (traj < n_recorded) ts.trajectories[static_cast<std::size_t>(traj)].col(s) = R;
      };
      accumulate(0);
      for (const auto& step : steps) {
        const auto& seg = protocol[static_cast<std::size_t>(step.segment)];
        apply_drift_propagator(R, omega, seg.feedback, step.dt);
        if (step.a_index >= 0 && options.noise) {
          const auto& mc = ts.couplings[static_cast<std::size_t>(step.segment)].m_compact;
          std::normal_distribution<double> normal(0.0, std::sqrt(step.dt));
          dw.resize(mc.cols());
          for (Eigen::Index d = 0; d < dw.size(); ++d) dw(d) = normal(rng);
          R.noalias() += a_store[static_cast<std::size_t>(step.a_index)] * (mc * dw);
        }
        if (step.sample >= 0) accumulate(step.sample);
      }
    }
  };

  int n_threads = options.n_threads > 0 ? options.n_threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, n_chunks);
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
  auto worker = [&](int id) {
    try {
      for (int c = next++; c < n_chunks; c = next++) run_chunk(c);
    } catch (...) {
      errors[static_cast<std::size_t>(id)] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (int id = 1; id < n_threads; ++id) pool.emplace_back(worker, id);
  worker(0);
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Accumulator total_acc;
  total_acc.init(dim, n_samples);
  for (const auto& p : partial) {
    total_acc.sum += p.sum;
    total_acc.sum_sq += p.sum_sq;
    total_acc.sum_co += p.sum_co;
    total_acc.sum_sq_co += p.sum_sq_co;
  }
  const double count = static_cast<double>(n_traj);
  const double denom = n_traj > 1 ? count - 1.0 : 1.0;
  auto& e = ts.ensemble;
  e.n_trajectories = n_traj;
  e.mean = total_acc.sum / count;
  e.variance = ((total_acc.sum_sq - count * e.mean.cwiseAbs2()) / denom).cwiseMax(0.0);
  e.mean_comoving = total_acc.sum_co / count;
  e.variance_comoving = ((total_acc.sum_sq_co - count * e.mean_comoving.cwiseAbs2()) / denom).cwiseMax(0.0);
  return ts;
}

}  // namespace becsq
