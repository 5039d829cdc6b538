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

#include "becsq/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "becsq/dynamics.hpp"
#include "becsq/metrics.hpp"
#include "becsq/units.hpp"

namespace becsq {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join_modes(const std::vector<int>& modes, const char* sep = "-") {
  std::string out;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(modes[i]);
  }
  return out;
}

std::string negativity_column(const std::pair<std::vector<int>, std::vector<int>>& p) {
  return "E_" + join_modes(p.first) + "_" + join_modes(p.second);
}

std::string purity_column(const std::vector<int>& subset) { return "P_" + join_modes(subset); }

void check_mode(int j, int n, const std::string& what) {
  if (j < 1 || j > n) {
    throw ConfigError(what + ": mode " + std::to_string(j) + " outside 1.." + std::to_string(n));
  }
}

double mu_estimate(const TrapConfig& trap) {
  if (trap.mu_target) return *trap.mu_target;
  const double g = trap.g1d.value_or(0.0);
  // Thomas-Fermi: mu = (3 g N / (4 sqrt 2))^(2/3).
  return std::max(0.5, std::pow(3.0 * g * trap.atom_number / (4.0 * std::sqrt(2.0)), 2.0 / 3.0));
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
  }
  void comment(const std::string& text) { out_ << "# " << text << '\n'; }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

// Weight of |b_j|^2 in N_nc.
Eigen::VectorXd population_weights(const ModeBasis& basis, int n) {
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd R = Eigen::VectorXd::Zero(2 * n);
    R(2 * j) = std::sqrt(2.0);
    w(j) = noncondensate_population(R, basis);
  }
  return w;
}

struct QndCurves {
  std::vector<double> beta, asymptote;
  std::vector<int> segment;                 // 0-based, -1 if never targeted
  std::vector<std::vector<double>> values;  // [pair][sample]
};

QndCurves qnd_curves(const ScenarioConfig& cfg, const PreparedSystem& sys, const TimeSeries& ts) {
  QndCurves out;
  for (const auto& [j, k] : cfg.outputs.qnd_pairs) {
    const double beta = overlap_beta(sys.overlaps.mode, j, k);
    out.beta.push_back(beta);
    out.asymptote.push_back(qnd_entanglement_asymptote(beta));
    int seg = -1;
    for (std::size_t s = 0; s < cfg.segments.size(); ++s) {
      if (segment_targets_pair(cfg.segments[s], j, k)) {
        seg = static_cast<int>(s);
        break;
      }
    }
    out.segment.push_back(seg);
    std::vector<double> col(ts.samples.size(), kNaN);
    if (seg >= 0) {
      std::vector<std::size_t> idx;
      std::vector<double> times;
      for (std::size_t s = 0; s < ts.samples.size(); ++s) {
        const auto& smp = ts.samples[s];
        const bool in_seg = smp.segment == seg || (seg == 0 && s == 0);
        if (in_seg && (times.empty() || smp.segment_time >= times.back())) {
          idx.push_back(s);
          times.push_back(smp.segment_time);
        }
      }
      const auto& coupling = ts.couplings[static_cast<std::size_t>(seg)];
      const double duty = ts.schedules[static_cast<std::size_t>(seg)].duty_cycle();
      const std::vector<double> curve = qnd_entanglement_curve(coupling, j, k, duty, times);
      for (std::size_t i = 0; i < idx.size(); ++i) col[idx[i]] = curve[i];
    }
    out.values.push_back(std::move(col));
  }
  return out;
}

void write_timeseries(const std::filesystem::path& path, const ScenarioConfig& cfg, const TimeSeries& ts, const std::vector<SampleMetrics>& metrics, const QndCurves& qnd) {
  const int n = static_cast<int>(ts.omega.size());
  const bool ens = ts.ensemble.n_trajectories > 0;
  std::vector<std::string> head{"t", "t_periods", "segment", "probe_on", "probe_time", "segment_probe_time"};
  for (int j = 1; j <= n; ++j) {
    for (const char* q : {"x", "p"}) {
      head.push_back(std::string("var_") + q + std::to_string(j) + "_lab");
      head.push_back(std::string("var_") + q + std::to_string(j) + "_0");
    }
  }
  if (ens) {
    for (int j = 1; j <= n; ++j) {
      for (const char* q : {"x", "p"}) {
        const std::string s = std::string(q) + std::to_string(j);
        for (const std::string& name : {"mean_" + s + "_lab", "sigma_" + s + "_lab", "mean_" + s + "_0",
                                        "sigma_" + s + "_0"}) {
          head.push_back(name);
        }
      }
    }
  }
  for (const auto& p : cfg.outputs.negativity) head.push_back(negativity_column(p));
  for (const auto& s : cfg.outputs.purity_subsets) head.push_back(purity_column(s));
  if (!cfg.outputs.hellinger_subset.empty()) head.push_back("D_H");
  head.push_back("min_symplectic");
  head.push_back("N_nc");
  for (int j : cfg.outputs.qnd_modes) {
    head.push_back("var_qnd" + std::to_string(j));
    head.push_back("sigma_qnd" + std::to_string(j));
  }
  for (const auto& [j, k] : cfg.outputs.qnd_pairs) head.push_back("E_qnd_" + std::to_string(j) + "_" + std::to_string(k));

  CsvWriter w(path);
  w.comment(kTimeSeriesSchema);
  w.comment("scenario " + cfg.name + "; times in 1/omega_x; _lab: lab frame, _0: comoving frame");
  w.row(head);
  for (std::size_t s = 0; s < ts.samples.size(); ++s) {
    const Sample& smp = ts.samples[s];
    const Eigen::MatrixXd A0 = comoving_covariance(ts, s);
    std::vector<std::string> r{num(smp.t), num(smp.t / units::kTwoPi), std::to_string(smp.segment + 1),
                               smp.probe_on ? "1" : "0", num(smp.probe_time), num(smp.segment_probe_time)};
    for (int j = 0; j < n; ++j) {
      for (int q = 0; q < 2; ++q) {
        r.push_back(num(smp.A(2 * j + q, 2 * j + q)));
        r.push_back(num(A0(2 * j + q, 2 * j + q)));
      }
    }
    if (ens) {
      const auto& e = ts.ensemble;
      for (int i = 0; i < 2 * n; ++i) {
        const auto col = static_cast<Eigen::Index>(s);
        r.push_back(num(e.mean(i, col)));
        r.push_back(num(std::sqrt(e.variance(i, col))));
        r.push_back(num(e.mean_comoving(i, col)));
        r.push_back(num(std::sqrt(e.variance_comoving(i, col))));
      }
    }
    const SampleMetrics& m = metrics[s];
    for (double v : m.negativity) r.push_back(num(v));
    for (double v : m.purity) r.push_back(num(v));
    if (!cfg.outputs.hellinger_subset.empty()) r.push_back(num(m.hellinger));
    r.push_back(num(m.min_symplectic));
    r.push_back(num(m.noncondensate));
    for (std::size_t i = 0; i < cfg.outputs.qnd_modes.size(); ++i) {
      r.push_back(num(m.var_qnd[i]));
      r.push_back(num(m.sigma_qnd[i]));
    }
    for (const auto& col : qnd.values) r.push_back(num(col[s]));
    w.row(r);
  }
}

void write_covariance(const std::filesystem::path& path, const ScenarioConfig& cfg, const TimeSeries& ts,
                      std::size_t s) {
  const Eigen::MatrixXd& A = ts.samples[s].A;
  const int n = static_cast<int>(A.rows() / 2);
  CsvWriter w(path);
  w.comment(kCovarianceSchema);
  w.comment("scenario " + cfg.name + "; t = " + num(ts.samples[s].t) + "; lab frame; order x1,p1,x2,p2,...");
  std::vector<std::string> head{"row"};
  for (int j = 1; j <= n; ++j) {
    head.push_back("x" + std::to_string(j));
    head.push_back("p" + std::to_string(j));
  }
  w.row(head);
  for (int i = 0; i < A.rows(); ++i) {
    std::vector<std::string> r{head[static_cast<std::size_t>(i + 1)]};
    for (int k = 0; k < A.cols(); ++k) r.push_back(num(A(i, k)));
    w.row(r);
  }
}

void write_trajectories(const std::filesystem::path& path, const ScenarioConfig& cfg, const TimeSeries& ts) {
  const int n = static_cast<int>(ts.omega.size());
  std::vector<int> modes = cfg.outputs.qnd_modes;
  if (modes.empty()) {
    for (int j = 1; j <= n; ++j) modes.push_back(j);
  }
  CsvWriter w(path);
  w.comment(kTrajectorySchema);
  w.comment("scenario " + cfg.name + "; lab-frame conditional means");
  std::vector<std::string> head{"trajectory", "t"};
  for (int j : modes) {
    head.push_back("x" + std::to_string(j));
    head.push_back("p" + std::to_string(j));
  }
  w.row(head);
  for (std::size_t k = 0; k < ts.trajectories.size(); ++k) {
    const Eigen::MatrixXd& tr = ts.trajectories[k];
    for (std::size_t s = 0; s < ts.samples.size(); ++s) {
      std::vector<std::string> r{std::to_string(k), num(ts.samples[s].t)};
      for (int j : modes) {
        r.push_back(num(tr(2 * (j - 1), static_cast<Eigen::Index>(s))));
        r.push_back(num(tr(2 * (j - 1) + 1, static_cast<Eigen::Index>(s))));
      }
      w.row(r);
    }
  }
}

void write_modes(const std::filesystem::path& dir, const PreparedSystem& sys) {
  const ModeBasis& basis = sys.basis;
  const Grid& grid = basis.grid();
  {
    CsvWriter w(dir / "modes.csv");
    w.comment("becsq-modes v1");
    std::vector<std::string> head{"x", "f0", "n0"};
    for (int j = 1; j <= basis.size(); ++j) {
      head.push_back("f_plus" + std::to_string(j));
      head.push_back("f_minus" + std::to_string(j));
    }
    w.row(head);
    const Eigen::VectorXd n0 = basis.ground_state().n0();
    for (int i = 0; i < grid.size(); ++i) {
      std::vector<std::string> r{num(grid.x(i)), num(basis.ground_state().f0(i)), num(n0(i))};
      for (const auto& m : basis.modes()) {
        r.push_back(num(m.f_plus(i)));
        r.push_back(num(m.f_minus(i)));
      }
      w.row(r);
    }
  }
  {
    CsvWriter w(dir / "pixel_overlaps.csv");
    w.comment("becsq-pixel-overlaps v1");
    std::vector<std::string> head{"mode"};
    for (int d = 0; d < sys.overlaps.pixel.cols(); ++d) head.push_back("d" + std::to_string(d + 1));
    w.row(head);
    for (int j = 0; j < sys.overlaps.pixel.rows(); ++j) {
      std::vector<std::string> r{std::to_string(j + 1)};
      for (int d = 0; d < sys.overlaps.pixel.cols(); ++d) r.push_back(num(sys.overlaps.pixel(j, d)));
      w.row(r);
    }
  }
  {
    CsvWriter w(dir / "mode_overlaps.csv");
    w.comment("becsq-mode-overlaps v1");
    std::vector<std::string> head{"mode"};
    for (int k = 0; k < sys.overlaps.mode.cols(); ++k) head.push_back("k" + std::to_string(k + 1));
    w.row(head);
    for (int j = 0; j < sys.overlaps.mode.rows(); ++j) {
      std::vector<std::string> r{std::to_string(j + 1)};
      for (int k = 0; k < sys.overlaps.mode.cols(); ++k) r.push_back(num(sys.overlaps.mode(j, k)));
      w.row(r);
    }
  }
}

// Time of the requested snapshot: the sample nearest to t.
std::size_t nearest_sample(const TimeSeries& ts, double t) {
  std::size_t best = 0;
  for (std::size_t s = 1; s < ts.samples.size(); ++s) {
    if (std::abs(ts.samples[s].t - t) < std::abs(ts.samples[best].t - t)) best = s;
  }
  return best;
}

nlohmann::json segment_json(const ScenarioConfig& cfg, const TimeSeries& ts, const std::vector<ProtocolSegment>& prot,
                            std::size_t s) {
  using nlohmann::json;
  const auto& seg = prot[s];
  const auto& sched = ts.schedules[s];
  const auto& c = ts.couplings[s];
  json nu = json::array(), nu_bar = json::array();
  for (int j = 0; j < c.n_modes(); ++j) {
    nu.push_back(c.nu(j));
    nu_bar.push_back(c.nu_bar(j));
  }
  json freqs = json::array();
  for (std::size_t i = 0; i < seg.frequencies.size(); ++i) {
    freqs.push_back({{"spec", cfg.segments[s].frequencies[i].describe()}, {"value", seg.frequencies[i]}});
  }
  return {{"label", seg.label},
          {"start", ts.segment_starts[s]},
          {"duration", seg.duration},
          {"kappa_sq", seg.kappa_sq},
          {"kappa_sq_per_two_pi", cfg.segments[s].kappa_sq_per_two_pi},
          {"continuous", sched.continuous()},
          {"frequencies", freqs},
          {"delta_phi", seg.delta_phi},
          {"gating_rule", to_string(seg.rule)},
          {"phase_reference", seg.lab_phase_reference ? "lab" : "segment"},
          {"duty_cycle", sched.duty_cycle()},
          {"n_pulses", sched.pulses.size()},
          {"feedback_mode", seg.feedback.target_mode},
          {"nu", nu},
          {"nu_bar", nu_bar},
          {"kernel_structure_mismatch", c.probing() ? kernel_structure_mismatch(c) : 0.0}};
}

struct RunProducts {
  TimeSeries series;
  std::vector<SampleMetrics> metrics;
};

RunProducts run_once(const ScenarioConfig& cfg, const PreparedSystem& sys) {
  RunProducts out;
  out.series = run_simulation(cfg, sys);
  out.metrics.reserve(out.series.samples.size());
  for (std::size_t s = 0; s < out.series.samples.size(); ++s) {
    out.metrics.push_back(evaluate_sample(cfg, sys, out.series, s));
  }
  return out;
}

}  // namespace

bool segment_targets_mode(const SegmentConfig& segment, int mode) { return segment_targets_pair(segment, mode, mode); }

bool segment_targets_pair(const SegmentConfig& segment, int j, int k) {
  for (const auto& f : segment.frequencies) {
    if (f.modes.size() != 2) continue;
    if ((f.modes[0] == j && f.modes[1] == k) || (f.modes[0] == k && f.modes[1] == j)) return true;
  }
  return false;
}

Grid scenario_grid(const ScenarioConfig& config) {
  if (config.grid.x_max && config.grid.n_points) return Grid(*config.grid.x_max, *config.grid.n_points);
  return default_grid(mu_estimate(config.trap));
}

PreparedSystem prepare_system(const ScenarioConfig& config) {
  config.validate();
  GpeOptions gpe;
  gpe.stencil_order = config.grid.stencil_order;
  const CondensateGroundState gs = solve_gpe_ground_state(config.trap, scenario_grid(config), gpe);
  PreparedSystem sys{solve_bdg(gs, config.n_modes), {}, 0.0, {}};
  sys.resolution_length = config.optics.resolution_length.value_or(resolution_length(
      config.trap.perp_length(), config.optics.wavelength_nm * 1e-9, config.trap.length_scale_m()));
  sys.overlaps = compute_overlaps(sys.basis, config.optics.detector, sys.resolution_length);
  sys.warnings = gs.warnings;
  for (const auto& w : sys.basis.warnings()) sys.warnings.push_back(w);
  return sys;
}

std::vector<ProtocolSegment> resolve_protocol(const ScenarioConfig& config, const Eigen::VectorXd& omega) {
  const int n = static_cast<int>(omega.size());
  std::vector<ProtocolSegment> out;
  for (const auto& s : config.segments) {
    ProtocolSegment p;
    p.label = s.label;
    p.duration = s.duration;
    p.kappa_sq = units::rate_from_per_two_pi(s.kappa_sq_per_two_pi);
    for (const auto& f : s.frequencies) {
      if (f.modes.empty()) {
        p.frequencies.push_back(f.value);
        continue;
      }
      double w = 0.0;
      for (int j : f.modes) {
        check_mode(j, n, s.label + ": frequencies");
        w += omega(j - 1);
      }
      p.frequencies.push_back(w);
    }
    p.delta_phi = units::kTwoPi * s.delta_phi_per_two_pi;
    p.rule = s.rule;
    if (s.feedback_mode > 0) check_mode(s.feedback_mode, n, s.label + ": feedback_mode");
    p.feedback.target_mode = s.feedback_mode;
    p.lab_phase_reference = s.lab_phase_reference;
    out.push_back(std::move(p));
  }
  return out;
}

SimulationOptions simulation_options(const ScenarioConfig& config) {
  SimulationOptions o;
  o.coupling_length = config.optics.coupling_length;
  o.sample_interval = config.outputs.sample_interval;
  o.sample_pulse_centres = config.outputs.sample_pulse_centres;
  o.extra_sample_times = config.outputs.snapshot_times;
  o.n_trajectories = config.ensemble.n_trajectories;
  o.seed = config.ensemble.seed;
  o.recorded_trajectories = config.ensemble.recorded_trajectories;
  o.n_threads = config.ensemble.threads;
  return o;
}

TimeSeries run_simulation(const ScenarioConfig& config, const PreparedSystem& system) {
  const int n = system.basis.size();
  auto check_all = [n](const std::vector<int>& modes, const std::string& what) {
    for (int j : modes) check_mode(j, n, what);
  };
  for (const auto& [a, b] : config.outputs.negativity) {
    check_all(a, "outputs.negativity");
    check_all(b, "outputs.negativity");
  }
  for (const auto& s : config.outputs.purity_subsets) check_all(s, "outputs.purity");
  check_all(config.outputs.hellinger_subset, "outputs.hellinger_subset");
  check_all(config.outputs.qnd_modes, "outputs.qnd_modes");
  for (const auto& [j, k] : config.outputs.qnd_pairs) check_all({j, k}, "outputs.qnd_pairs");
  return simulate(system.overlaps, resolve_protocol(config, system.overlaps.omega), simulation_options(config));
}

ScenarioConfig with_sweep_value(const ScenarioConfig& config, double value) {
  if (!config.sweep.enabled()) throw std::invalid_argument("with_sweep_value: no sweep configured");
  ScenarioConfig out = config;
  auto& seg = out.segments.at(static_cast<std::size_t>(config.sweep.segment - 1));
  if (config.sweep.parameter == "delta_phi") {
    seg.delta_phi_per_two_pi = value;
  } else if (config.sweep.parameter == "kappa_sq") {
    seg.kappa_sq_per_two_pi = value;
    seg.d0.reset();
    seg.eta.reset();
  } else {
    throw std::invalid_argument("with_sweep_value: unknown parameter '" + config.sweep.parameter + "'");
  }
  out.sweep = {};
  return out;
}

Eigen::MatrixXd comoving_covariance(const TimeSeries& series, std::size_t sample) {
  const Eigen::MatrixXd Q = comoving_rotation(series.omega, series.samples[sample].t);
  return Q * series.samples[sample].A * Q.transpose();
}

SampleMetrics evaluate_sample(const ScenarioConfig& config, const PreparedSystem& system, const TimeSeries& series,
                              std::size_t sample) {
  const Sample& smp = series.samples.at(sample);
  const int n = static_cast<int>(series.omega.size());
  SampleMetrics m;
  for (const auto& [a, b] : config.outputs.negativity) m.negativity.push_back(log_negativity(smp.A, a, b));
  for (const auto& s : config.outputs.purity_subsets) m.purity.push_back(purity(smp.A, s));
  m.hellinger = kNaN;
  if (!config.outputs.hellinger_subset.empty()) {
    const auto& sub = config.outputs.hellinger_subset;
    // Blocks are given in mode labels; re-index them within the subset.
    std::vector<std::pair<int, int>> blocks;
    auto pos = [&sub](int j) {
      for (std::size_t i = 0; i < sub.size(); ++i) {
        if (sub[i] == j) return static_cast<int>(i) + 1;
      }
      throw ConfigError("outputs.hellinger_blocks: mode " + std::to_string(j) + " not in hellinger_subset");
    };
    for (const auto& [j, k] : config.outputs.hellinger_blocks) blocks.emplace_back(pos(j), pos(k));
    GaussianState reduced{Eigen::VectorXd::Zero(2 * static_cast<Eigen::Index>(sub.size())),
                          reduce_modes(smp.A, sub), smp.t};
    const GaussianState target = hellinger_target_state(reduced, blocks);
    m.hellinger = hellinger_distance(reduced.R, reduced.A, target.R, target.A);
  }
  m.min_symplectic = min_symplectic_eigenvalue(smp.A);

  m.noncondensate = 0.0;
  if (series.ensemble.n_trajectories > 0) {
    const Eigen::VectorXd w = population_weights(system.basis, n);
    const auto col = static_cast<Eigen::Index>(sample);
    for (int j = 0; j < n; ++j) {
      double second = 0.0;
      for (int q = 0; q < 2; ++q) {
        const double mean = series.ensemble.mean(2 * j + q, col);
        second += mean * mean + series.ensemble.variance(2 * j + q, col);
      }
      m.noncondensate += w(j) * 0.5 * second;
    }
  }

  const auto seg_index = static_cast<std::size_t>(smp.segment);
  for (int j : config.outputs.qnd_modes) {
    const bool targeted = seg_index < config.segments.size() && segment_targets_mode(config.segments[seg_index], j);
    if (!targeted) {
      m.var_qnd.push_back(kNaN);
      m.sigma_qnd.push_back(kNaN);
      continue;
    }
    const double nu = series.couplings[seg_index].nu(j - 1);
    m.var_qnd.push_back(qnd_variance(nu, smp.segment_probe_time));
    m.sigma_qnd.push_back(std::sqrt(nu * smp.segment_probe_time / 2.0));
  }
  return m;
}

RunReport run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir, std::ostream* log) {
  using nlohmann::json;
  auto say = [log](const std::string& msg) {
    if (log) *log << msg << std::endl;
  };
  config.validate();
  std::filesystem::create_directories(out_dir);

  say("[" + config.name + "] ground state and Bogoliubov modes");
  const PreparedSystem sys = prepare_system(config);
  say("[" + config.name + "] simulating " + num(config.total_duration()) + " / omega_x");
  RunProducts main = run_once(config, sys);
  const TimeSeries& ts = main.series;
  const QndCurves qnd = qnd_curves(config, sys, ts);
  const std::vector<ProtocolSegment> protocol = resolve_protocol(config, sys.overlaps.omega);

  RunReport report;
  report.files.push_back(out_dir / "timeseries.csv");
  write_timeseries(report.files.back(), config, ts, main.metrics, qnd);

  std::vector<std::size_t> snapshots;
  for (double t : config.outputs.snapshot_times) snapshots.push_back(nearest_sample(ts, t));
  json snapshot_json = json::array();
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const auto path = out_dir / ("covariance_" + std::to_string(i + 1) + ".csv");
    write_covariance(path, config, ts, snapshots[i]);
    report.files.push_back(path);
    snapshot_json.push_back({{"file", path.filename().string()}, {"t", ts.samples[snapshots[i]].t}});
  }
  {
    const auto path = out_dir / "covariance_final.csv";
    write_covariance(path, config, ts, ts.samples.size() - 1);
    report.files.push_back(path);
    snapshot_json.push_back({{"file", path.filename().string()}, {"t", ts.samples.back().t}});
  }
  if (!ts.trajectories.empty()) {
    report.files.push_back(out_dir / "trajectories.csv");
    write_trajectories(report.files.back(), config, ts);
  }
  if (config.outputs.write_modes) {
    write_modes(out_dir, sys);
    for (const char* f : {"modes.csv", "pixel_overlaps.csv", "mode_overlaps.csv"}) report.files.push_back(out_dir / f);
  }

  json sweep_json = nullptr;
  if (config.sweep.enabled()) {
    const int n = sys.basis.size();
    CsvWriter w(out_dir / "sweep.csv");
    w.comment(kSweepSchema);
    w.comment("scenario " + config.name + "; end-of-run values per " + config.sweep.parameter + " (segment " +
              std::to_string(config.sweep.segment) + ")");
    std::vector<std::string> head{config.sweep.parameter, "duty_cycle", "probe_time"};
    for (int j = 1; j <= n; ++j) {
      head.push_back("var_x" + std::to_string(j) + "_0");
      head.push_back("var_p" + std::to_string(j) + "_0");
    }
    for (int j : config.outputs.qnd_modes) head.push_back("var_qnd" + std::to_string(j));
    for (const auto& p : config.outputs.negativity) head.push_back(negativity_column(p));
    for (const auto& s : config.outputs.purity_subsets) head.push_back(purity_column(s));
    if (!config.outputs.hellinger_subset.empty()) head.push_back("D_H");
    head.push_back("min_symplectic");
    w.row(head);
    for (double v : config.sweep.values) {
      say("[" + config.name + "] sweep " + config.sweep.parameter + " = " + num(v));
      ScenarioConfig c = with_sweep_value(config, v);
      c.ensemble.n_trajectories = 0;
      c.ensemble.recorded_trajectories = 0;
      const RunProducts run = run_once(c, sys);
      const std::size_t last = run.series.samples.size() - 1;
      const SampleMetrics& m = run.metrics[last];
      const Eigen::MatrixXd A0 = comoving_covariance(run.series, last);
      const auto seg = static_cast<std::size_t>(config.sweep.segment - 1);
      std::vector<std::string> r{num(v), num(run.series.schedules[seg].duty_cycle()),
                                 num(run.series.samples[last].probe_time)};
      for (int j = 0; j < 2 * n; ++j) r.push_back(num(A0(j, j)));
      for (double q : m.var_qnd) r.push_back(num(q));
      for (double e : m.negativity) r.push_back(num(e));
      for (double p : m.purity) r.push_back(num(p));
      if (!config.outputs.hellinger_subset.empty()) r.push_back(num(m.hellinger));
      r.push_back(num(m.min_symplectic));
      w.row(r);
    }
    report.files.push_back(out_dir / "sweep.csv");
    sweep_json = {{"segment", config.sweep.segment},
                  {"parameter", config.sweep.parameter},
                  {"values", config.sweep.values},
                  {"file", "sweep.csv"}};
  }

  // Metadata.
  const auto& gs = sys.basis.ground_state();
  const auto& det = sys.overlaps.detector;
  json modes = json::array();
  for (const auto& m : sys.basis.modes()) {
    modes.push_back({{"j", m.index}, {"omega", m.omega}, {"parity", m.parity == Parity::Even ? "even" : "odd"},
                     {"fbar2", sys.overlaps.mode(m.index - 1, m.index - 1)}});
  }
  json segments = json::array();
  for (std::size_t s = 0; s < protocol.size(); ++s) segments.push_back(segment_json(config, ts, protocol, s));
  json pairs = json::array();
  for (std::size_t i = 0; i < config.outputs.qnd_pairs.size(); ++i) {
    const auto& [j, k] = config.outputs.qnd_pairs[i];
    pairs.push_back({{"j", j},
                     {"k", k},
                     {"beta", qnd.beta[i]},
                     {"E_qnd_asymptote", qnd.asymptote[i]},
                     {"segment", qnd.segment[i] + 1}});
  }
  std::vector<std::string> warnings = sys.warnings;
  for (const auto& w : ts.warnings) warnings.push_back(w);
  for (const auto& w : warnings) say("[" + config.name + "] warning: " + w);

  json meta = {
      {"schema", "becsq-metadata v1"},
      {"scenario", config.name},
      {"config", to_json(config)},
      {"seed", config.ensemble.seed},
      {"units", "hbar = m = omega_x = 1; lengths in l_x; rates in omega_x; config rates in omega_x / 2 pi"},
      {"grid", {{"x_max", gs.grid.x_max()}, {"n_points", gs.grid.size()}, {"dx", gs.grid.dx()},
                {"stencil_order", gs.stencil_order}}},
      {"ground_state", {{"mu", gs.mu}, {"g1d", gs.g1d}, {"atom_number", gs.atom_number}, {"residual", gs.residual}}},
      {"n_modes", sys.basis.size()},
      {"modes", modes},
      {"optics",
       {{"detector_length", det.length},
        {"pixel_width", det.pixel_width},
        {"n_pixels", det.n_pixels()},
        {"resolution_length", sys.resolution_length},
        {"coupling_length", config.optics.coupling_length}}},
      {"segments", segments},
      {"integration",
       {{"nominal_dt", ts.nominal_dt}, {"steps_on", ts.steps_on}, {"steps_off", ts.steps_off},
        {"n_samples", ts.samples.size()}, {"duration", ts.duration}}},
      {"ensemble", {{"n_trajectories", ts.ensemble.n_trajectories}, {"recorded", ts.trajectories.size()}}},
      {"qnd_pairs", pairs},
      {"E_qnd_definition",
       "negativity of modes j, k under A' = d (E - A M A), restricted to the two modes, with rotation blocks zeroed "
       "and d the duty cycle of the first segment gating at w_j + w_k; from vacuum, in segment time"},
      {"N_nc_definition", "sum_j E[|b_j|^2] int (u_j^2 + v_j^2) dx with b_j = (x_j + i p_j) / sqrt 2 over the "
                          "trajectory ensemble; quantum depletion excluded"},
      {"snapshots", snapshot_json},
      {"sweep", sweep_json},
      {"warnings", warnings},
  };
  {
    std::ofstream f(out_dir / "metadata.json");
    if (!f) throw std::runtime_error("cannot write metadata.json");
    f << meta.dump(2) << '\n';
  }
  report.files.push_back(out_dir / "metadata.json");
  report.metadata = std::move(meta);
  report.series = std::move(main.series);
  say("[" + config.name + "] wrote " + std::to_string(report.files.size()) + " files to " + out_dir.string());
  return report;
}

}  // namespace becsq
