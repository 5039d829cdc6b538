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

#include "becsq/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace becsq {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Pulse> windows_for(double frequency, double delta_phi, double horizon, double origin) {
  std::vector<Pulse> out;
  const double half = 0.5 * delta_phi / frequency;
  const double period = kTwoPi / frequency;
  for (long l = static_cast<long>(std::floor(origin / period));; ++l) {
    const double centre = l * period - origin;
    if (centre + half <= 0.0) continue;
    const double start = std::max(0.0, centre - half);
    if (start >= horizon) break;
    out.push_back({start, std::min(horizon, centre + half), centre});
  }
  return out;
}

std::vector<Pulse> intersect(const std::vector<Pulse>& a, const std::vector<Pulse>& b) {
  std::vector<Pulse> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double start = std::max(a[i].start, b[j].start);
    const double end = std::min(a[i].end, b[j].end);
    if (end > start) out.push_back({start, end, 0.5 * (start + end)});
    (a[i].end < b[j].end ? i : j)++;
  }
  return out;
}

std::vector<Pulse> merge(std::vector<Pulse> all) {
  std::sort(all.begin(), all.end(), [](const Pulse& x, const Pulse& y) { return x.start < y.start; });
  std::vector<Pulse> out;
  for (const auto& p : all) {
    if (!out.empty() && p.start <= out.back().end) {
      out.back().end = std::max(out.back().end, p.end);
      out.back().centre = 0.5 * (out.back().start + out.back().end);
    } else {
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace

const char* to_string(GatingRule rule) { return rule == GatingRule::Intersection ? "intersection" : "union"; }

GatingRule gating_rule_from_string(const std::string& name) {
  if (name == "intersection") return GatingRule::Intersection;
  if (name == "union") return GatingRule::Union;
  throw std::invalid_argument("unknown gating rule '" + name + "' (expected intersection or union)");
}

bool StroboSchedule::is_on(double t) const {
  auto it = std::upper_bound(pulses.begin(), pulses.end(), t, [](double v, const Pulse& p) { return v < p.end; });
  return it != pulses.end() && it->start <= t;
}

double StroboSchedule::probe_time(double t) const {
  double total = 0.0;
  for (const auto& p : pulses) {
    if (p.start >= t) break;
    total += std::min(p.end, t) - p.start;
  }
  return total;
}

double StroboSchedule::duty_cycle() const { return horizon > 0.0 ? probe_time(horizon) / horizon : 0.0; }

StroboSchedule build_schedule(const std::vector<double>& frequencies, double delta_phi, double horizon,
                              GatingRule rule, double phase_origin) {
  if (horizon < 0.0) throw std::invalid_argument("schedule: negative horizon");
  StroboSchedule s;
  s.frequencies = frequencies;
  s.delta_phi = delta_phi;
  s.horizon = horizon;
  s.rule = rule;
  s.phase_origin = phase_origin;
  if (horizon == 0.0) return s;
  if (frequencies.empty()) {
    s.pulses.push_back({0.0, horizon, 0.5 * horizon});
    return s;
  }
  if (!(delta_phi > 0.0) || !(delta_phi < kTwoPi)) throw std::invalid_argument("schedule: need 0 < delta_phi < 2 pi");
  for (double f : frequencies) {
    if (!(f > 0.0)) throw std::invalid_argument("schedule: frequencies must be positive");
  }

  if (frequencies.size() == 1) {
    s.pulses = windows_for(frequencies[0], delta_phi, horizon, phase_origin);
  } else if (rule == GatingRule::Intersection) {
    s.pulses = windows_for(frequencies[0], delta_phi, horizon, phase_origin);
    for (std::size_t i = 1; i < frequencies.size(); ++i) {
      s.pulses = intersect(s.pulses, windows_for(frequencies[i], delta_phi, horizon, phase_origin));
    }
  } else {
    std::vector<Pulse> all;
    for (double f : frequencies) {
      auto w = windows_for(f, delta_phi, horizon, phase_origin);
      all.insert(all.end(), w.begin(), w.end());
    }
    s.pulses = merge(std::move(all));
  }
  // Drop slivers left by floating-point edge coincidences.
  std::erase_if(s.pulses, [](const Pulse& p) { return p.duration() <= 1e-12; });
  if (s.pulses.size() <= 1 && frequencies.size() > 1) {
    s.warnings.push_back("multi-frequency gating leaves " + std::to_string(s.pulses.size()) +
                         " pulse(s) over the horizon; duty cycle " + std::to_string(s.duty_cycle()));
  }
  return s;
}

}  // namespace becsq
