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

#include <string>
#include <vector>

namespace becsq {

enum class GatingRule { Intersection, Union };

const char* to_string(GatingRule rule);
GatingRule gating_rule_from_string(const std::string& name);

struct Pulse {
  double start = 0.0;
  double end = 0.0;
  /// Nominal centre; the t = 0 half pulse keeps centre 0.
  double centre = 0.0;
  double duration() const { return end - start; }
};

/// Probe gating for one protocol segment, on [0, horizon).
struct StroboSchedule {
  std::vector<double> frequencies;  // empty means continuous probing
  double delta_phi = 0.0;
  double horizon = 0.0;
  GatingRule rule = GatingRule::Intersection;
  double phase_origin = 0.0;
  std::vector<Pulse> pulses;  // sorted, disjoint
  std::vector<std::string> warnings;

  bool continuous() const { return frequencies.empty(); }
  bool is_on(double t) const;
  /// Accumulated probe time tau_T over [0, t).
  double probe_time(double t) const;
  double duty_cycle() const;
};

/// The probe is on when the phase varpi_i t lies within delta_phi / 2 of a
/// multiple of 2 pi, for every frequency (intersection) or any frequency
/// (union). Times are local; the phases are varpi_i (phase_origin + t), so a
/// segment starting at t0 with phase_origin = t0 stays locked to the lab clock.
StroboSchedule build_schedule(const std::vector<double>& frequencies, double delta_phi, double horizon,
                              GatingRule rule = GatingRule::Intersection, double phase_origin = 0.0);

}  // namespace becsq
