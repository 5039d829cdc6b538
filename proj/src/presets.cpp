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

#include "becsq/presets.hpp"

#include <stdexcept>

namespace becsq {
namespace {

// Shared trap: N = 1000 atoms, omega_perp = 100 omega_x, mu = 2 hbar omega_x.
constexpr const char* kInteractingTrap = R"(
[trap]
atom_number = 1000
omega_perp_ratio = 100
mu_target = 2.0

[modes]
n_modes = 10
)";

constexpr const char* kFig1b = R"(
name = "fig1b"
description = "Squeeze mode 3, then modes 1 and 5 together, then erase with weak continuous probing"

[[protocol.segments]]
label = "squeeze mode 3"
duration = 78.53981633974483          # 25 pi
kappa_sq = 100
frequencies = [[3, 3]]
delta_phi = 0.05

[[protocol.segments]]
label = "squeeze modes 1 and 5"
duration = 219.9114857512855          # 70 pi
kappa_sq = 100
frequencies = [[1, 1], [5, 5]]
delta_phi = 0.1
rule = "intersection"

[[protocol.segments]]
label = "eraser"
duration = 15.707963267948966         # 5 pi
kappa_sq = 50

[outputs]
sample_interval_periods = 0.05
qnd_modes = [1, 3, 5]
purity = [[1, 3, 5]]
snapshot_periods = [12.5, 47.5]
)";

constexpr const char* kFig1cI = R"(
name = "fig1c_i"
description = "Strong continuous probing: broadband correlated steady state"

[[protocol.segments]]
label = "continuous"
duration_periods = 10
kappa_sq = 1000

[outputs]
sample_interval_periods = 0.1
negativity = [[[1], [3]]]
purity = [[1, 3, 5]]
)";

constexpr const char* kFig1cII = R"(
name = "fig1c_ii"
description = "Stroboscopic entangling of modes 1 and 3 at w1 + w3"

[[protocol.segments]]
label = "entangle 1-3"
duration_periods = 100
kappa_sq = 4
frequencies = [[1, 3]]
delta_phi = 0.03

[outputs]
sample_interval_periods = 0.5
negativity = [[[1], [3]]]
purity = [[1, 3, 5]]
qnd_pairs = [[1, 3]]
)";

constexpr const char* kFig2 = R"(
name = "fig2"
description = "QND squeezing of mode 3 at 2 w3; sweep over the pulse window"

[[protocol.segments]]
label = "squeeze mode 3"
duration_periods = 100
kappa_sq = 100
frequencies = [[3, 3]]
delta_phi = 0.01

[outputs]
sample_pulse_centres = true
qnd_modes = [3]
purity = [[1, 3, 5]]
hellinger_subset = [1, 3, 5]
hellinger_blocks = [[3, 3]]

[sweep]
segment = 1
parameter = "delta_phi"
values = [0.01, 0.02, 0.03, 0.05, 0.07, 0.1, 0.15]
)";

constexpr const char* kFig3 = R"(
name = "fig3"
description = "Stroboscopic entangling of modes 1 and 3 at w1 + w3"

[[protocol.segments]]
label = "entangle 1-3"
duration_periods = 100
kappa_sq = 30
frequencies = [[1, 3]]
delta_phi = 0.03

[outputs]
sample_interval_periods = 0.25
negativity = [[[1], [3]]]
purity = [[1, 3, 5]]
hellinger_subset = [1, 3, 5]
hellinger_blocks = [[1, 1], [3, 3], [1, 3]]
qnd_pairs = [[1, 3]]
)";

constexpr const char* kFig4Body = R"(
[[protocol.segments]]
label = "squeeze mode 3"
duration_periods = 100
kappa_sq = 100
frequencies = [[3, 3]]
delta_phi = 0.15
{FEEDBACK}
[ensemble]
n_trajectories = 1000
seed = 20240101
recorded_trajectories = 8

[outputs]
sample_interval = 0.1
qnd_modes = [3]
)";

std::string with_trap(const std::string& body, const std::string& trap = kInteractingTrap) { return body + trap; }

std::string fig4(bool feedback) {
  std::string body = kFig4Body;
  const std::string key = "{FEEDBACK}";
  body.replace(body.find(key), key.size(), feedback ? "feedback_mode = 3\n" : "");
  const std::string head = feedback
                               ? "name = \"fig4_feedback\"\ndescription = \"fig4_nofeedback with critically damped "
                                 "feedback on mode 3\"\n"
                               : "name = \"fig4_nofeedback\"\ndescription = \"Diffusion of conditional means of mode 3 "
                                 "over 1000 trajectories\"\n";
  return head + body;
}

std::string fig2_noninteracting() {
  std::string body = kFig2;
  body.replace(body.find("name = \"fig2\""), 13, "name = \"fig2_noninteracting\"");
  body.replace(body.find("description = \"QND"), 18, "description = \"Noninteracting comparison: QND");
  return body + R"(
[trap]
atom_number = 1000
omega_perp_ratio = 100
g1d = 0.0

[modes]
n_modes = 10
)";
}

std::vector<Preset> build() {
  std::vector<Preset> out;
  auto add = [&](const std::string& toml) {
    const ScenarioConfig cfg = parse_scenario(toml, "preset");
    out.push_back({cfg.name, cfg.description, toml});
  };
  add(with_trap(kFig1b));
  add(with_trap(kFig1cI));
  add(with_trap(kFig1cII));
  add(with_trap(kFig2));
  add(fig2_noninteracting());
  add(with_trap(kFig3));
  add(with_trap(fig4(false)));
  add(with_trap(fig4(true)));
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

ScenarioConfig preset_config(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return parse_scenario(p.toml, "preset " + name);
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace becsq
