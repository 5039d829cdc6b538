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

#include "becsq/scenario_config.hpp"

namespace becsq {

struct Preset {
  std::string name;
  std::string description;
  std::string toml;
};

/// fig1b, fig1c_i, fig1c_ii, fig2, fig2_noninteracting, fig3, fig4_nofeedback,
/// fig4_feedback.
const std::vector<Preset>& presets();

/// Parsed preset; throws std::invalid_argument for unknown names.
ScenarioConfig preset_config(const std::string& name);

}  // namespace becsq
