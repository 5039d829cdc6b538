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

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "becsq/presets.hpp"
#include "becsq/runner.hpp"

namespace {

int report_config_error(const std::string& source, const becsq::ConfigError& e) {
  std::cerr << source << ": " << e.what() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"becsq: measurement-induced squeezing and entanglement of Bogoliubov modes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("config", config_path, "Scenario TOML file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (default: out/<name>)");

  std::string preset_name;
  std::uint64_t seed = 0;
  int trajectories = -1;
  auto* preset = app.add_subcommand("preset", "Run a built-in preset");
  preset->add_option("name", preset_name, "Preset name")->required();
  preset->add_option("--out", out_dir, "Output directory (default: out/<name>)");
  auto* seed_opt = preset->add_option("--seed", seed, "Base RNG seed");
  preset->add_option("--trajectories", trajectories, "Number of trajectories")->check(CLI::NonNegativeNumber);

  auto* list = app.add_subcommand("list-presets", "List built-in presets");
  std::string show_name;
  auto* show = app.add_subcommand("show-preset", "Print a preset as TOML");
  show->add_option("name", show_name, "Preset name")->required();

  auto* validate = app.add_subcommand("validate", "Parse and check a scenario file");
  validate->add_option("config", config_path, "Scenario TOML file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& p : becsq::presets()) std::cout << p.name << "\t" << p.description << '\n';
      return 0;
    }
    if (show->parsed()) {
      for (const auto& p : becsq::presets()) {
        if (p.name == show_name) {
          std::cout << p.toml;
          return 0;
        }
      }
      std::cerr << "unknown preset '" << show_name << "'\n";
      return 2;
    }
    if (validate->parsed()) {
      try {
        const auto cfg = becsq::load_scenario(config_path);
        std::cout << config_path << ": ok (" << cfg.name << ", " << cfg.segments.size() << " segments, "
                  << cfg.total_duration() << " / omega_x)\n";
        return 0;
      } catch (const becsq::ConfigError& e) {
        return report_config_error(config_path, e);
      }
    }

    becsq::ScenarioConfig cfg;
    if (run->parsed()) {
      try {
        cfg = becsq::load_scenario(config_path);
      } catch (const becsq::ConfigError& e) {
        return report_config_error(config_path, e);
      }
    } else {
      try {
        cfg = becsq::preset_config(preset_name);
      } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "; see list-presets\n";
        return 2;
      }
      if (*seed_opt) cfg.ensemble.seed = seed;
      if (trajectories >= 0) cfg.ensemble.n_trajectories = trajectories;
      cfg.validate();
    }
    const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path("out") / cfg.name : std::filesystem::path(out_dir);
    becsq::run_scenario(cfg, dir, &std::cerr);
    return 0;
  } catch (const becsq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
