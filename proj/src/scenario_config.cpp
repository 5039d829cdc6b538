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

#include "becsq/scenario_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "toml.hpp"

#include "becsq/units.hpp"

namespace becsq {
namespace {

int line_of(const toml::node& node) { return static_cast<int>(node.source().begin.line); }

/// Typed access to one TOML table; rejects keys nobody asked for.
class TableReader {
 public:
  TableReader(const toml::table& table, std::string context) : table_(table), context_(std::move(context)) {}

  const toml::node* find(std::string_view key) {
    used_.insert(std::string(key));
    return table_.get(key);
  }

  std::optional<double> number(std::string_view key) {
    const toml::node* node = find(key);
    if (node == nullptr) return std::nullopt;
    if (auto v = node->value<double>(); v && (node->is_floating_point() || node->is_integer())) return *v;
    throw error(*node, key, "expected a number");
  }

  std::optional<std::int64_t> integer(std::string_view key) {
    const toml::node* node = find(key);
    if (node == nullptr) return std::nullopt;
    if (node->is_integer()) return *node->value<std::int64_t>();
    throw error(*node, key, "expected an integer");
  }

  std::optional<bool> boolean(std::string_view key) {
    const toml::node* node = find(key);
    if (node == nullptr) return std::nullopt;
    if (node->is_boolean()) return *node->value<bool>();
    throw error(*node, key, "expected true or false");
  }

  std::optional<std::string> string(std::string_view key) {
    const toml::node* node = find(key);
    if (node == nullptr) return std::nullopt;
    if (node->is_string()) return *node->value<std::string>();
    throw error(*node, key, "expected a string");
  }

  const toml::array* array(std::string_view key) {
    const toml::node* node = find(key);
    if (node == nullptr) return nullptr;
    if (!node->is_array()) throw error(*node, key, "expected an array");
    return node->as_array();
  }

  const toml::table* table(std::string_view key) {
    const toml::node* node = find(key);
    if (node == nullptr) return nullptr;
    if (!node->is_table()) throw error(*node, key, "expected a table");
    return node->as_table();
  }

  void finish() const {
    for (const auto& [key, node] : table_) {
      if (!used_.contains(std::string(key.str()))) {
        throw ConfigError("unknown key '" + context_ + std::string(key.str()) + "'", line_of(node));
      }
    }
  }

  int line_of_key(std::string_view key) const {
    const toml::node* node = table_.get(key);
    return node != nullptr ? line_of(*node) : line_of_table();
  }
  int line_of_table() const { return static_cast<int>(table_.source().begin.line); }
  ConfigError error(const toml::node& node, std::string_view key, const std::string& what) const {
    return ConfigError("'" + context_ + std::string(key) + "': " + what, line_of(node));
  }

 private:
  const toml::table& table_;
  std::string context_;
  std::set<std::string> used_;
};

std::vector<int> int_list(const toml::array& arr, const std::string& what) {
  std::vector<int> out;
  for (const auto& el : arr) {
    if (!el.is_integer()) throw ConfigError(what + ": expected integers", line_of(el));
    out.push_back(static_cast<int>(*el.value<std::int64_t>()));
  }
  return out;
}

std::vector<double> number_list(const toml::array& arr, const std::string& what) {
  std::vector<double> out;
  for (const auto& el : arr) {
    auto v = el.value<double>();
    if (!v) throw ConfigError(what + ": expected numbers", line_of(el));
    out.push_back(*v);
  }
  return out;
}

const toml::array& nested_array(const toml::node& el, const std::string& what) {
  if (!el.is_array()) throw ConfigError(what + ": expected an array", line_of(el));
  return *el.as_array();
}

std::optional<double> duration_from(TableReader& r, const std::string& base, int line) {
  auto time = r.number(base);
  auto periods = r.number(base + "_periods");
  if (time && periods) throw ConfigError("give either '" + base + "' or '" + base + "_periods', not both", line);
  if (periods) return units::trap_periods(*periods);
  return time;
}

void parse_trap(const toml::table& t, TrapConfig& trap) {
  TableReader r(t, "trap.");
  if (auto v = r.number("atom_number")) trap.atom_number = *v;
  if (auto v = r.number("omega_perp_ratio")) trap.omega_perp_ratio = *v;
  trap.g1d = r.number("g1d");
  trap.mu_target = r.number("mu_target");
  if (auto v = r.number("omega_x_hz")) trap.omega_x_hz = *v;
  if (auto v = r.number("mass_amu")) trap.mass_amu = *v;
  r.finish();
  try {
    trap.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), r.line_of_table());
  }
}

void parse_grid(const toml::table& t, GridSettings& grid) {
  TableReader r(t, "grid.");
  grid.x_max = r.number("x_max");
  if (auto v = r.integer("n_points")) grid.n_points = static_cast<int>(*v);
  if (auto v = r.integer("stencil_order")) grid.stencil_order = static_cast<int>(*v);
  r.finish();
  if (grid.stencil_order != 2 && grid.stencil_order != 4 && grid.stencil_order != 6) {
    throw ConfigError("grid.stencil_order must be 2, 4 or 6", r.line_of_key("stencil_order"));
  }
  if (grid.x_max.has_value() != grid.n_points.has_value()) {
    throw ConfigError("grid: set both x_max and n_points, or neither", r.line_of_table());
  }
  if (grid.n_points && (*grid.n_points < 8 || *grid.n_points % 2 != 0)) {
    throw ConfigError("grid.n_points must be even and >= 8", r.line_of_key("n_points"));
  }
  if (grid.x_max && !(*grid.x_max > 0.0)) throw ConfigError("grid.x_max must be positive", r.line_of_key("x_max"));
}

void parse_optics(const toml::table& t, OpticsSettings& optics) {
  TableReader r(t, "optics.");
  if (auto v = r.number("wavelength_nm")) optics.wavelength_nm = *v;
  optics.resolution_length = r.number("resolution_length");
  if (auto v = r.number("detector_length")) optics.detector.length = *v;
  if (auto v = r.number("pixel_width")) optics.detector.pixel_width = *v;
  if (auto v = r.number("coupling_length")) optics.coupling_length = *v;
  r.finish();
  try {
    optics.detector.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), r.line_of_table());
  }
  if (!(optics.wavelength_nm > 0.0)) throw ConfigError("optics.wavelength_nm must be positive", r.line_of_key("wavelength_nm"));
  if (!(optics.coupling_length > 0.0)) {
    throw ConfigError("optics.coupling_length must be positive", r.line_of_key("coupling_length"));
  }
  if (optics.resolution_length && *optics.resolution_length < 0.0) {
    throw ConfigError("optics.resolution_length must be >= 0", r.line_of_key("resolution_length"));
  }
}

FrequencySpec parse_frequency(const toml::node& el) {
  FrequencySpec f;
  if (el.is_array()) {
    f.modes = int_list(*el.as_array(), "frequencies");
    if (f.modes.empty()) throw ConfigError("frequencies: empty mode list", line_of(el));
  } else if (auto v = el.value<double>()) {
    f.value = *v;
    if (!(f.value > 0.0)) throw ConfigError("frequencies: values must be positive", line_of(el));
  } else {
    throw ConfigError("frequencies: entries are mode lists like [1, 3] or numbers", line_of(el));
  }
  return f;
}

SegmentConfig parse_segment(const toml::table& t, int index) {
  TableReader r(t, "protocol.segments[" + std::to_string(index) + "].");
  const int line = r.line_of_table();
  SegmentConfig s;
  s.label = r.string("label").value_or("segment " + std::to_string(index + 1));
  auto duration = duration_from(r, "duration", line);
  if (!duration) throw ConfigError("segment needs 'duration' or 'duration_periods'", line);
  s.duration = *duration;
  auto kappa = r.number("kappa_sq");
  s.d0 = r.number("d0");
  s.eta = r.number("eta");
  if (s.d0.has_value() != s.eta.has_value()) throw ConfigError("give both d0 and eta, or neither", line);
  if (kappa && s.d0) throw ConfigError("give kappa_sq or (d0, eta), not both", line);
  if (!kappa && !s.d0) throw ConfigError("segment needs 'kappa_sq' (or d0 and eta)", line);
  s.kappa_sq_per_two_pi = kappa ? *kappa : *s.d0 * *s.eta;
  if (const auto* arr = r.array("frequencies")) {
    for (const auto& el : *arr) s.frequencies.push_back(parse_frequency(el));
  }
  s.delta_phi_per_two_pi = r.number("delta_phi").value_or(0.0);
  if (auto rule = r.string("rule")) {
    try {
      s.rule = gating_rule_from_string(*rule);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), r.line_of_key("rule"));
    }
  }
  s.feedback_mode = static_cast<int>(r.integer("feedback_mode").value_or(0));
  if (auto ref = r.string("phase_reference")) {
    if (*ref != "lab" && *ref != "segment") {
      throw ConfigError("phase_reference must be \"lab\" or \"segment\"", r.line_of_key("phase_reference"));
    }
    s.lab_phase_reference = *ref == "lab";
  }
  r.finish();
  if (s.duration < 0.0) throw ConfigError("segment duration must be >= 0", line);
  if (s.kappa_sq_per_two_pi < 0.0) throw ConfigError("kappa_sq must be >= 0", line);
  if (!s.frequencies.empty() && !(s.delta_phi_per_two_pi > 0.0 && s.delta_phi_per_two_pi < 1.0)) {
    throw ConfigError("delta_phi (in units of 2 pi) must lie in (0, 1) for stroboscopic segments", r.line_of_key("delta_phi"));
  }
  if (s.feedback_mode < 0) throw ConfigError("feedback_mode must be >= 0", r.line_of_key("feedback_mode"));
  return s;
}

void parse_outputs(const toml::table& t, OutputSettings& out) {
  TableReader r(t, "outputs.");
  const int line = r.line_of_table();
  if (auto v = duration_from(r, "sample_interval", line)) out.sample_interval = *v;
  if (auto v = r.boolean("sample_pulse_centres")) out.sample_pulse_centres = *v;
  if (const auto* arr = r.array("snapshot_times")) out.snapshot_times = number_list(*arr, "outputs.snapshot_times");
  if (const auto* arr = r.array("snapshot_periods")) {
    for (double p : number_list(*arr, "outputs.snapshot_periods")) out.snapshot_times.push_back(units::trap_periods(p));
  }
  if (const auto* arr = r.array("negativity")) {
    for (const auto& el : *arr) {
      const auto& pair = nested_array(el, "outputs.negativity");
      if (pair.size() != 2) throw ConfigError("outputs.negativity: entries are [[modes A], [modes B]]", line_of(el));
      out.negativity.emplace_back(int_list(nested_array(pair[0], "outputs.negativity"), "outputs.negativity"),
                                  int_list(nested_array(pair[1], "outputs.negativity"), "outputs.negativity"));
    }
  }
  if (const auto* arr = r.array("purity")) {
    for (const auto& el : *arr) out.purity_subsets.push_back(int_list(nested_array(el, "outputs.purity"), "outputs.purity"));
  }
  if (const auto* arr = r.array("hellinger_subset")) out.hellinger_subset = int_list(*arr, "outputs.hellinger_subset");
  if (const auto* arr = r.array("hellinger_blocks")) {
    for (const auto& el : *arr) {
      auto b = int_list(nested_array(el, "outputs.hellinger_blocks"), "outputs.hellinger_blocks");
      if (b.size() != 2) throw ConfigError("outputs.hellinger_blocks: entries are [j, k]", line_of(el));
      out.hellinger_blocks.emplace_back(b[0], b[1]);
    }
  }
  if (const auto* arr = r.array("qnd_modes")) out.qnd_modes = int_list(*arr, "outputs.qnd_modes");
  if (const auto* arr = r.array("qnd_pairs")) {
    for (const auto& el : *arr) {
      auto b = int_list(nested_array(el, "outputs.qnd_pairs"), "outputs.qnd_pairs");
      if (b.size() != 2) throw ConfigError("outputs.qnd_pairs: entries are [j, k]", line_of(el));
      out.qnd_pairs.emplace_back(b[0], b[1]);
    }
  }
  if (auto v = r.boolean("write_modes")) out.write_modes = *v;
  r.finish();
  if (out.sample_interval < 0.0) throw ConfigError("outputs.sample_interval must be >= 0", line);
}

void check_mode(int j, int n_modes, const std::string& where) {
  if (j < 1 || j > n_modes) {
    throw ConfigError(where + ": mode " + std::to_string(j) + " outside 1.." + std::to_string(n_modes));
  }
}

}  // namespace

std::string FrequencySpec::describe() const {
  if (modes.empty()) return std::to_string(value);
  std::string s;
  for (std::size_t i = 0; i < modes.size(); ++i) s += (i ? "+w" : "w") + std::to_string(modes[i]);
  return s;
}

double ScenarioConfig::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

void ScenarioConfig::validate() const {
  if (n_modes < 1) throw ConfigError("modes.n_modes must be >= 1");
  if (segments.empty()) throw ConfigError("protocol needs at least one segment");
  if (!(total_duration() > 0.0)) throw ConfigError("protocol total duration must be > 0");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::string where = "protocol.segments[" + std::to_string(i) + "]";
    for (const auto& f : segments[i].frequencies) {
      for (int j : f.modes) check_mode(j, n_modes, where + ".frequencies");
    }
    if (segments[i].feedback_mode > n_modes) check_mode(segments[i].feedback_mode, n_modes, where + ".feedback_mode");
  }
  for (const auto& [a, b] : outputs.negativity) {
    if (a.empty() || b.empty()) throw ConfigError("outputs.negativity: both parts must be non-empty");
    for (int j : a) check_mode(j, n_modes, "outputs.negativity");
    for (int j : b) {
      check_mode(j, n_modes, "outputs.negativity");
      if (std::find(a.begin(), a.end(), j) != a.end()) throw ConfigError("outputs.negativity: parts overlap");
    }
  }
  for (const auto& s : outputs.purity_subsets) {
    if (s.empty()) throw ConfigError("outputs.purity: empty subset");
    for (int j : s) check_mode(j, n_modes, "outputs.purity");
  }
  for (int j : outputs.hellinger_subset) check_mode(j, n_modes, "outputs.hellinger_subset");
  for (const auto& [j, k] : outputs.hellinger_blocks) {
    check_mode(j, n_modes, "outputs.hellinger_blocks");
    check_mode(k, n_modes, "outputs.hellinger_blocks");
    const auto& hs = outputs.hellinger_subset;
    if (std::find(hs.begin(), hs.end(), j) == hs.end() || std::find(hs.begin(), hs.end(), k) == hs.end()) {
      throw ConfigError("outputs.hellinger_blocks must lie inside outputs.hellinger_subset");
    }
  }
  for (int j : outputs.qnd_modes) check_mode(j, n_modes, "outputs.qnd_modes");
  for (const auto& [j, k] : outputs.qnd_pairs) {
    check_mode(j, n_modes, "outputs.qnd_pairs");
    check_mode(k, n_modes, "outputs.qnd_pairs");
    if (j == k) throw ConfigError("outputs.qnd_pairs: modes must differ");
  }
  if (ensemble.n_trajectories < 0 || ensemble.recorded_trajectories < 0 || ensemble.threads < 0) {
    throw ConfigError("ensemble counts must be >= 0");
  }
  if (sweep.enabled()) {
    if (sweep.segment > static_cast<int>(segments.size())) throw ConfigError("sweep.segment out of range");
    if (sweep.parameter != "delta_phi" && sweep.parameter != "kappa_sq") {
      throw ConfigError("sweep.parameter must be delta_phi or kappa_sq");
    }
    if (sweep.values.empty()) throw ConfigError("sweep.values is empty");
    if (sweep.parameter == "delta_phi") {
      if (segments[static_cast<std::size_t>(sweep.segment - 1)].frequencies.empty()) {
        throw ConfigError("sweep over delta_phi needs a stroboscopic segment");
      }
      for (double v : sweep.values) {
        if (!(v > 0.0 && v < 1.0)) throw ConfigError("sweep.values: delta_phi must lie in (0, 1)");
      }
    } else {
      for (double v : sweep.values) {
        if (v < 0.0) throw ConfigError("sweep.values: kappa_sq must be >= 0");
      }
    }
  }
}

ScenarioConfig parse_scenario(const std::string& toml_text, const std::string& source_name) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source_name);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string(e.description()), static_cast<int>(e.source().begin.line));
  }

  ScenarioConfig cfg;
  TableReader r(root, "");
  if (auto v = r.string("name")) cfg.name = *v;
  if (auto v = r.string("description")) cfg.description = *v;
  const toml::table* trap = r.table("trap");
  if (trap == nullptr) throw ConfigError("missing [trap] table");
  parse_trap(*trap, cfg.trap);
  if (const auto* t = r.table("grid")) parse_grid(*t, cfg.grid);
  if (const auto* t = r.table("optics")) parse_optics(*t, cfg.optics);
  if (const auto* t = r.table("modes")) {
    TableReader m(*t, "modes.");
    if (auto v = m.integer("n_modes")) cfg.n_modes = static_cast<int>(*v);
    m.finish();
  }
  const toml::table* protocol = r.table("protocol");
  if (protocol == nullptr) throw ConfigError("missing [protocol] table");
  {
    TableReader p(*protocol, "protocol.");
    const toml::array* segs = p.array("segments");
    if (segs == nullptr) throw ConfigError("protocol needs [[protocol.segments]]", p.line_of_table());
    int index = 0;
    for (const auto& el : *segs) {
      if (!el.is_table()) throw ConfigError("protocol.segments entries must be tables", line_of(el));
      cfg.segments.push_back(parse_segment(*el.as_table(), index++));
    }
    p.finish();
  }
  if (const auto* t = r.table("ensemble")) {
    TableReader e(*t, "ensemble.");
    if (auto v = e.integer("n_trajectories")) cfg.ensemble.n_trajectories = static_cast<int>(*v);
    if (auto v = e.integer("seed")) cfg.ensemble.seed = static_cast<std::uint64_t>(*v);
    if (auto v = e.integer("recorded_trajectories")) cfg.ensemble.recorded_trajectories = static_cast<int>(*v);
    if (auto v = e.integer("threads")) cfg.ensemble.threads = static_cast<int>(*v);
    e.finish();
  }
  if (const auto* t = r.table("outputs")) parse_outputs(*t, cfg.outputs);
  if (const auto* t = r.table("sweep")) {
    TableReader s(*t, "sweep.");
    cfg.sweep.segment = static_cast<int>(s.integer("segment").value_or(1));
    cfg.sweep.parameter = s.string("parameter").value_or("delta_phi");
    if (const auto* arr = s.array("values")) cfg.sweep.values = number_list(*arr, "sweep.values");
    s.finish();
  }
  r.finish();
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.string());
}

nlohmann::json to_json(const ScenarioConfig& c) {
  using nlohmann::json;
  json trap = {{"atom_number", c.trap.atom_number},
               {"omega_perp_ratio", c.trap.omega_perp_ratio},
               {"omega_x_hz", c.trap.omega_x_hz},
               {"mass_amu", c.trap.mass_amu}};
  trap["g1d"] = c.trap.g1d ? json(*c.trap.g1d) : json(nullptr);
  trap["mu_target"] = c.trap.mu_target ? json(*c.trap.mu_target) : json(nullptr);

  json segments = json::array();
  for (const auto& s : c.segments) {
    json freqs = json::array();
    for (const auto& f : s.frequencies) freqs.push_back(f.modes.empty() ? json(f.value) : json(f.modes));
    json seg = {{"label", s.label},
                {"duration", s.duration},
                {"duration_periods", s.duration / units::kTwoPi},
                {"kappa_sq", s.kappa_sq_per_two_pi},
                {"frequencies", freqs},
                {"delta_phi", s.delta_phi_per_two_pi},
                {"rule", to_string(s.rule)},
                {"phase_reference", s.lab_phase_reference ? "lab" : "segment"},
                {"feedback_mode", s.feedback_mode}};
    if (s.d0) {
      seg["d0"] = *s.d0;
      seg["eta"] = *s.eta;
    }
    segments.push_back(seg);
  }

  json negativity = json::array();
  for (const auto& [a, b] : c.outputs.negativity) negativity.push_back({a, b});
  json blocks = json::array();
  for (const auto& [j, k] : c.outputs.hellinger_blocks) blocks.push_back({j, k});
  json pairs = json::array();
  for (const auto& [j, k] : c.outputs.qnd_pairs) pairs.push_back({j, k});

  json out = {
      {"name", c.name},
      {"description", c.description},
      {"trap", trap},
      {"grid",
       {{"x_max", c.grid.x_max ? json(*c.grid.x_max) : json(nullptr)},
        {"n_points", c.grid.n_points ? json(*c.grid.n_points) : json(nullptr)},
        {"stencil_order", c.grid.stencil_order}}},
      {"optics",
       {{"wavelength_nm", c.optics.wavelength_nm},
        {"resolution_length", c.optics.resolution_length ? json(*c.optics.resolution_length) : json(nullptr)},
        {"detector_length", c.optics.detector.length},
        {"pixel_width", c.optics.detector.pixel_width},
        {"n_pixels", c.optics.detector.n_pixels()},
        {"coupling_length", c.optics.coupling_length}}},
      {"modes", {{"n_modes", c.n_modes}}},
      {"protocol", {{"segments", segments}}},
      {"ensemble",
       {{"n_trajectories", c.ensemble.n_trajectories},
        {"seed", c.ensemble.seed},
        {"recorded_trajectories", c.ensemble.recorded_trajectories},
        {"threads", c.ensemble.threads}}},
      {"outputs",
       {{"sample_interval", c.outputs.sample_interval},
        {"sample_pulse_centres", c.outputs.sample_pulse_centres},
        {"snapshot_times", c.outputs.snapshot_times},
        {"negativity", negativity},
        {"purity", c.outputs.purity_subsets},
        {"hellinger_subset", c.outputs.hellinger_subset},
        {"hellinger_blocks", blocks},
        {"qnd_modes", c.outputs.qnd_modes},
        {"qnd_pairs", pairs},
        {"write_modes", c.outputs.write_modes}}},
  };
  if (c.sweep.enabled()) {
    out["sweep"] = {{"segment", c.sweep.segment}, {"parameter", c.sweep.parameter}, {"values", c.sweep.values}};
  }
  return out;
}

}  // namespace becsq
