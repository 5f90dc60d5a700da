// Copyright 2026 The gexpect Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gexpect/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

#include "gexpect/errors.hpp"

namespace gexp::cli {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "command", "var", "mu", "T", "nx", "cfl", "half_width", "boundary", "ns",
      "steps", "n", "phi", "coeff", "x0", "scenario", "out", "seed"};
  return keys;
}

template <typename T>
T read(const json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

std::pair<double, double> read_pair(const json& doc, const std::string& key) {
  const auto v = read<std::vector<double>>(doc, key);
  if (v.size() != 2) throw ConfigError("config key '" + key + "': expected [lo, hi]");
  return {v[0], v[1]};
}

void validate(ExperimentConfig& cfg) {
  try {
    cfg.params = UncertaintyParams(cfg.params.mu_lo, cfg.params.mu_hi, cfg.params.var_lo,
                                   cfg.params.var_hi);
  } catch (const Error& e) {
    throw ConfigError(std::string("config 'var'/'mu': ") + e.what());
  }
  if (!(cfg.horizon > 0.0)) throw ConfigError("config key 'T': must be > 0");
  if (cfg.nx < 51 || cfg.nx % 2 == 0) throw ConfigError("config key 'nx': need odd nx >= 51");
  if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) throw ConfigError("config key 'cfl': need 0 < cfl < 1");
  if (cfg.half_width && !(*cfg.half_width > 0.0)) {
    throw ConfigError("config key 'half_width': must be > 0");
  }
  if (cfg.ns < 201) throw ConfigError("config key 'ns': need ns >= 201");
  if (cfg.steps < 1) throw ConfigError("config key 'steps': must be >= 1");
  for (int v : cfg.n) {
    if (v < 1) throw ConfigError("config key 'n': entries must be >= 1");
  }
}

}  // namespace

SolverConfig ExperimentConfig::solver(double data_radius) const {
  SolverConfig s = SolverConfig::for_problem(params, horizon, data_radius, nx, cfl);
  if (half_width) s.half_width = *half_width;
  s.boundary = boundary;
  return s;
}

DPConfig ExperimentConfig::dp() const {
  DPConfig d;
  d.ns = ns;
  return d;
}

nlohmann::json ExperimentConfig::to_json() const {
  json j = {{"command", command},
            {"var", {params.var_lo, params.var_hi}},
            {"mu", {params.mu_lo, params.mu_hi}},
            {"T", horizon},
            {"nx", nx},
            {"cfl", cfl},
            {"boundary", boundary == Boundary::kClampToInitial ? "clamp" : "linear"},
            {"ns", ns},
            {"steps", steps},
            {"n", n},
            {"phi", phi},
            {"coeff", coeff},
            {"scenario", scenario},
            {"out", out}};
  if (half_width) j["half_width"] = *half_width;
  if (x0) j["x0"] = *x0;
  if (seed) j["seed"] = *seed;
  return j;
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (!known_keys().count(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
  ExperimentConfig cfg;
  if (doc.contains("command")) cfg.command = read<std::string>(doc, "command");
  if (doc.contains("var")) {
    std::tie(cfg.params.var_lo, cfg.params.var_hi) = read_pair(doc, "var");
  }
  if (doc.contains("mu")) std::tie(cfg.params.mu_lo, cfg.params.mu_hi) = read_pair(doc, "mu");
  if (doc.contains("T")) cfg.horizon = read<double>(doc, "T");
  if (doc.contains("nx")) cfg.nx = read<int>(doc, "nx");
  if (doc.contains("cfl")) cfg.cfl = read<double>(doc, "cfl");
  if (doc.contains("half_width")) cfg.half_width = read<double>(doc, "half_width");
  if (doc.contains("boundary")) {
    const auto b = read<std::string>(doc, "boundary");
    if (b == "clamp") {
      cfg.boundary = Boundary::kClampToInitial;
    } else if (b == "linear") {
      cfg.boundary = Boundary::kLinearExtrapolation;
    } else {
      throw ConfigError("config key 'boundary': expected \"clamp\" or \"linear\"");
    }
  }
  if (doc.contains("ns")) cfg.ns = read<int>(doc, "ns");
  if (doc.contains("steps")) cfg.steps = read<int>(doc, "steps");
  if (doc.contains("n")) {
    cfg.n = doc.at("n").is_array() ? read<std::vector<int>>(doc, "n")
                                   : std::vector<int>{read<int>(doc, "n")};
  }
  if (doc.contains("phi")) cfg.phi = read<std::string>(doc, "phi");
  if (doc.contains("coeff")) cfg.coeff = read<std::string>(doc, "coeff");
  if (doc.contains("x0")) cfg.x0 = read<double>(doc, "x0");
  if (doc.contains("scenario")) cfg.scenario = read<std::string>(doc, "scenario");
  if (doc.contains("out")) cfg.out = read<std::string>(doc, "out");
  if (doc.contains("seed")) cfg.seed = read<std::uint64_t>(doc, "seed");
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return config_from_json(doc);
}

void apply(ExperimentConfig& cfg, const Overrides& o) {
  if (o.var) std::tie(cfg.params.var_lo, cfg.params.var_hi) = *o.var;
  if (o.mu) std::tie(cfg.params.mu_lo, cfg.params.mu_hi) = *o.mu;
  if (o.phi) cfg.phi = *o.phi;
  if (o.horizon) cfg.horizon = *o.horizon;
  if (o.n) cfg.n = *o.n;
  if (o.nx) cfg.nx = *o.nx;
  if (o.cfl) cfg.cfl = *o.cfl;
  if (o.steps) cfg.steps = *o.steps;
  if (o.out) cfg.out = *o.out;
  if (o.coeff) cfg.coeff = *o.coeff;
  if (o.scenario) cfg.scenario = *o.scenario;
  if (o.x0) cfg.x0 = *o.x0;
  validate(cfg);
}

namespace {

double to_double(std::string_view s, const std::string& flag) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(flag + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text) {
  std::vector<std::string_view> parts;
  while (true) {
    const std::size_t comma = text.find(',');
    parts.push_back(text.substr(0, comma));
    if (comma == std::string_view::npos) return parts;
    text.remove_prefix(comma + 1);
  }
}

}  // namespace

std::pair<double, double> parse_pair(const std::string& text, const std::string& flag) {
  const auto parts = split(text);
  if (parts.size() != 2) throw ConfigError(flag + ": expected lo,hi");
  return {to_double(parts[0], flag), to_double(parts[1], flag)};
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  for (std::string_view p : split(text)) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
    if (p.empty() || ec != std::errc() || ptr != p.data() + p.size()) {
      throw ConfigError(flag + ": bad integer '" + std::string(p) + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace gexp::cli
