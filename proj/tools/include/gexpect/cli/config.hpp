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

#ifndef GEXPECT_CLI_CONFIG_HPP_
#define GEXPECT_CLI_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gexpect/gpde.hpp"
#include "gexpect/limits.hpp"

namespace gexp::cli {

// Everything a subcommand reads. Empty `phi`, `n` and `coeff` select the
// command's own defaults.
struct ExperimentConfig {
  std::string command;
  UncertaintyParams params{0.0, 0.0, 0.25, 1.0};
  double horizon = 1.0;
  int nx = 801;
  double cfl = 0.4;
  std::optional<double> half_width;  // unset: sized from the problem
  Boundary boundary = Boundary::kClampToInitial;
  int ns = 2001;  // DP state grid
  int steps = 10;  // lattice steps
  std::vector<int> n;
  std::string phi;
  std::string coeff;
  std::optional<double> x0;  // unset: the command's default start
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;  // reserved; every computation is deterministic

  SolverConfig solver(double data_radius) const;
  DPConfig dp() const;
  nlohmann::json to_json() const;
};

// Command-line values; set fields replace file values.
struct Overrides {
  std::optional<std::pair<double, double>> var;
  std::optional<std::pair<double, double>> mu;
  std::optional<std::string> phi;
  std::optional<double> horizon;
  std::optional<std::vector<int>> n;
  std::optional<int> nx;
  std::optional<double> cfl;
  std::optional<int> steps;
  std::optional<std::string> out;
  std::optional<std::string> coeff;
  std::optional<std::string> scenario;
  std::optional<double> x0;
};

// Unknown keys and ill-typed values raise ConfigError naming the key.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

// Applies the overrides and re-validates.
void apply(ExperimentConfig& cfg, const Overrides& overrides);

// "lo,hi" -> (lo, hi).
std::pair<double, double> parse_pair(const std::string& text, const std::string& flag);
// "8,32,128" -> {8, 32, 128}.
std::vector<int> parse_int_list(const std::string& text, const std::string& flag);

}  // namespace gexp::cli

#endif  // GEXPECT_CLI_CONFIG_HPP_
