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

#ifndef GEXPECT_CLI_REPORT_HPP_
#define GEXPECT_CLI_REPORT_HPP_

#include <string>

#include <nlohmann/json.hpp>

namespace gexp::cli {

// JSON report of one command. Keys are emitted sorted, so two runs differ
// only in wall_time.
struct Report {
  std::string command;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::object();
  nlohmann::json residuals = nlohmann::json::object();
  nlohmann::json tolerances = nlohmann::json::object();
  bool pass = true;
  double wall_time = 0.0;

  // Records a contract residual <= tolerance.
  void check(const std::string& name, double residual, double tolerance);
  // Records a boolean contract.
  void require(const std::string& name, bool holds);

  nlohmann::json to_json() const;
};

}  // namespace gexp::cli

#endif  // GEXPECT_CLI_REPORT_HPP_
