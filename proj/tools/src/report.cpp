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

#include "gexpect/cli/report.hpp"

#include <cmath>

namespace gexp::cli {

void Report::check(const std::string& name, double residual, double tolerance) {
  residuals[name] = residual;
  tolerances[name] = tolerance;
  // NaN fails.
  if (!(residual <= tolerance)) pass = false;
}

void Report::require(const std::string& name, bool holds) {
  residuals[name] = holds;
  if (!holds) pass = false;
}

nlohmann::json Report::to_json() const {
  return {{"command", command},     {"inputs", inputs},
          {"outputs", outputs},     {"residuals", residuals},
          {"tolerances", tolerances}, {"pass", pass},
          {"wall_time", wall_time}};
}

}  // namespace gexp::cli
