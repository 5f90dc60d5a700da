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

#ifndef GEXPECT_CLI_ACCEPTANCE_HPP_
#define GEXPECT_CLI_ACCEPTANCE_HPP_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gexp::cli {

inline constexpr int kCriteria = 9;

struct CriterionResult {
  int id;
  std::string title;
  bool pass;
  std::string detail;  // one line, the measured values against their bounds
  double seconds;
  nlohmann::json data;
};

// Runs criterion `id` in 1..kCriteria.
CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_acceptance();

// "[PASS] 3 robust LLN (0.41 s): ..." without a trailing newline.
std::string format_line(const CriterionResult& r);

}  // namespace gexp::cli

#endif  // GEXPECT_CLI_ACCEPTANCE_HPP_
