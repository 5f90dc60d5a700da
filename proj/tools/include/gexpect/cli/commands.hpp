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

#ifndef GEXPECT_CLI_COMMANDS_HPP_
#define GEXPECT_CLI_COMMANDS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "gexpect/cli/config.hpp"
#include "gexpect/cli/report.hpp"

namespace gexp::cli {

enum ExitCode : int { kPass = 0, kUsage = 1, kContractFailure = 2 };

// Subcommand names in help order.
const std::vector<std::string>& command_names();

// Runs one experiment; throws gexp::Error on bad input.
Report execute(const ExperimentConfig& cfg);

// Full front end: parses args (args[0] is the program name), prints the JSON
// report to `out`, diagnostics to `err`, returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gexp::cli

#endif  // GEXPECT_CLI_COMMANDS_HPP_
