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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gexpect/cli/acceptance.hpp"
#include "gexpect/cli/commands.hpp"
#include "gexpect/cli/config.hpp"
#include "gexpect/errors.hpp"

namespace gexp::cli {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
  nlohmann::json report() const { return nlohmann::json::parse(out); }
};

Outcome Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "gexpect");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         (name + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
}

TEST(Config, Defaults) {
  const ExperimentConfig c = config_from_json({{"command", "gheat"}});
  EXPECT_EQ(c.params.var_lo, 0.25);
  EXPECT_EQ(c.params.var_hi, 1.0);
  EXPECT_EQ(c.params.mu_lo, 0.0);
  EXPECT_EQ(c.horizon, 1.0);
  EXPECT_EQ(c.nx, 801);
  EXPECT_EQ(c.cfl, 0.4);
  EXPECT_EQ(c.ns, 2001);
  EXPECT_FALSE(c.half_width.has_value());
}

TEST(Config, UnknownKeyIsNamed) {
  try {
    config_from_json({{"command", "gheat"}, {"sigma", 2}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("sigma"), std::string::npos);
  }
}

TEST(Config, RoundTripAndOverride) {
  ExperimentConfig c = config_from_json(
      {{"command", "clt"}, {"var", {0.5, 2.0}}, {"n", {4, 8}}, {"phi", "abs"}, {"T", 2.0}});
  EXPECT_EQ(config_from_json(c.to_json()).to_json(), c.to_json());
  Overrides o;
  o.var = std::pair{0.1, 0.2};
  o.nx = 401;
  apply(c, o);
  EXPECT_EQ(c.params.var_hi, 0.2);
  EXPECT_EQ(c.nx, 401);
  EXPECT_EQ(c.phi, "abs");
}

TEST(Config, ParseHelpers) {
  EXPECT_EQ(parse_pair("0.25,1", "--var"), (std::pair{0.25, 1.0}));
  EXPECT_EQ(parse_int_list("8,32,128", "--n"), (std::vector<int>{8, 32, 128}));
  EXPECT_THROW(parse_pair("1", "--var"), ConfigError);
  EXPECT_THROW(parse_int_list("8,x", "--n"), ConfigError);
}

TEST(Cli, GheatQuartic) {
  const Outcome o = Invoke({"gheat", "--phi", "quartic", "--T", "1"});
  ASSERT_EQ(o.code, kPass) << o.err;
  const auto j = o.report();
  EXPECT_NEAR(j["outputs"]["value"].get<double>(), 3.0, 3e-2);
  EXPECT_TRUE(j["pass"].get<bool>());
  for (const char* key : {"command", "inputs", "outputs", "residuals", "tolerances", "pass",
                          "wall_time"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Cli, MaximalSquare) {
  const Outcome o = Invoke({"maximal", "--mu", "-1,2", "--phi", "square"});
  ASSERT_EQ(o.code, kPass) << o.err;
  EXPECT_NEAR(o.report()["outputs"]["value"].get<double>(), 4.0, 1e-9);
}

TEST(Cli, FlagsOverrideConfigAndAreEchoed) {
  const auto path = TempPath("gexpect_cfg.json");
  {
    std::ofstream f(path);
    f << R"({"command": "gheat", "phi": "square", "var": [0.25, 1.0], "nx": 201})";
  }
  const Outcome o = Invoke({"gheat", "--config", path.string(), "--var", "0.5,2"});
  std::filesystem::remove(path);
  ASSERT_EQ(o.code, kPass) << o.err;
  const auto j = o.report();
  EXPECT_EQ(j["inputs"]["var"], nlohmann::json({0.5, 2.0}));
  EXPECT_EQ(j["inputs"]["nx"], 201);
  EXPECT_NEAR(j["outputs"]["value"].get<double>(), 2.0, 1e-2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(Invoke({}).code, kUsage);
  EXPECT_EQ(Invoke({"gheat", "--bogus", "1"}).code, kUsage);
  EXPECT_EQ(Invoke({"nosuch"}).code, kUsage);
  EXPECT_EQ(Invoke({"gheat", "--var", "1,0.25"}).code, kUsage);
  EXPECT_EQ(Invoke({"gheat", "--phi", "nosuch"}).code, kUsage);
  EXPECT_EQ(Invoke({"gheat", "--nx", "100"}).code, kUsage);
  EXPECT_EQ(Invoke({"qv", "--steps", "13"}).code, kUsage);
  const Outcome o = Invoke({"gheat", "--config", "/nonexistent/cfg.json"});
  EXPECT_EQ(o.code, kUsage);
  EXPECT_FALSE(o.err.empty());
}

TEST(Cli, ReportsAreDeterministic) {
  const std::vector<std::string> args = {"clt", "--phi", "call:1", "--n", "8,32"};
  auto a = Invoke(args).report();
  auto b = Invoke(args).report();
  a.erase("wall_time");
  b.erase("wall_time");
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Cli, WritesCsv) {
  const auto path = TempPath("gexpect_clt.csv");
  const Outcome o = Invoke({"clt", "--phi", "square", "--n", "4,8", "--out", path.string()});
  ASSERT_EQ(o.code, kPass) << o.err;
  std::ifstream f(path);
  std::string header, line;
  std::getline(f, header);
  EXPECT_EQ(header, "n,value,abs_error");
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  EXPECT_EQ(rows, 2);
  std::filesystem::remove(path);
}

TEST(Cli, EveryCommandRunsWithDefaults) {
  for (const std::string& name : command_names()) {
    if (name == "accept") continue;
    const Outcome o = Invoke({name, "--steps", "4"});
    EXPECT_NE(o.code, kUsage) << name << ": " << o.err;
    EXPECT_NO_THROW(o.report()) << name;
  }
}

TEST(Acceptance, LineFormat) {
  CriterionResult r{4, "lattice identities", true, "residual 1e-16 <= 1e-12", 0.25, {}};
  EXPECT_EQ(format_line(r), "[PASS] 4 lattice identities (0.25 s): residual 1e-16 <= 1e-12");
  r.pass = false;
  EXPECT_EQ(format_line(r).substr(0, 6), "[FAIL]");
}

}  // namespace
}  // namespace gexp::cli
