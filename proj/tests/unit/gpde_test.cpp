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

#include "gexpect/gpde.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gexpect/errors.hpp"
#include "gexpect/limits.hpp"
#include "gexpect/quadrature.hpp"

namespace gexp {
namespace {

const UncertaintyParams kVol = UncertaintyParams::volatility(0.25, 1.0);

TEST(GEval, Examples) {
  const UncertaintyParams p = UncertaintyParams::volatility(1, 4);
  EXPECT_EQ(g_eval(p, 0, 1), 2.0);
  EXPECT_EQ(g_eval(p, 0, -1), -0.5);
  EXPECT_EQ(g_eval(UncertaintyParams(-1, 2, 0, 0), 3, 0), 6.0);
}

TEST(GEval, MatchesClosedFormWithoutDrift) {
  for (double a : {-3.0, -0.1, 0.0, 0.2, 5.0}) {
    const double closed = 0.5 * (kVol.var_hi * std::max(a, 0.0) - kVol.var_lo * std::max(-a, 0.0));
    EXPECT_EQ(g_eval(kVol, 0, a), closed);
  }
}

TEST(Params, Validation) {
  EXPECT_THROW(UncertaintyParams(1, 0, 1, 1), ArgumentError);
  EXPECT_THROW(UncertaintyParams(0, 0, 2, 1), ArgumentError);
  EXPECT_THROW(UncertaintyParams(0, 0, -1, 1), ArgumentError);
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  c.cfl = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SolverConfig{};
  c.nx = 800;
  EXPECT_THROW(c.validate(), ConfigError);
  c.nx = 49;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(solve_g_parabolic(functions::square(), kVol, 1.0, SolverConfig{6, 801, 1.5}),
               ConfigError);
}

TEST(GParabolic, ClassicalHeat) {
  const UncertaintyParams p = UncertaintyParams::volatility(1, 1);
  EXPECT_NEAR(solve_g_parabolic(functions::square(), p, 1.0, SolverConfig::for_problem(p, 1, 0))
                  .evaluate(0),
              1.0, 1e-3);
}

TEST(GParabolic, QuarticMoment) {
  EXPECT_NEAR(gnormal_expectation(functions::quartic(), kVol) / 3.0, 1.0, 1e-2);
}

TEST(GParabolic, ConstantsAreFixedPoints) {
  const UncertaintyParams p(-0.3, 0.2, 0.25, 1.0);
  const GridFunction u =
      solve_g_parabolic(functions::constant(1.75), p, 0.7, SolverConfig::for_problem(p, 0.7, 0, 201));
  for (double v : u.values()) EXPECT_EQ(v, 1.75);
  EXPECT_EQ(u.t(), 0.7);
}

TEST(GParabolic, EndsExactlyAtHorizon) {
  const GridFunction u = solve_g_parabolic(functions::abs(), kVol, 0.3337,
                                           SolverConfig::for_problem(kVol, 0.3337, 0, 101));
  EXPECT_EQ(u.t(), 0.3337);
}

TEST(GParabolic, NonFiniteValueNamesStep) {
  const TestFunction bad("bad", [](double x) { return x > 1 ? std::nan("") : 0.0; });
  try {
    solve_g_parabolic(bad, kVol, 1.0, SolverConfig::for_problem(kVol, 1, 0, 101));
    FAIL() << "no NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
  }
}

TEST(GNormal, Moments) {
  EXPECT_NEAR(gnormal_expectation(functions::square(), kVol), 1.0, 1e-2);
  EXPECT_NEAR(gnormal_expectation(functions::parse("neg:square"), kVol), -0.25, 1e-2);
}

TEST(GNormal, RequiresCentredParams) {
  EXPECT_THROW(gnormal_expectation(functions::square(), UncertaintyParams(-1, 1, 1, 1)),
               ArgumentError);
}

// E[(X - k)+] for X ~ N(0, s2).
double GaussianCall(double k, double s2) {
  const double s = std::sqrt(s2);
  const double d = k / s;
  return s * std::exp(-0.5 * d * d) / std::sqrt(2 * M_PI) - k * 0.5 * std::erfc(d / std::sqrt(2.0));
}

// Convex payoffs pick var_hi everywhere, concave ones var_lo: the G-normal
// value equals a classical Gaussian expectation.
TEST(GNormal, ConvexAndConcaveClosedForms) {
  const TestFunction call = functions::call(0.5);
  EXPECT_NEAR(gnormal_expectation(call, kVol, SolverConfig::for_problem(kVol, 1, 0.5, 1601)),
              GaussianCall(0.5, kVol.var_hi), 2e-4);
  const TestFunction concave = call.affine(-1, 0);
  EXPECT_NEAR(gnormal_expectation(concave, kVol, SolverConfig::for_problem(kVol, 1, 0.5, 1601)),
              -GaussianCall(0.5, kVol.var_lo), 2e-4);
}

// Gauss-Hermite is spectrally accurate for smooth payoffs only; a kink costs
// several digits.
TEST(Quadrature, KinkedPayoffIsOnlyRoughlyResolved) {
  const double err = std::abs(gaussian_reference(functions::call(0.5), 1.0) - GaussianCall(0.5, 1.0));
  EXPECT_LT(err, 1e-3);
  EXPECT_GT(err, 1e-8);
}

TEST(GNormal, CubeIsStrictlyPositiveAndNotGaussian) {
  const double v = gnormal_expectation(functions::cube(), kVol);
  double gauss = 0;
  for (int i = 0; i < 9; ++i) {
    const double g = gaussian_reference(functions::cube(), 0.25 + 0.75 * i / 8);
    EXPECT_NEAR(g, 0.0, 1e-12);
    gauss = std::max(gauss, g);
  }
  EXPECT_GT(v, 1e-3);
  EXPECT_GT(v, std::max(0.0, gauss));
}

// The cube value from the PDE and from the central-limit DP at large n agree.
TEST(GNormal, CubeMatchesCentralLimitDP) {
  const double pde =
      gnormal_expectation(functions::cube(), kVol, SolverConfig::for_problem(kVol, 1, 0, 1601));
  const double dp = clt_value(StepFamily::rademacher(0.25, 1.0), functions::cube(), 2048);
  EXPECT_NEAR(pde, dp, 1e-2);
}

TEST(Maximal, Examples) {
  EXPECT_NEAR(maximal_expectation([](double v) { return v; }, -1, 2), 2, 1e-15);
  EXPECT_NEAR(maximal_expectation([](double v) { return v * v; }, -1, 2), 4, 1e-15);
  const TestFunction d = functions::dist(-1, 2);
  EXPECT_EQ(maximal_expectation([&](double v) { return d(v); }, -1, 2), 0);
}

TEST(Maximal, InteriorMaximumIsRefined) {
  const double v = maximal_expectation([](double x) { return -(x - 0.123456789) * (x - 0.123456789); },
                                       -1, 1);
  EXPECT_NEAR(v, 0.0, 1e-18);
}

TEST(Quadrature, GaussianMoments) {
  EXPECT_NEAR(gaussian_reference([](double x) { return x * x; }, 1), 1, 1e-13);
  EXPECT_NEAR(gaussian_reference([](double x) { return x * x * x * x; }, 1), 3, 1e-12);
  EXPECT_NEAR(gaussian_reference([](double x) { return x * x * x; }, 0.7), 0, 1e-14);
  EXPECT_NEAR(gaussian_reference([](double x) { return std::cos(x); }, 2), std::exp(-1.0), 1e-13);
}

TEST(Quadrature, RuleIsSymmetricAndNormalized) {
  const QuadratureRule r = gauss_hermite(20);
  double total = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    total += r.weights[i];
    EXPECT_EQ(r.nodes[i], -r.nodes[r.nodes.size() - 1 - i]);
  }
  EXPECT_NEAR(total, std::sqrt(M_PI), 1e-13);
}

TEST(GridFunction, Evaluate) {
  const GridFunction g(0.0, 2.0, {0, 1, 4, 9, 16});
  EXPECT_EQ(g.x(2), 0.0);
  EXPECT_EQ(g.evaluate(1.0), 9);
  EXPECT_EQ(g.evaluate(0.5), 6.5);
  EXPECT_EQ(evaluate(g, -2.0), 0);
  EXPECT_THROW(g.evaluate(2.0001), DomainError);
}

TEST(GridFunction, CsvFormat) {
  const GridFunction g(0.5, 1.0, {1, 2, 3});
  std::ostringstream out;
  g.write_csv(out);
  EXPECT_EQ(out.str(), "# t=0.5\nx,u\n-1,1\n0,2\n1,3\n");
}

class SolutionMap : public ::testing::Test {
 protected:
  UncertaintyParams p_{-0.2, 0.3, 0.25, 1.0};
  SolverConfig cfg_ = SolverConfig::for_problem(p_, 1, 1, 201);
  GridFunction Solve(const TestFunction& f, double t = 1.0) { return solve_g_parabolic(f, p_, t, cfg_); }
};

TEST_F(SolutionMap, ComparisonIsExact) {
  const GridFunction a = Solve(functions::call(0.5));
  const GridFunction b = Solve(functions::abs());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(a[i], b[i]);
}

TEST_F(SolutionMap, SublinearAndHomogeneous) {
  const TestFunction f = functions::call(0.3);
  const TestFunction g = TestFunction("sin", [](double x) { return std::sin(3 * x); });
  const GridFunction uf = Solve(f);
  const GridFunction ug = Solve(g);
  const GridFunction sum = Solve(f + g);
  for (std::size_t i = 0; i < sum.size(); ++i) EXPECT_LE(sum[i], uf[i] + ug[i] + 1e-12);
  for (double lambda : {0.0, 0.25, 3.0}) {
    const GridFunction u = Solve(f.affine(lambda, 0));
    for (std::size_t i = 0; i < u.size(); ++i) {
      EXPECT_NEAR(u[i], lambda * uf[i], 1e-12 * std::max(1.0, std::abs(lambda * uf[i])));
    }
  }
  // Strict sublinearity somewhere: the two payoffs want different controls.
  double gap = 0;
  for (std::size_t i = 0; i < sum.size(); ++i) gap = std::max(gap, uf[i] + ug[i] - sum[i]);
  EXPECT_GT(gap, 1e-4);
}

TEST_F(SolutionMap, CashTranslation) {
  const TestFunction f = functions::abs();
  const GridFunction u = Solve(f);
  for (double c : {-2.0, 0.5}) {
    const GridFunction v = Solve(f.affine(1, c));
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(v[i], u[i] + c, 1e-12 * (1 + std::abs(u[i])));
  }
}

TEST_F(SolutionMap, Semigroup) {
  const TestFunction f = functions::call(0.5);
  const GridFunction whole = Solve(f);
  const GridFunction restarted = solve_g_parabolic(Solve(f, 0.4), p_, 0.6, cfg_);
  const GridFunction fine =
      solve_g_parabolic(f, p_, 1.0, SolverConfig::for_problem(p_, 1, 1, 801));
  double grid_error = 0;
  double split = 0;
  for (std::size_t i = 0; i < whole.size(); ++i) {
    if (std::abs(whole.x(i)) > 1) continue;
    grid_error = std::max(grid_error, std::abs(whole[i] - fine.evaluate(whole.x(i))));
    split = std::max(split, std::abs(whole[i] - restarted[i]));
  }
  EXPECT_LE(split, 3 * grid_error);
}

TEST(Symmetry, ReflectedPayoffSameValue) {
  for (const char* name : {"call:0.5", "cube", "exp"}) {
    const TestFunction f = functions::parse(name);
    const SolverConfig cfg = SolverConfig::for_problem(kVol, 1, f.radius(), 401);
    EXPECT_NEAR(gnormal_expectation(f, kVol, cfg), gnormal_expectation(f.reflected(), kVol, cfg),
                1e-10)
        << name;
  }
}

TEST(Boundary, LinearExtrapolationOnTightDomain) {
  SolverConfig cfg = SolverConfig::for_problem(kVol, 1, 0, 201);
  cfg.half_width = 3;  // deliberately tight
  cfg.boundary = Boundary::kLinearExtrapolation;
  EXPECT_NEAR(solve_g_parabolic(functions::square(), kVol, 1, cfg).evaluate(0), 1.0, 2e-3);
}

// Affine data solve the equation exactly and extrapolation reproduces them
// even on a domain narrower than the diffusion length.
TEST(Boundary, AffineDataExactUnderExtrapolation) {
  const UncertaintyParams p(-0.5, 0.5, 0.25, 1.0);
  SolverConfig cfg = SolverConfig::for_problem(p, 1, 0, 201);
  cfg.half_width = 1;
  cfg.boundary = Boundary::kLinearExtrapolation;
  const GridFunction u = solve_g_parabolic(functions::identity().affine(2, 1), p, 1, cfg);
  // Exact up to rounding accumulated over a few thousand steps.
  for (double x : {-0.9, -0.3, 0.0, 0.8}) EXPECT_NEAR(u.evaluate(x), 2 * x + 1 + 1.0, 1e-10);
}

}  // namespace
}  // namespace gexp
