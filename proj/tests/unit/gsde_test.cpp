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

#include "gexpect/gsde.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "gexpect/errors.hpp"

namespace gexp {
namespace {

TEST(Coefficients, Parsing) {
  const SDESpec lin = parse_coefficients("linear:0.5,0.2");
  EXPECT_DOUBLE_EQ(lin.drift(2.0), 1.0);
  EXPECT_DOUBLE_EQ(lin.qv_drift(2.0), 0.0);
  EXPECT_DOUBLE_EQ(lin.diffusion(2.0), 0.4);
  const SDESpec bs = parse_coefficients("bs:0.1,0.3,0.2");
  EXPECT_DOUBLE_EQ(bs.qv_drift(2.0), 0.6);
  EXPECT_DOUBLE_EQ(parse_coefficients("brownian").diffusion(7.0), 1.0);
  EXPECT_DOUBLE_EQ(parse_coefficients("zero").drift(7.0), 0.0);
  for (const char* bad : {"", "linear:1", "bs:1,2", "linear:a,b", "heston:1,2"}) {
    EXPECT_THROW(parse_coefficients(bad), ArgumentError) << bad;
  }
  const GeomParams g = parse_geometric("linear:0.5,0.2");
  EXPECT_DOUBLE_EQ(g.alpha, 0.5);
  EXPECT_DOUBLE_EQ(g.beta, -0.02);
  EXPECT_DOUBLE_EQ(g.gamma, 0.2);
  const GeomParams h = parse_geometric("bs:0.1,0.52,0.2");
  EXPECT_NEAR(h.beta, 0.5, 1e-15);
  EXPECT_THROW(parse_geometric("brownian"), ArgumentError);
}

TEST(SolveSde, ZeroAndBrownian) {
  const LatticeModel m(6, 1.0, 0.25, 1.0);
  const AdaptedProcess z = solve_sde(m, SDESpec::zero(), 1.7);
  for (int k = 0; k <= 6; ++k) {
    for (double v : z.layer(k)) EXPECT_EQ(v, 1.7);
  }
  const AdaptedProcess b = solve_sde(m, SDESpec::brownian(), 0.5);
  for_each_path(m, [&](const LatticePath& p) {
    for (int k = 0; k <= 6; ++k) EXPECT_NEAR(b.along(p, k), 0.5 + p.B(k), 1e-14);
  });
}

TEST(SolveSde, QvDrivenGrowthStaysInEnvelope) {
  const LatticeModel m(8, 1.0, 0.25, 1.0);
  const GeomParams p{0.0, 1.0, 0.0};
  const AdaptedProcess closed = geometric_gbm(m, p);
  const AdaptedProcess euler = solve_sde(m, p.sde(), 1.0);
  for (int k = 0; k <= 8; ++k) {
    const double t = m.time(k);
    for (std::size_t i = 0; i < LatticeModel::nodes_at(k); ++i) {
      EXPECT_GE(closed.at(k, i), std::exp(0.25 * t) * (1 - 1e-14));
      EXPECT_LE(closed.at(k, i), std::exp(t) * (1 + 1e-14));
      EXPECT_GE(euler.at(k, i), std::pow(1 + 0.25 * m.dt(), k) * (1 - 1e-14));
      EXPECT_LE(euler.at(k, i), std::pow(1 + m.dt(), k) * (1 + 1e-14));
    }
  }
}

TEST(SolveSde, GeometricClosedForm) {
  const LatticeModel m(5, 1.0, 0.25, 1.0);
  const GeomParams p{0.1, 0.5, 0.2};
  const AdaptedProcess x = geometric_gbm(m, p, 2.0);
  for_each_path(m, [&](const LatticePath& path) {
    for (int k = 0; k <= 5; ++k) {
      const double expect = 2.0 * std::exp(0.1 * m.time(k) + 0.5 * path.qv(k) + 0.2 * path.B(k));
      EXPECT_NEAR(x.along(path, k), expect, 1e-13 * expect);
    }
  });
}

TEST(SolveSde, OverflowNamesTheNode) {
  const LatticeModel m(4, 1.0, 0.25, 1.0);
  SDESpec blow = SDESpec::zero();
  blow.drift = [](double x) { return x * x; };
  try {
    solve_sde(m, blow, 1e200);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("depth"), std::string::npos) << e.what();
  }
}

TEST(Euler, RefinementRatiosNearTwo) {
  const std::vector<int> steps = {4, 8, 12};
  const RefinementStudy s = euler_refinement({0.1, 0.5, 0.2}, 0.25, 1.0, 1.0, steps);
  ASSERT_EQ(s.rows.size(), 3u);
  ASSERT_EQ(s.ratios.size(), 2u);
  for (double r : s.ratios) {
    EXPECT_GE(r, 1.5);
    EXPECT_LE(r, 3.0);
  }
  for (const RefinementRow& row : s.rows) EXPECT_LE(row.mean_error, row.max_error);
}

// Without a dB term the worst path is also first order.
TEST(Euler, DeterministicVolatilityMaxErrorHalves) {
  const std::vector<int> steps = {3, 6, 12};
  const RefinementStudy s = euler_refinement({0.2, 0.7, 0.0}, 0.25, 1.0, 1.0, steps);
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    const double r = s.rows[i - 1].max_error / s.rows[i].max_error;
    EXPECT_GE(r, 1.5);
    EXPECT_LE(r, 3.0);
  }
}

TEST(Stability, SdeSecondMoment) {
  const SDESpec spec = SDESpec::black_scholes(0.1, 0.3, 0.2);
  for (int n : {4, 8, 12}) {
    const StabilityReport r = sde_stability(LatticeModel(n, 1.0, 0.25, 1.0), spec, 1.0, 1.1);
    EXPECT_LE(r.lhs, r.rhs) << n;
    EXPECT_GT(r.lhs, 0.0);
  }
}

TEST(Picard, DriverFreeIsConditionalExpectation) {
  const LatticeModel m(6, 1.0, 0.25, 1.0);
  BSDESpec spec;
  spec.xi = [](const LatticePath& p) { return std::max(p.B(6) - 0.1, 0.0); };
  const PicardResult r = picard_bsde(m, spec, AdaptedProcess::constant(m, 6, 0.0));
  EXPECT_EQ(r.iterations, 1);
  EXPECT_NEAR(r.y.root(), lattice_expectation(m, spec.xi), 1e-15);
}

TEST(Picard, LinearDiscount) {
  const LatticeModel m(12, 1.0, 0.25, 1.0);
  BSDESpec spec;
  spec.xi = [](const LatticePath& p) { return p.B(12) * p.B(12); };
  spec.f = [](double, double y) { return -y; };
  spec.lipschitz_f = 1.0;
  const PicardResult r = picard_bsde(m, spec, AdaptedProcess::constant(m, 12, 0.0));
  EXPECT_NEAR(r.y.root(), std::exp(-1.0), 2e-2);
  EXPECT_NEAR(r.y.root(), std::pow(1 + m.dt(), -12), 1e-9);
  EXPECT_LE(r.iterations, 30);
  for (std::size_t i = 1; i < r.deltas.size(); ++i) {
    EXPECT_LE(r.deltas[i], r.deltas[i - 1] * (1 + 1e-12) + 1e-15);
  }
}

TEST(Picard, NonConvergenceIsReported) {
  const LatticeModel m(4, 1.0, 0.25, 1.0);
  BSDESpec spec;
  spec.xi = [](const LatticePath& p) { return p.B(4); };
  spec.f = [](double, double y) { return 3 * y; };
  EXPECT_THROW(picard_bsde(m, spec, AdaptedProcess::constant(m, 4, 0.0), 1e-10, 2),
               ConvergenceError);
}

TEST(Stability, Bsde) {
  const LatticeModel m(8, 1.0, 0.25, 1.0);
  BSDESpec spec;
  spec.xi = [](const LatticePath& p) { return std::abs(p.B(8)); };
  spec.f = [](double x, double y) { return 0.5 * std::sin(y) + x; };
  spec.g = [](double, double y) { return -0.3 * y; };
  spec.lipschitz_f = 0.5;
  spec.lipschitz_g = 0.3;
  const AdaptedProcess x = solve_sde(m, SDESpec::brownian(), 0.0);
  const BSDEStability r =
      bsde_stability(m, spec, x, [](const LatticePath& p) { return std::abs(p.B(8)) + 0.2 * p.B(8); });
  EXPECT_LE(r.lhs, r.rhs);
  EXPECT_GT(r.constant, 1.0);
}

TEST(FeynmanKac, ConstantTerminal) {
  MarkovBSDE bsde{functions::constant(0.8), nullptr, nullptr};
  const LatticeModel m(6, 1.0, 0.25, 1.0);
  const std::vector<double> xs = {-1.0, 0.0, 2.0};
  const FeynmanKacReport r =
      feynman_kac_check(SDESpec::brownian(), bsde, m, SolverConfig{6.0, 201}, xs);
  EXPECT_LE(r.residual, 1e-12);
  for (const FeynmanKacRow& row : r.rows) EXPECT_NEAR(row.u_lattice, 0.8, 1e-12);
}

TEST(FeynmanKac, QuadraticTerminal) {
  MarkovBSDE bsde{functions::square(), nullptr, nullptr};
  const std::vector<double> xs = {-0.5, 0.0, 0.5};
  for (auto [n, nx] : {std::pair{3, 101}, {6, 201}, {12, 401}}) {
    const FeynmanKacReport r = feynman_kac_check(SDESpec::brownian(), bsde,
                                                 LatticeModel(n, 1.0, 0.25, 1.0),
                                                 SolverConfig{6.0, nx}, xs);
    EXPECT_LE(r.residual, 2e-2) << n;
    for (const FeynmanKacRow& row : r.rows) EXPECT_NEAR(row.u_lattice, row.x * row.x + 1.0, 1e-12);
  }
}

// The lattice error drops below the PDE grid error by N = 12, so only the
// coarse end is compared.
TEST(FeynmanKac, GeometricCall) {
  MarkovBSDE bsde{functions::call(1.0), [](double, double y) { return -0.05 * y; }, nullptr, 0.05};
  const SDESpec sde = SDESpec::black_scholes(0.05, 0.0, 0.2);
  const std::vector<double> xs = {0.9, 1.0, 1.1};
  std::vector<double> res;
  for (auto [n, nx] : {std::pair{3, 101}, {6, 201}, {12, 401}}) {
    res.push_back(
        feynman_kac_check(sde, bsde, LatticeModel(n, 1.0, 0.25, 1.0), SolverConfig{4.0, nx}, xs)
            .residual);
    EXPECT_LE(res.back(), 2e-2) << n;
  }
  EXPECT_LT(res[1], res[0]);
  EXPECT_LT(res[2], res[0]);
}

TEST(FeynmanKac, CsvHeader) {
  FeynmanKacReport r;
  r.rows.push_back({0.0, 1.0, 1.5, 0.5});
  std::ostringstream out;
  r.write_csv(out);
  EXPECT_EQ(out.str(), "x,u_lattice,u_pde,abs_diff\n0,1,1.5,0.5\n");
}

}  // namespace
}  // namespace gexp
