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

#include "gexpect/cli/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gexpect/errors.hpp"
#include "gexpect/gpde.hpp"
#include "gexpect/gsde.hpp"
#include "gexpect/lattice.hpp"
#include "gexpect/limits.hpp"
#include "gexpect/scenario.hpp"
#include "gexpect/test_function.hpp"

namespace gexp::cli {

namespace {

using nlohmann::json;

// Tolerances, one block per criterion.
constexpr double kMomentAbs = 1e-2;
constexpr double kQuarticRel = 1e-2;
constexpr double kCubeFloor = 1e-3;
constexpr double kGaussianOdd = 1e-12;
constexpr double kBudget1 = 30.0;

constexpr double kCltSlack = 0.10;
constexpr double kCltFinal = 1e-2;
constexpr double kCltSquare = 1e-10;
constexpr int kCltReferenceNx = 1601;
constexpr double kBudget2 = 60.0;

constexpr double kLlnFinal = 1e-2;

constexpr double kLatticeZero = 1e-12;
constexpr double kIsometryRel = 1e-10;
constexpr double kMomentExact = 1e-12;
constexpr double kMartingale = 1e-12;
constexpr double kNoDriftFloor = 1e-4;
constexpr double kBudget4 = 60.0;

constexpr double kAxioms = 1e-12;
constexpr double kRiskFixedPoint = 1e-12;

constexpr int kPropertyNx = 401;
constexpr int kPropertyFineNx = 1601;
constexpr double kRoundoffRel = 1e-12;
constexpr double kSemigroupFactor = 3.0;

constexpr double kRatioLo = 1.5;
constexpr double kRatioHi = 3.0;
constexpr int kPicardMaxIterations = 30;
constexpr double kPicardTol = 1e-10;
constexpr double kFeynmanKac = 2e-2;
constexpr double kFeynmanKacSlack = 0.10;

constexpr double kJensen = 1e-9;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

TestFunction neg_square() { return functions::square().affine(-1.0, 0.0); }

CriterionResult gnormal_moments() {
  Timer timer;
  const UncertaintyParams p = UncertaintyParams::volatility(0.25, 1.0);
  const double x2 = gnormal_expectation(functions::square(), p);
  const double x4 = gnormal_expectation(functions::quartic(), p);
  const double mx2 = gnormal_expectation(neg_square(), p);
  const double x3 = gnormal_expectation(functions::cube(), p);
  double gauss = -1.0;
  double gauss_abs = 0.0;
  for (int i = 0; i < 9; ++i) {
    const double s2 = 0.25 + 0.75 * i / 8.0;
    const double g = gaussian_reference(functions::cube(), s2);
    gauss = std::max(gauss, g);
    gauss_abs = std::max(gauss_abs, std::abs(g));
  }
  const double seconds = timer.seconds();
  const bool pass = std::abs(x2 - 1.0) <= kMomentAbs && std::abs(x4 - 3.0) / 3.0 <= kQuarticRel &&
                    std::abs(mx2 + 0.25) <= kMomentAbs && x3 > kCubeFloor &&
                    gauss_abs <= kGaussianOdd && x3 > std::max(0.0, gauss) &&
                    seconds < kBudget1;
  return {1, "G-normal moments", pass,
          "E[x^2]=" + num(x2) + " E[x^4]=" + num(x4) + " -E[-x^2]=" + num(-mx2) +
              " E[x^3]=" + num(x3) + " sup gaussian x^3=" + num(gauss),
          seconds,
          json{{"x2", x2}, {"x4", x4}, {"neg_x2", mx2}, {"x3", x3}, {"gaussian_sup", gauss}}};
}

CriterionResult robust_clt() {
  Timer timer;
  const UncertaintyParams p = UncertaintyParams::volatility(0.25, 1.0);
  const TestFunction call = functions::call(1.0);
  const double reference =
      gnormal_expectation(call, p, SolverConfig::for_problem(p, 1.0, call.radius(), kCltReferenceNx));
  const StepFamily fam = StepFamily::rademacher(0.25, 1.0);
  const std::vector<int> ns = {8, 32, 128, 512};
  const ConvergenceReport conv = convergence_report(fam, call, ns, reference, Law::kClt);
  bool monotone = true;
  std::string errors;
  for (std::size_t i = 0; i < conv.rows.size(); ++i) {
    errors += (i ? "," : "") + num(conv.rows[i].abs_error);
    if (i > 0 && conv.rows[i].abs_error > (1.0 + kCltSlack) * conv.rows[i - 1].abs_error) {
      monotone = false;
    }
  }
  const double final_error = conv.rows.back().abs_error;
  double square_worst = 0.0;
  for (int n = 1; n <= 512; ++n) {
    square_worst = std::max(
        square_worst, std::abs(clt_value(fam, functions::square(), n) - p.var_hi));
  }
  const double seconds = timer.seconds();
  const bool pass = monotone && final_error <= kCltFinal && square_worst <= kCltSquare &&
                    seconds < kBudget2;
  json rows = json::array();
  for (const ConvergenceRow& r : conv.rows) {
    rows.push_back({{"n", r.n}, {"value", r.value}, {"abs_error", r.abs_error}});
  }
  return {2, "robust CLT", pass,
          "call errors n=8,32,128,512: " + errors + (monotone ? " (nonincreasing)" : " (NOT nonincreasing)") +
              "; final " + num(final_error) + " <= " + num(kCltFinal) +
              "; max_n<=512 |E[x^2]-var_hi|=" + num(square_worst),
          seconds,
          json{{"reference", reference}, {"rows", rows}, {"square_worst", square_worst}}};
}

CriterionResult robust_lln() {
  Timer timer;
  const double lo = -0.5;
  const double hi = 0.5;
  const TestFunction dist = functions::dist(lo, hi);
  const std::vector<int> ns = {8, 32, 128, 512};
  bool pass = true;
  std::string detail;
  json data = json::object();
  const std::vector<std::pair<std::string, StepFamily>> families = {
      {"dirac", StepFamily::dirac(lo, hi)},
      {"noisy", StepFamily::shifted_rademacher(lo, hi, 0.5)}};
  for (const auto& [name, fam] : families) {
    std::vector<double> values;
    bool decreasing = true;
    for (int n : ns) {
      values.push_back(lln_value(fam, dist, n));
      if (values.size() > 1 && values.back() > values[values.size() - 2]) decreasing = false;
    }
    const bool ok = decreasing && values.back() <= kLlnFinal;
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + name + " dist n=8..512:";
    for (double v : values) detail += " " + num(v);
    data[name] = values;
  }
  return {3, "robust LLN", pass, detail, timer.seconds(), data};
}

CriterionResult lattice_identities() {
  Timer timer;
  const LatticeModel m(10, 1.0, 0.25, 1.0);
  const int n = m.steps();
  std::vector<AdaptedProcess> etas = {
      AdaptedProcess::constant(m, n, 1.0),
      AdaptedProcess::generate(m, n,
                               [](const LatticePath& p) { return p.B(p.length()) >= 0 ? 1.0 : -1.0; }),
      AdaptedProcess::generate(
          m, n, [](const LatticePath& p) { return std::sin(p.B(p.length())) + p.qv(p.length()); }),
  };
  double mean_worst = 0.0;
  double iso_worst = 0.0;
  for (const AdaptedProcess& eta : etas) {
    const PathFunctional integral = ito_integral(m, eta);
    mean_worst = std::max(mean_worst, std::abs(lattice_expectation(m, integral)));
    mean_worst = std::max(
        mean_worst,
        std::abs(lattice_expectation(m, [&](const LatticePath& p) { return -integral(p); })));
    const IsometryResult iso = isometry_check(m, eta);
    iso_worst = std::max(iso_worst, std::abs(iso.lhs - iso.rhs) / std::max(1.0, std::abs(iso.lhs)));
  }
  double moment_worst = 0.0;
  bool second_bound = true;
  for (int k = 1; k <= 3; ++k) {
    const QVMoment q = qv_moment(m, k);
    moment_worst = std::max(moment_worst, std::abs(q.upper - std::pow(m.var_hi(), k)));
    moment_worst = std::max(moment_worst, std::abs(q.lower - std::pow(m.var_lo(), k)));
    second_bound = second_bound && q.second_moment <= q.second_moment_bound;
  }
  const QuadraticVariation qv = quadratic_variation(m);
  const AdaptedProcess zero = AdaptedProcess::constant(m, n, 0.0);
  const AdaptedProcess cosine = AdaptedProcess::generate(
      m, n, [](const LatticePath& p) { return std::cos(p.B(p.length())); });
  const AdaptedProcess level =
      AdaptedProcess::generate(m, n, [](const LatticePath& p) { return p.B(p.length()); });
  double mart_worst = 0.0;
  mart_worst = std::max(mart_worst, martingale_residual(m, zero, etas[0]));
  mart_worst = std::max(mart_worst, martingale_residual(m, etas[1], etas[2]));
  mart_worst = std::max(mart_worst, martingale_residual(m, cosine, level));
  const double no_drift = martingale_residual(m, zero, etas[0], false);
  const double seconds = timer.seconds();
  const bool pass = mean_worst <= kLatticeZero && iso_worst <= kIsometryRel &&
                    moment_worst <= kMomentExact && second_bound && qv.within_envelope &&
                    mart_worst <= kMartingale && no_drift > kNoDriftFloor && seconds < kBudget4;
  return {4, "lattice exact identities", pass,
          "|E[+-int eta dB]|<=" + num(mean_worst) + " isometry " + num(iso_worst) +
              " qv moments " + num(moment_worst) + (second_bound ? " E[<B>^2]<=10" : " E[<B>^2] bound FAILED") +
              (qv.within_envelope ? " envelope ok" : " envelope FAILED") + " martingale " +
              num(mart_worst) + " no-drift " + num(no_drift),
          seconds,
          json{{"ito_mean", mean_worst}, {"isometry", iso_worst}, {"qv_moments", moment_worst},
               {"qv_identity", qv.identity_residual}, {"martingale", mart_worst},
               {"martingale_no_drift", no_drift}}};
}

CriterionResult independence_asymmetry() {
  Timer timer;
  const ScenarioSet set({"-1", "0", "1"}, {{0.5, 0.0, 0.5}, {0.0, 1.0, 0.0}});
  const RandomVariable x = RandomVariable::scalar(set, {-1.0, 0.0, 1.0});
  const TestFunction x_y2("x*y^2", 2, [](std::span<const double> v) { return v[0] * v[1] * v[1]; });
  const TestFunction y_x2("x*y^2 swapped", 2,
                          [](std::span<const double> v) { return v[1] * v[0] * v[0]; });
  const double y_after_x = product_expectation(set, set, x_y2, x, x);
  const double x_after_y = product_expectation(set, set, y_x2, x, x);
  const bool pass = y_after_x == 0.5 && x_after_y == 0.0;
  return {5, "independence asymmetry", pass,
          "Y independent from X: " + num(y_after_x) + " (expect 0.5); X independent from Y: " +
              num(x_after_y) + " (expect 0)",
          timer.seconds(), json{{"y_independent_from_x", y_after_x}, {"x_independent_from_y", x_after_y}}};
}

CriterionResult axiom_suite() {
  Timer timer;
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<int> outcomes(2, 7);
  std::uniform_int_distribution<int> measures(1, 4);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::uniform_real_distribution<double> value(-3.0, 3.0);
  double worst = 0.0;
  double risk_worst = 0.0;
  bool all = true;
  for (int s = 0; s < 20; ++s) {
    const int m = outcomes(rng);
    std::vector<std::string> labels;
    for (int i = 0; i < m; ++i) labels.push_back("w" + std::to_string(i));
    std::vector<std::vector<double>> ps;
    for (int k = measures(rng); k > 0; --k) {
      std::vector<double> w(static_cast<std::size_t>(m));
      double total = 0.0;
      for (double& v : w) {
        v = weight(rng) < 0.2 ? 0.0 : weight(rng);
        total += v;
      }
      if (total == 0.0) {
        w[0] = 1.0;
        total = 1.0;
      }
      for (double& v : w) v /= total;
      ps.push_back(std::move(w));
    }
    const ScenarioSet set(labels, ps);
    std::vector<RandomVariable> probes;
    for (int j = 0; j < 10; ++j) {
      std::vector<double> v(static_cast<std::size_t>(m));
      for (double& x : v) x = value(rng);
      probes.push_back(RandomVariable::scalar(set, v));
    }
    const AxiomReport report = check_axioms(set, probes, kAxioms);
    all = all && report.all_passed();
    worst = std::max(worst, report.worst_violation());
    for (const RandomVariable& x : probes) {
      risk_worst = std::max(risk_worst, std::abs(risk_measure(set, x + risk_measure(set, x))));
    }
  }
  const bool pass = all && worst <= kAxioms && risk_worst <= kRiskFixedPoint;
  return {6, "axiom suite", pass,
          "20 sets x 10 probes worst violation " + num(worst) + "; max |rho(X+rho(X))| " +
              num(risk_worst),
          timer.seconds(), json{{"worst_violation", worst}, {"risk_fixed_point", risk_worst}}};
}

double max_abs_diff(const GridFunction& a, const GridFunction& b, double radius) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.x(i)) <= radius) worst = std::max(worst, std::abs(a[i] - b.evaluate(a.x(i))));
  }
  return worst;
}

CriterionResult pde_properties() {
  Timer timer;
  const UncertaintyParams p(-0.2, 0.3, 0.25, 1.0);
  const TestFunction phi = functions::call(0.5);
  const TestFunction psi = functions::abs();
  const SolverConfig cfg = SolverConfig::for_problem(p, 1.0, 1.0, kPropertyNx);
  const GridFunction u_phi = solve_g_parabolic(phi, p, 1.0, cfg);
  const GridFunction u_psi = solve_g_parabolic(psi, p, 1.0, cfg);
  const auto rel = [](double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); };

  bool comparison = true;
  for (std::size_t i = 0; i < u_phi.size(); ++i) comparison = comparison && u_phi[i] <= u_psi[i];

  const GridFunction u_sum = solve_g_parabolic(phi + psi, p, 1.0, cfg);
  double sub = 0.0;
  for (std::size_t i = 0; i < u_sum.size(); ++i) {
    const double excess = u_sum[i] - (u_phi[i] + u_psi[i]);
    sub = std::max(sub, excess / std::max(1.0, std::abs(u_sum[i])));
  }
  double homog = 0.0;
  for (double lambda : {0.0, 0.5, 2.0, 3.0}) {
    const GridFunction u = solve_g_parabolic(phi.affine(lambda, 0.0), p, 1.0, cfg);
    for (std::size_t i = 0; i < u.size(); ++i) homog = std::max(homog, rel(u[i], lambda * u_phi[i]));
  }
  double cash = 0.0;
  for (double c : {-1.0, 3.0}) {
    const GridFunction u = solve_g_parabolic(phi.affine(1.0, c), p, 1.0, cfg);
    for (std::size_t i = 0; i < u.size(); ++i) cash = std::max(cash, rel(u[i], u_phi[i] + c));
  }

  const SolverConfig fine = SolverConfig::for_problem(p, 1.0, 1.0, kPropertyFineNx);
  const double grid_error = max_abs_diff(u_phi, solve_g_parabolic(phi, p, 1.0, fine), 1.0);
  const GridFunction half = solve_g_parabolic(phi, p, 0.5, cfg);
  const GridFunction restarted = solve_g_parabolic(half, p, 0.5, cfg);
  const double semigroup = max_abs_diff(restarted, u_phi, 1.0);

  const UncertaintyParams centred = UncertaintyParams::volatility(0.25, 1.0);
  const SolverConfig ccfg = SolverConfig::for_problem(centred, 1.0, 1.0, kPropertyNx);
  const double odd_value = gnormal_expectation(phi, centred, ccfg);
  const double odd_mirror = gnormal_expectation(phi.reflected(), centred, ccfg);
  const double odd_grid_error = std::abs(
      odd_value - gnormal_expectation(phi, centred,
                                      SolverConfig::for_problem(centred, 1.0, 1.0, kPropertyFineNx)));
  const double odd = std::abs(odd_value - odd_mirror);

  const bool pass = comparison && sub <= kRoundoffRel && homog <= kRoundoffRel &&
                    cash <= kRoundoffRel && semigroup <= kSemigroupFactor * grid_error &&
                    odd <= odd_grid_error;
  return {7, "PDE property suite", pass,
          std::string(comparison ? "comparison ok" : "comparison FAILED") + "; sublinearity excess " +
              num(sub) + "; homogeneity " + num(homog) + "; cash " + num(cash) + "; semigroup " +
              num(semigroup) + " <= 3x" + num(grid_error) + "; odd symmetry " + num(odd) +
              " <= " + num(odd_grid_error),
          timer.seconds(),
          json{{"comparison", comparison}, {"sublinearity", sub}, {"homogeneity", homog},
               {"cash", cash}, {"semigroup", semigroup}, {"grid_error", grid_error},
               {"odd_symmetry", odd}, {"odd_grid_error", odd_grid_error}}};
}

CriterionResult sde_bsde() {
  Timer timer;
  const std::vector<int> steps = {4, 8, 12};
  const RefinementStudy study = euler_refinement(GeomParams{0.1, 0.5, 0.2}, 0.25, 1.0, 1.0, steps);
  bool ratios_ok = true;
  std::string ratios;
  for (double r : study.ratios) {
    ratios_ok = ratios_ok && r >= kRatioLo && r <= kRatioHi;
    ratios += (ratios.empty() ? "" : ",") + num(r);
  }

  const LatticeModel m12(12, 1.0, 0.25, 1.0);
  const AdaptedProcess bm = solve_sde(m12, SDESpec::brownian(), 0.0);
  const BSDESpec linear{[](const LatticePath& p) {
                          const double b = p.B(p.length());
                          return b * b;
                        },
                        [](double, double y) { return -y; }, {}, 1.0, 0.0};
  int iterations = -1;
  double y0 = std::nan("");
  try {
    const PicardResult r = picard_bsde(m12, linear, bm, kPicardTol, kPicardMaxIterations);
    iterations = r.iterations;
    y0 = r.y.root();
  } catch (const ConvergenceError&) {
  }

  const std::vector<std::pair<int, int>> grids = {{3, 101}, {6, 201}, {12, 401}};
  const std::vector<double> xs = {-1.0, -0.5, 0.0, 0.5, 1.0};
  const MarkovBSDE quadratic{functions::square(), {}, {}, 0.0, 0.0};
  std::vector<double> fk;
  for (const auto& [n, nx] : grids) {
    const LatticeModel m(n, 1.0, 0.25, 1.0);
    const SolverConfig cfg = SolverConfig::for_problem(m.params(), 1.0, 1.0, nx);
    fk.push_back(feynman_kac_check(SDESpec::brownian(), quadratic, m, cfg, xs).residual);
  }
  bool fk_monotone = true;
  for (std::size_t i = 1; i < fk.size(); ++i) {
    fk_monotone = fk_monotone && fk[i] <= (1.0 + kFeynmanKacSlack) * fk[i - 1];
  }
  const bool pass = ratios_ok && iterations > 0 && iterations <= kPicardMaxIterations &&
                    fk.back() <= kFeynmanKac && fk_monotone;
  return {8, "SDE/BSDE", pass,
          "Euler ratios " + ratios + "; Picard iterations " + std::to_string(iterations) +
              " (Y0=" + num(y0) + "); Feynman-Kac residuals " + num(fk[0]) + "," + num(fk[1]) +
              "," + num(fk[2]),
          timer.seconds(),
          json{{"euler_ratios", study.ratios}, {"picard_iterations", iterations}, {"y0", y0},
               {"feynman_kac", fk}}};
}

CriterionResult jensen() {
  Timer timer;
  const LatticeModel m(10, 1.0, 0.25, 1.0);
  const std::vector<TestFunction> probes = {
      functions::identity(), functions::square(), functions::call(0.2),
      TestFunction("sin", [](double x) { return std::sin(x); }, 1.0),
      TestFunction("clip", [](double x) { return std::clamp(x, -0.5, 0.5); }, 1.0)};
  bool pass = true;
  double worst_gap = std::numeric_limits<double>::infinity();
  std::string names;
  for (const TestFunction& h : {functions::square(), functions::exp(), functions::abs()}) {
    const JensenReport r = jensen_check(m, h, probes, kJensen);
    pass = pass && r.inequality_holds;
    for (const JensenRow& row : r.rows) worst_gap = std::min(worst_gap, row.lhs - row.rhs);
    names += (names.empty() ? "" : ",") + h.name();
  }
  return {9, "G-Jensen", pass,
          "h in {" + names + "} x 5 probes: min E[h(xi)] - h(E[xi]) = " + num(worst_gap),
          timer.seconds(), json{{"min_gap", worst_gap}}};
}

}  // namespace

CriterionResult run_criterion(int id) {
  try {
    switch (id) {
      case 1: return gnormal_moments();
      case 2: return robust_clt();
      case 3: return robust_lln();
      case 4: return lattice_identities();
      case 5: return independence_asymmetry();
      case 6: return axiom_suite();
      case 7: return pde_properties();
      case 8: return sde_bsde();
      case 9: return jensen();
      default: break;
    }
  } catch (const std::exception& e) {
    return {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what(), 0.0,
            json::object()};
  }
  throw ArgumentError("acceptance: no criterion " + std::to_string(id));
}

std::vector<CriterionResult> run_acceptance() {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriteria; ++id) out.push_back(run_criterion(id));
  return out;
}

std::string format_line(const CriterionResult& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2f s", r.seconds);
  return std::string(r.pass ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.title +
         " (" + secs + "): " + r.detail;
}

}  // namespace gexp::cli
