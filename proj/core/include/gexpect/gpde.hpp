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

#ifndef GEXPECT_GPDE_HPP_
#define GEXPECT_GPDE_HPP_

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "gexpect/test_function.hpp"

namespace gexp {

// Mean envelope [mu_lo, mu_hi] and variance envelope [var_lo, var_hi].
struct UncertaintyParams {
  double mu_lo = 0.0;
  double mu_hi = 0.0;
  double var_lo = 1.0;
  double var_hi = 1.0;

  UncertaintyParams() = default;
  UncertaintyParams(double mu_lo, double mu_hi, double var_lo, double var_hi);

  // Zero mean, variance in [var_lo, var_hi].
  static UncertaintyParams volatility(double var_lo, double var_hi);
  // Zero variance, mean in [mu_lo, mu_hi] (maximal distribution).
  static UncertaintyParams mean(double mu_lo, double mu_hi);

  double sigma_lo() const;
  double sigma_hi() const;
  double mu_abs_max() const;
  bool mean_certain() const { return mu_lo == mu_hi && mu_lo == 0.0; }
};

enum class Boundary { kClampToInitial, kLinearExtrapolation };

struct SolverConfig {
  double half_width = 6.0;
  int nx = 801;
  double cfl = 0.4;
  Boundary boundary = Boundary::kClampToInitial;

  // Throws ConfigError unless half_width > 0, nx >= 51 and odd, cfl in (0,1).
  void validate() const;

  // half_width = data_radius + 6 sigma_hi sqrt(T) + |mu|_max T.
  static SolverConfig for_problem(const UncertaintyParams& params, double T,
                                  double data_radius, int nx = 801,
                                  double cfl = 0.4);
};

// Values of u(t, .) on the uniform grid x_i = -L + i h, h = 2L / (nx - 1).
class GridFunction {
 public:
  GridFunction(double t, double half_width, std::vector<double> values);

  double t() const noexcept { return t_; }
  double half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return values_.size(); }
  double spacing() const noexcept { return spacing_; }
  // Symmetric about the centre node, which is exactly 0.
  double x(std::size_t i) const noexcept {
    return (static_cast<double>(i) - 0.5 * static_cast<double>(values_.size() - 1)) *
           spacing_;
  }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  // Piecewise-linear interpolation; DomainError for |x| > L.
  double evaluate(double x) const;

  // "# t=<t>" header line, then "x,u" and one row per node.
  void write_csv(std::ostream& out) const;

 private:
  double t_;
  double half_width_;
  double spacing_;
  std::vector<double> values_;
};

double evaluate(const GridFunction& g, double x);

// G(p, a) = max over (q, s2) in {mu_lo, mu_hi} x {var_lo, var_hi} of
// s2 a / 2 + q p.
double g_eval(const UncertaintyParams& params, double p, double a);

// One control of a Bellman operator sup_k [ d_k(x) u_xx + c_k(x) u_x + r_k(x, u) ].
// `source` may be left empty.
struct Control {
  std::function<double(double)> diffusion;
  std::function<double(double)> drift;
  std::function<double(double x, double u)> source;
};

struct ControlledGenerator {
  std::vector<Control> controls;
  // Lipschitz constant of the sources in u; shortens the step so the
  // explicit update stays monotone.
  double source_lipschitz = 0.0;
};

// The four corners of the generator set as controls (duplicates removed).
ControlledGenerator g_generator(const UncertaintyParams& params);

// Explicit monotone scheme for u_t = sup_k [...] from `initial` (taken as the
// value at time initial.t()) over a horizon T. Upwind first differences,
// dt = cfl / max_{k,i}(2 d_k/h^2 + |c_k|/h + source_lipschitz), last step
// shortened to land on initial.t() + T.
GridFunction solve_controlled(const GridFunction& initial,
                              const ControlledGenerator& generator, double T,
                              const SolverConfig& cfg);

// u_t = G(u_x, u_xx), u(0, .) = phi; returns u(T, .).
GridFunction solve_g_parabolic(const TestFunction& phi,
                               const UncertaintyParams& params, double T,
                               const SolverConfig& cfg);
// Restart from a previous solution (interpolated onto cfg's grid if needed).
GridFunction solve_g_parabolic(const GridFunction& initial,
                               const UncertaintyParams& params, double T,
                               const SolverConfig& cfg);

// E[phi(X)] for X G-normal (requires mu_lo = mu_hi = 0): u(1, 0).
double gnormal_expectation(const TestFunction& phi, const UncertaintyParams& params,
                           const SolverConfig& cfg);
double gnormal_expectation(const TestFunction& phi, const UncertaintyParams& params);

// max of phi over [lo, hi]: 2049-point scan refined by golden section.
double maximal_expectation(const std::function<double(double)>& phi, double lo,
                           double hi);

// E[phi(N(0, sigma2))] by 128-node Gauss-Hermite quadrature. Accurate to
// round-off for smooth phi; a kink limits it to about 1e-3.
double gaussian_reference(const std::function<double(double)>& phi, double sigma2);

}  // namespace gexp

#endif  // GEXPECT_GPDE_HPP_
