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

#ifndef GEXPECT_GSDE_HPP_
#define GEXPECT_GSDE_HPP_

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gexpect/gpde.hpp"
#include "gexpect/lattice.hpp"
#include "gexpect/test_function.hpp"

namespace gexp {

// dX = drift(X) dt + qv_drift(X) d<B> + diffusion(X) dB, time-homogeneous.
struct SDESpec {
  std::string name;
  std::function<double(double)> drift;
  std::function<double(double)> qv_drift;
  std::function<double(double)> diffusion;
  double lipschitz = 1.0;

  static SDESpec zero();
  // X = x0 + B.
  static SDESpec brownian();
  // dX = a X dt + b X dB.
  static SDESpec linear(double a, double b);
  // dX = mu X dt + nu X d<B> + sigma X dB.
  static SDESpec black_scholes(double mu, double nu, double sigma);
};

// "linear:a,b", "bs:mu,nu,sigma", "brownian" or "zero".
SDESpec parse_coefficients(std::string_view text);

// X_t = exp(alpha t + beta <B>_t + gamma B_t).
struct GeomParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  // The equation solved by x0 * X: mu = alpha, nu = beta + gamma^2 / 2, sigma = gamma.
  SDESpec sde() const;
};

// Closed form of a "linear:a,b" or "bs:mu,nu,sigma" equation: both are
// geometric, x0 exp(mu t + (nu - sigma^2 / 2) <B> + sigma B).
GeomParams parse_geometric(std::string_view text);

AdaptedProcess geometric_gbm(const LatticeModel& m, const GeomParams& p, double x0 = 1.0);

// Euler recursion on every node; NumericError names the first non-finite node.
AdaptedProcess solve_sde(const LatticeModel& m, const SDESpec& spec, double x0);

struct RefinementRow {
  int steps;
  double mean_error;  // E[|X_N - X(T)|]
  double max_error;   // max over paths of |X_N - X(T)|
};

struct RefinementStudy {
  std::vector<RefinementRow> rows;
  // Successive error ratios, each rescaled to a doubling of N:
  // (e_a / e_b)^(ln 2 / ln(N_b / N_a)).
  std::vector<double> ratios;
};

// Euler against the closed form on nested lattices (every N exact mode).
RefinementStudy euler_refinement(const GeomParams& p, double var_lo, double var_hi,
                                 double horizon, std::span<const int> steps, double x0 = 1.0);

struct StabilityReport {
  double lhs;       // E[|X_N - X'_N|^2]
  double rhs;       // exp(C T) |x0 - x0'|^2
  double constant;  // C
};

// C = 2K(1 + s2) + K^2 (1 + s2)^2 dt_c + K^2 s2 with s2 = var_hi and dt_c
// the step of a `calibration_steps` lattice; valid for every finer lattice.
StabilityReport sde_stability(const LatticeModel& m, const SDESpec& spec, double x0,
                              double x0_prime, int calibration_steps = 4);

// Y_t = E[xi + int_t^T f(X, Y) ds + int_t^T g(X, Y) d<B> | Omega_t].
struct BSDESpec {
  PathFunctional xi;
  std::function<double(double x, double y)> f;  // may be empty
  std::function<double(double x, double y)> g;  // may be empty
  double lipschitz_f = 0.0;
  double lipschitz_g = 0.0;
};

struct PicardResult {
  AdaptedProcess y;
  int iterations;
  std::vector<double> deltas;  // sup-node change per iteration
};

// Each iteration is one backward pass
//   W_N = xi,
//   W_k = f(X_k, Y_k) dt + max_sigma [ avg_{+/-} W_{k+1} + g(X_k, Y_k) sigma^2 dt ],
// with Y the previous iterate; starts from E[xi | Omega_k].
PicardResult picard_bsde(const LatticeModel& m, const BSDESpec& spec, const AdaptedProcess& x,
                         double tol = 1e-10, int max_iter = 200);

struct BSDEStability {
  double lhs;       // |Y_0 - Y_0'|
  double rhs;       // C E[|xi - xi'|]
  double constant;  // C = (1 - K dt)^(-N), K = lip_f + lip_g var_hi
};

BSDEStability bsde_stability(const LatticeModel& m, const BSDESpec& spec,
                             const AdaptedProcess& x, const PathFunctional& xi_prime);

// Markovian data: xi = terminal(X_T).
struct MarkovBSDE {
  TestFunction terminal;
  std::function<double(double x, double y)> f;
  std::function<double(double x, double y)> g;
  double lipschitz_f = 0.0;
  double lipschitz_g = 0.0;
};

struct FeynmanKacRow {
  double x;
  double u_lattice;
  double u_pde;
  double abs_diff;
};

struct FeynmanKacReport {
  std::vector<FeynmanKacRow> rows;
  double residual = 0.0;  // max abs_diff
  void write_csv(std::ostream& out) const;
};

// Y_0 from the lattice BSDE started at each x against v(T, x) where
//   v_t = max_{s2 in {var_lo, var_hi}} [ s2 diff(x)^2 v_xx / 2 + (s2 h(x) + b(x)) v_x
//                                        + s2 g(x, v) + f(x, v) ],  v(0, .) = terminal.
FeynmanKacReport feynman_kac_check(const SDESpec& sde, const MarkovBSDE& bsde,
                                   const LatticeModel& m, const SolverConfig& cfg,
                                   std::span<const double> xs);

// The PDE side alone: v(T, .) on cfg's grid.
GridFunction feynman_kac_pde(const SDESpec& sde, const MarkovBSDE& bsde,
                             const UncertaintyParams& params, double horizon,
                             const SolverConfig& cfg);

}  // namespace gexp

#endif  // GEXPECT_GSDE_HPP_
