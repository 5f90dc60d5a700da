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

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "gexpect/errors.hpp"

namespace gexp {

UncertaintyParams::UncertaintyParams(double mu_lo, double mu_hi, double var_lo,
                                     double var_hi)
    : mu_lo(mu_lo), mu_hi(mu_hi), var_lo(var_lo), var_hi(var_hi) {
  if (!(mu_lo <= mu_hi)) throw ArgumentError("uncertainty params need mu_lo <= mu_hi");
  if (!(0.0 <= var_lo && var_lo <= var_hi)) {
    throw ArgumentError("uncertainty params need 0 <= var_lo <= var_hi");
  }
  if (!std::isfinite(mu_lo) || !std::isfinite(mu_hi) || !std::isfinite(var_hi)) {
    throw ArgumentError("uncertainty params must be finite");
  }
}

UncertaintyParams UncertaintyParams::volatility(double var_lo, double var_hi) {
  if (!(var_hi > 0.0)) throw ArgumentError("G-normal params need var_hi > 0");
  return UncertaintyParams(0.0, 0.0, var_lo, var_hi);
}

UncertaintyParams UncertaintyParams::mean(double mu_lo, double mu_hi) {
  return UncertaintyParams(mu_lo, mu_hi, 0.0, 0.0);
}

double UncertaintyParams::sigma_lo() const { return std::sqrt(var_lo); }
double UncertaintyParams::sigma_hi() const { return std::sqrt(var_hi); }
double UncertaintyParams::mu_abs_max() const {
  return std::max(std::abs(mu_lo), std::abs(mu_hi));
}

void SolverConfig::validate() const {
  if (!(half_width > 0.0)) throw ConfigError("solver half_width must be > 0");
  if (nx < 51) throw ConfigError("solver nx must be >= 51, got " + std::to_string(nx));
  if (nx % 2 == 0) throw ConfigError("solver nx must be odd so x = 0 is a node");
  if (!(cfl > 0.0 && cfl < 1.0)) {
    throw ConfigError("unstable configuration: cfl must lie in (0, 1)");
  }
}

SolverConfig SolverConfig::for_problem(const UncertaintyParams& params, double T,
                                       double data_radius, int nx, double cfl) {
  SolverConfig cfg;
  cfg.half_width = data_radius + 6.0 * params.sigma_hi() * std::sqrt(T) +
                   params.mu_abs_max() * T;
  if (!(cfg.half_width > 0.0)) cfg.half_width = 1.0;
  cfg.nx = nx;
  cfg.cfl = cfl;
  return cfg;
}

GridFunction::GridFunction(double t, double half_width, std::vector<double> values)
    : t_(t), half_width_(half_width), values_(std::move(values)) {
  if (!(half_width_ > 0.0)) throw ArgumentError("grid half-width must be > 0");
  if (values_.size() < 3) throw ArgumentError("grid needs at least 3 nodes");
  spacing_ = 2.0 * half_width_ / static_cast<double>(values_.size() - 1);
}

double GridFunction::evaluate(double x) const {
  if (!(std::abs(x) <= half_width_)) {
    std::ostringstream msg;
    msg << "evaluate: x = " << x << " outside [-" << half_width_ << ", "
        << half_width_ << "]";
    throw DomainError(msg.str());
  }
  const double pos = (x + half_width_) / spacing_;
  const auto last = values_.size() - 1;
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-9) return values_[static_cast<std::size_t>(nearest)];
  auto i = static_cast<std::size_t>(std::floor(pos));
  if (i >= last) return values_[last];
  const double w = pos - static_cast<double>(i);
  if (w == 0.0) return values_[i];
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

void GridFunction::write_csv(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << "# t=" << t_ << "\n";
  out << "x,u\n";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    out << x(i) << "," << values_[i] << "\n";
  }
  out.precision(old_precision);
}

double evaluate(const GridFunction& g, double x) { return g.evaluate(x); }

double g_eval(const UncertaintyParams& params, double p, double a) {
  double best = -std::numeric_limits<double>::infinity();
  for (double q : {params.mu_lo, params.mu_hi}) {
    for (double s2 : {params.var_lo, params.var_hi}) {
      best = std::max(best, 0.5 * s2 * a + q * p);
    }
  }
  return best;
}

ControlledGenerator g_generator(const UncertaintyParams& params) {
  ControlledGenerator gen;
  std::vector<std::pair<double, double>> corners;
  for (double s2 : {params.var_hi, params.var_lo}) {
    for (double q : {params.mu_hi, params.mu_lo}) {
      if (std::find(corners.begin(), corners.end(), std::make_pair(s2, q)) ==
          corners.end()) {
        corners.emplace_back(s2, q);
      }
    }
  }
  for (const auto& [s2, q] : corners) {
    gen.controls.push_back(Control{[s2 = s2](double) { return 0.5 * s2; },
                                   [q = q](double) { return q; }, {}});
  }
  return gen;
}

namespace {

struct Stencil {
  // Upwind weights: u_t ~ up * (u[i+1] - u[i]) + down * (u[i-1] - u[i]) + source.
  std::vector<double> up;
  std::vector<double> down;
  const std::function<double(double, double)>* source;
};

GridFunction on_grid(const GridFunction& initial, const SolverConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.nx);
  if (initial.size() == n && initial.half_width() == cfg.half_width) return initial;
  GridFunction target(initial.t(), cfg.half_width, std::vector<double>(n));
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = initial.evaluate(target.x(i));
  return GridFunction(initial.t(), cfg.half_width, std::move(values));
}

}  // namespace

GridFunction solve_controlled(const GridFunction& initial,
                              const ControlledGenerator& generator, double T,
                              const SolverConfig& cfg) {
  cfg.validate();
  if (!(T > 0.0)) throw ArgumentError("solve needs a horizon T > 0");
  if (generator.controls.empty()) throw ArgumentError("generator has no controls");

  const GridFunction start = on_grid(initial, cfg);
  const std::size_t n = start.size();
  const double h = start.spacing();
  const double inv_h = 1.0 / h;
  const double inv_h2 = inv_h * inv_h;

  std::vector<Stencil> stencils;
  stencils.reserve(generator.controls.size());
  double rate = 0.0;
  for (const auto& control : generator.controls) {
    Stencil s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
              control.source ? &control.source : nullptr};
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double x = start.x(i);
      const double d = control.diffusion ? control.diffusion(x) : 0.0;
      const double c = control.drift ? control.drift(x) : 0.0;
      if (!(d >= 0.0) || !std::isfinite(c)) {
        throw ConfigError("control has negative or non-finite coefficients at x = " +
                          std::to_string(x));
      }
      s.up[i] = d * inv_h2 + std::max(c, 0.0) * inv_h;
      s.down[i] = d * inv_h2 + std::max(-c, 0.0) * inv_h;
      rate = std::max(rate, s.up[i] + s.down[i] + generator.source_lipschitz);
    }
    stencils.push_back(std::move(s));
  }
  if (rate == 0.0) rate = 1.0;
  const double dt_full = cfg.cfl / rate;
  auto steps = static_cast<long long>(std::ceil(T / dt_full));
  if (steps < 1) steps = 1;
  // Guard against ceil() rounding up a ratio that is an integer.
  if (steps > 1 && static_cast<double>(steps - 1) * dt_full >= T) --steps;

  std::vector<double> u(start.values().begin(), start.values().end());
  std::vector<double> next(u);
  const double left_fixed = u.front();
  const double right_fixed = u.back();

  for (long long step = 0; step < steps; ++step) {
    const double dt = (step + 1 < steps)
                          ? dt_full
                          : T - static_cast<double>(steps - 1) * dt_full;
    bool finite = true;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double ui = u[i];
      const double du_up = u[i + 1] - ui;
      const double du_down = u[i - 1] - ui;
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& s : stencils) {
        double v = s.up[i] * du_up + s.down[i] * du_down;
        if (s.source) v += (*s.source)(start.x(i), ui);
        if (v > best) best = v;
      }
      next[i] = ui + dt * best;
      finite = finite && std::isfinite(next[i]);
    }
    if (cfg.boundary == Boundary::kClampToInitial) {
      next.front() = left_fixed;
      next.back() = right_fixed;
    } else {
      next.front() = 2.0 * next[1] - next[2];
      next.back() = 2.0 * next[n - 2] - next[n - 3];
    }
    if (!finite || !std::isfinite(next.front()) || !std::isfinite(next.back())) {
      throw NumericError("non-finite value in explicit scheme at step " +
                         std::to_string(step + 1) + " of " + std::to_string(steps));
    }
    std::swap(u, next);
  }
  return GridFunction(start.t() + T, cfg.half_width, std::move(u));
}

GridFunction solve_g_parabolic(const GridFunction& initial,
                               const UncertaintyParams& params, double T,
                               const SolverConfig& cfg) {
  return solve_controlled(initial, g_generator(params), T, cfg);
}

GridFunction solve_g_parabolic(const TestFunction& phi,
                               const UncertaintyParams& params, double T,
                               const SolverConfig& cfg) {
  cfg.validate();
  GridFunction grid(0.0, cfg.half_width,
                    std::vector<double>(static_cast<std::size_t>(cfg.nx)));
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = phi(grid.x(i));
  return solve_g_parabolic(GridFunction(0.0, cfg.half_width, std::move(values)),
                           params, T, cfg);
}

double gnormal_expectation(const TestFunction& phi, const UncertaintyParams& params,
                           const SolverConfig& cfg) {
  if (!params.mean_certain()) {
    throw ArgumentError("gnormal_expectation needs mu_lo = mu_hi = 0");
  }
  return solve_g_parabolic(phi, params, 1.0, cfg).evaluate(0.0);
}

double gnormal_expectation(const TestFunction& phi, const UncertaintyParams& params) {
  return gnormal_expectation(phi, params,
                             SolverConfig::for_problem(params, 1.0, phi.radius()));
}

double maximal_expectation(const std::function<double(double)>& phi, double lo,
                           double hi) {
  if (!(lo <= hi)) throw ArgumentError("maximal_expectation needs lo <= hi");
  constexpr int kScan = 2049;
  if (lo == hi) return phi(lo);
  const double step = (hi - lo) / (kScan - 1);
  double best = phi(lo);
  int best_i = 0;
  for (int i = 1; i < kScan; ++i) {
    const double x = (i == kScan - 1) ? hi : lo + step * i;
    const double v = phi(x);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  // Golden-section refinement on the bracket around the best scan point.
  double a = lo + step * std::max(best_i - 1, 0);
  double b = std::min(hi, lo + step * std::min(best_i + 1, kScan - 1));
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = phi(c);
  double fd = phi(d);
  while (b - a > 1e-10) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = phi(d);
    }
  }
  return std::max({best, fc, fd, phi(0.5 * (a + b)), phi(hi)});
}

}  // namespace gexp
