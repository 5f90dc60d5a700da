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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "gexpect/errors.hpp"

namespace gexp {

namespace {

std::vector<double> parse_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  while (true) {
    const std::size_t comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || item.empty()) {
      throw ArgumentError("coefficients: bad number '" + std::string(item) + "' in " +
                          std::string(what));
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

// Expectation of a leaf functional over the lattice.
double root_of(const LatticeModel& m, std::vector<double> leaves) {
  std::vector<double> v = std::move(leaves);
  for (int k = m.steps(); k > 0; --k) v = one_step_expectation(v);
  return v.front();
}

}  // namespace

SDESpec SDESpec::zero() {
  auto z = [](double) { return 0.0; };
  return SDESpec{"zero", z, z, z, 1.0};
}

SDESpec SDESpec::brownian() {
  auto z = [](double) { return 0.0; };
  return SDESpec{"brownian", z, z, [](double) { return 1.0; }, 1.0};
}

SDESpec SDESpec::linear(double a, double b) {
  std::ostringstream name;
  name << "linear:" << a << ',' << b;
  return SDESpec{name.str(), [a](double x) { return a * x; }, [](double) { return 0.0; },
                 [b](double x) { return b * x; },
                 std::max({std::abs(a), std::abs(b), 1e-12})};
}

SDESpec SDESpec::black_scholes(double mu, double nu, double sigma) {
  std::ostringstream name;
  name << "bs:" << mu << ',' << nu << ',' << sigma;
  return SDESpec{name.str(), [mu](double x) { return mu * x; },
                 [nu](double x) { return nu * x; }, [sigma](double x) { return sigma * x; },
                 std::max({std::abs(mu), std::abs(nu), std::abs(sigma), 1e-12})};
}

SDESpec parse_coefficients(std::string_view text) {
  if (text == "brownian") return SDESpec::brownian();
  if (text == "zero") return SDESpec::zero();
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ArgumentError("coefficients: expected linear:a,b or bs:mu,nu,sigma, got '" +
                        std::string(text) + "'");
  }
  const std::string_view kind = text.substr(0, colon);
  const std::vector<double> v = parse_list(text.substr(colon + 1), text);
  if (kind == "linear" && v.size() == 2) return SDESpec::linear(v[0], v[1]);
  if (kind == "bs" && v.size() == 3) return SDESpec::black_scholes(v[0], v[1], v[2]);
  throw ArgumentError("coefficients: expected linear:a,b or bs:mu,nu,sigma, got '" +
                      std::string(text) + "'");
}

GeomParams parse_geometric(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon != std::string_view::npos) {
    const std::string_view kind = text.substr(0, colon);
    const std::vector<double> v = parse_list(text.substr(colon + 1), text);
    if (kind == "linear" && v.size() == 2) return GeomParams{v[0], -0.5 * v[1] * v[1], v[1]};
    if (kind == "bs" && v.size() == 3) return GeomParams{v[0], v[1] - 0.5 * v[2] * v[2], v[2]};
  }
  throw ArgumentError("coefficients: no closed form for '" + std::string(text) +
                      "' (expected linear:a,b or bs:mu,nu,sigma)");
}

SDESpec GeomParams::sde() const {
  return SDESpec::black_scholes(alpha, beta + 0.5 * gamma * gamma, gamma);
}

AdaptedProcess geometric_gbm(const LatticeModel& m, const GeomParams& p, double x0) {
  return AdaptedProcess::generate(m, m.steps(), [&](const LatticePath& path) {
    const int k = path.length();
    return x0 * std::exp(p.alpha * m.time(k) + p.beta * path.qv(k) + p.gamma * path.B(k));
  });
}

AdaptedProcess solve_sde(const LatticeModel& m, const SDESpec& spec, double x0) {
  m.require_exact("solve_sde");
  if (!spec.drift || !spec.qv_drift || !spec.diffusion) {
    throw ArgumentError("solve_sde: coefficient map missing");
  }
  const int n = m.steps();
  const double dt = m.dt();
  std::vector<std::vector<double>> layers(static_cast<std::size_t>(n) + 1);
  layers[0] = {x0};
  for (int k = 0; k < n; ++k) {
    const std::vector<double>& now = layers[static_cast<std::size_t>(k)];
    std::vector<double>& next = layers[static_cast<std::size_t>(k) + 1];
    next.resize(now.size() * LatticeModel::kBranching);
    for (std::size_t i = 0; i < now.size(); ++i) {
      const double x = now[i];
      const double b = spec.drift(x) * dt;
      const double h = spec.qv_drift(x);
      const double s = spec.diffusion(x);
      for (int c = 0; c < LatticeModel::kBranching; ++c) {
        const double v = x + b + h * m.qv_increment(c) + s * m.increment(c);
        const std::size_t child = i * LatticeModel::kBranching + static_cast<std::size_t>(c);
        if (!std::isfinite(v)) {
          std::ostringstream msg;
          msg << "solve_sde: non-finite state at depth " << k + 1 << ", node " << child
              << " (parent value " << x << ")";
          throw NumericError(msg.str());
        }
        next[child] = v;
      }
    }
  }
  return AdaptedProcess(std::move(layers));
}

RefinementStudy euler_refinement(const GeomParams& p, double var_lo, double var_hi,
                                 double horizon, std::span<const int> steps, double x0) {
  RefinementStudy study;
  const SDESpec spec = p.sde();
  for (int n : steps) {
    const LatticeModel m(n, horizon, var_lo, var_hi);
    const AdaptedProcess euler = solve_sde(m, spec, x0);
    const AdaptedProcess exact = geometric_gbm(m, p, x0);
    std::vector<double> err(LatticeModel::nodes_at(n));
    double worst = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
      err[i] = std::abs(euler.at(n, i) - exact.at(n, i));
      worst = std::max(worst, err[i]);
    }
    study.rows.push_back(RefinementRow{n, root_of(m, std::move(err)), worst});
  }
  for (std::size_t i = 1; i < study.rows.size(); ++i) {
    const RefinementRow& a = study.rows[i - 1];
    const RefinementRow& b = study.rows[i];
    const double doubling =
        std::log(2.0) / std::log(static_cast<double>(b.steps) / a.steps);
    study.ratios.push_back(std::pow(a.mean_error / b.mean_error, doubling));
  }
  return study;
}

StabilityReport sde_stability(const LatticeModel& m, const SDESpec& spec, double x0,
                              double x0_prime, int calibration_steps) {
  if (calibration_steps < 1 || calibration_steps > m.steps()) {
    throw ArgumentError("sde_stability: calibration lattice must be no finer than m");
  }
  const int n = m.steps();
  const AdaptedProcess a = solve_sde(m, spec, x0);
  const AdaptedProcess b = solve_sde(m, spec, x0_prime);
  std::vector<double> sq(LatticeModel::nodes_at(n));
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double d = a.at(n, i) - b.at(n, i);
    sq[i] = d * d;
  }
  const double k = spec.lipschitz;
  const double s2 = m.var_hi();
  const double dtc = m.horizon() / calibration_steps;
  const double c = 2.0 * k * (1.0 + s2) + k * k * (1.0 + s2) * (1.0 + s2) * dtc + k * k * s2;
  const double d0 = x0 - x0_prime;
  return StabilityReport{root_of(m, std::move(sq)), std::exp(c * m.horizon()) * d0 * d0, c};
}

PicardResult picard_bsde(const LatticeModel& m, const BSDESpec& spec, const AdaptedProcess& x,
                         double tol, int max_iter) {
  if (!(tol > 0.0)) throw ArgumentError("picard_bsde: tol must be > 0");
  if (max_iter < 1) throw ArgumentError("picard_bsde: max_iter must be >= 1");
  if (!spec.xi) throw ArgumentError("picard_bsde: terminal value missing");
  m.require_exact("picard_bsde");
  const int n = m.steps();
  if (x.depth() < n - 1) throw ContractError("picard_bsde: forward process too short");

  AdaptedProcess y = conditional_expectation(m, spec.xi);
  PicardResult result{y, 0, {}};
  if (!spec.f && !spec.g) {
    result.iterations = 1;
    result.deltas.push_back(0.0);
    return result;
  }

  const double dt = m.dt();
  const double lo = m.var_lo() * dt;
  const double hi = m.var_hi() * dt;
  std::vector<std::vector<double>> next(static_cast<std::size_t>(n) + 1);
  next[static_cast<std::size_t>(n)].assign(y.layer(n).begin(), y.layer(n).end());
  for (int iter = 1; iter <= max_iter; ++iter) {
    double delta = 0.0;
    for (int k = n - 1; k >= 0; --k) {
      const std::span<const double> child = next[static_cast<std::size_t>(k) + 1];
      const std::span<const double> xk = x.layer(k);
      const std::span<const double> yk = y.layer(k);
      std::vector<double>& out = next[static_cast<std::size_t>(k)];
      out.resize(xk.size());
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double* c = child.data() + LatticeModel::kBranching * i;
        const double fv = spec.f ? spec.f(xk[i], yk[i]) * dt : 0.0;
        const double gv = spec.g ? spec.g(xk[i], yk[i]) : 0.0;
        const double up = 0.5 * (c[3] + c[0]) + gv * hi;
        const double down = 0.5 * (c[2] + c[1]) + gv * lo;
        out[i] = fv + (up >= down ? up : down);
        delta = std::max(delta, std::abs(out[i] - yk[i]));
      }
    }
    if (!std::isfinite(delta)) {
      throw NumericError("picard_bsde: non-finite iterate at iteration " +
                         std::to_string(iter));
    }
    y = AdaptedProcess(next);
    result.deltas.push_back(delta);
    if (delta < tol) {
      result.y = std::move(y);
      result.iterations = iter;
      return result;
    }
  }
  std::ostringstream msg;
  msg << "picard_bsde: no convergence after " << max_iter << " iterations (last delta "
      << result.deltas.back() << ")";
  throw ConvergenceError(msg.str(), max_iter, result.deltas.back());
}

BSDEStability bsde_stability(const LatticeModel& m, const BSDESpec& spec,
                             const AdaptedProcess& x, const PathFunctional& xi_prime) {
  BSDESpec other = spec;
  other.xi = xi_prime;
  const double y0 = picard_bsde(m, spec, x).y.root();
  const double y0_prime = picard_bsde(m, other, x).y.root();
  const double k = spec.lipschitz_f + spec.lipschitz_g * m.var_hi();
  if (!(k * m.dt() < 1.0)) {
    throw ArgumentError("bsde_stability: Lipschitz constant too large for this step");
  }
  const double c = std::pow(1.0 - k * m.dt(), -m.steps());
  const double spread = lattice_expectation(
      m, [&](const LatticePath& p) { return std::abs(spec.xi(p) - xi_prime(p)); });
  return BSDEStability{std::abs(y0 - y0_prime), c * spread, c};
}

GridFunction feynman_kac_pde(const SDESpec& sde, const MarkovBSDE& bsde,
                             const UncertaintyParams& params, double horizon,
                             const SolverConfig& cfg) {
  cfg.validate();
  if (!params.mean_certain()) {
    throw ArgumentError("feynman_kac: mean uncertainty is not representable on the lattice");
  }
  ControlledGenerator gen;
  for (double s2 : {params.var_lo, params.var_hi}) {
    Control c;
    c.diffusion = [s2, d = sde.diffusion](double x) {
      const double v = d(x);
      return 0.5 * s2 * v * v;
    };
    c.drift = [s2, h = sde.qv_drift, b = sde.drift](double x) { return s2 * h(x) + b(x); };
    if (bsde.f || bsde.g) {
      c.source = [s2, f = bsde.f, g = bsde.g](double x, double u) {
        return (g ? s2 * g(x, u) : 0.0) + (f ? f(x, u) : 0.0);
      };
    }
    gen.controls.push_back(std::move(c));
    if (params.var_lo == params.var_hi) break;
  }
  gen.source_lipschitz = bsde.lipschitz_f + params.var_hi * bsde.lipschitz_g;

  std::vector<double> values(static_cast<std::size_t>(cfg.nx));
  GridFunction shape(0.0, cfg.half_width, values);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = bsde.terminal(shape.x(i));
  return solve_controlled(GridFunction(0.0, cfg.half_width, std::move(values)), gen, horizon,
                          cfg);
}

FeynmanKacReport feynman_kac_check(const SDESpec& sde, const MarkovBSDE& bsde,
                                   const LatticeModel& m, const SolverConfig& cfg,
                                   std::span<const double> xs) {
  const GridFunction pde = feynman_kac_pde(sde, bsde, m.params(), m.horizon(), cfg);
  FeynmanKacReport report;
  const int n = m.steps();
  for (double x0 : xs) {
    const AdaptedProcess forward = solve_sde(m, sde, x0);
    const TestFunction& phi = bsde.terminal;
    BSDESpec spec{[&](const LatticePath& p) { return phi(forward.along(p, n)); }, bsde.f,
                  bsde.g, bsde.lipschitz_f, bsde.lipschitz_g};
    const double lattice = picard_bsde(m, spec, forward).y.root();
    const double grid = pde.evaluate(x0);
    const double diff = std::abs(lattice - grid);
    report.rows.push_back(FeynmanKacRow{x0, lattice, grid, diff});
    report.residual = std::max(report.residual, diff);
  }
  return report;
}

void FeynmanKacReport::write_csv(std::ostream& out) const {
  out << "x,u_lattice,u_pde,abs_diff\n" << std::setprecision(17);
  for (const FeynmanKacRow& r : rows) {
    out << r.x << ',' << r.u_lattice << ',' << r.u_pde << ',' << r.abs_diff << '\n';
  }
}

}  // namespace gexp
