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

#include "gexpect/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "gexpect/errors.hpp"

namespace gexp {

namespace {

// Depth-first walk over every prefix of length 0..depth.
template <typename Visit>
void walk(LatticePath& path, int depth, Visit&& visit) {
  visit(static_cast<const LatticePath&>(path));
  if (path.length() == depth) return;
  for (int c = 0; c < LatticeModel::kBranching; ++c) {
    path.push(c);
    walk(path, depth, visit);
    path.pop();
  }
}

void require_process(const LatticeModel& m, const AdaptedProcess& p, int depth,
                     const char* what) {
  if (p.depth() < depth) {
    std::ostringstream msg;
    msg << what << ": process has depth " << p.depth() << ", need " << depth
        << " for a " << m.steps() << "-step lattice";
    throw ContractError(msg.str());
  }
}

}  // namespace

LatticeModel::LatticeModel(int steps, double horizon, double var_lo, double var_hi)
    : steps_(steps), horizon_(horizon), var_lo_(var_lo), var_hi_(var_hi) {
  if (steps < 1) throw ArgumentError("lattice: steps must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ArgumentError("lattice: horizon must be positive");
  }
  if (!(var_lo >= 0.0) || !(var_hi >= var_lo) || !(var_hi > 0.0) || !std::isfinite(var_hi)) {
    throw ArgumentError("lattice: need 0 <= var_lo <= var_hi, var_hi > 0");
  }
  dt_ = horizon / steps;
  sigma_lo_ = std::sqrt(var_lo);
  sigma_hi_ = std::sqrt(var_hi);
  const double lo = std::sqrt(var_lo * dt_);
  const double hi = std::sqrt(var_hi * dt_);
  increments_ = {-hi, -lo, lo, hi};
  qv_increments_ = {var_hi * dt_, var_lo * dt_, var_lo * dt_, var_hi * dt_};
}

void LatticeModel::require_exact(const std::string& op) const {
  if (steps_ > kExactMaxSteps) {
    std::ostringstream msg;
    msg << op << ": " << steps_ << " steps exceeds the exact-mode cap of " << kExactMaxSteps
        << "; use markov_expectation for terminal functionals of B_T";
    throw CapacityError(msg.str());
  }
}

double LatticeModel::g(double a) const {
  return 0.5 * (a >= 0.0 ? var_hi_ * a : var_lo_ * a);
}

LatticePath::LatticePath(const LatticeModel& model)
    : model_(&model),
      digits_(static_cast<std::size_t>(model.steps())),
      b_(static_cast<std::size_t>(model.steps()) + 1, 0.0),
      qv_(static_cast<std::size_t>(model.steps()) + 1, 0.0),
      nodes_(static_cast<std::size_t>(model.steps()) + 1, 0) {}

void LatticePath::push(int digit) {
  const auto k = static_cast<std::size_t>(length_);
  digits_[k] = digit;
  b_[k + 1] = b_[k] + model_->increment(digit);
  qv_[k + 1] = qv_[k] + model_->qv_increment(digit);
  nodes_[k + 1] = nodes_[k] * LatticeModel::kBranching + static_cast<std::size_t>(digit);
  ++length_;
}

void LatticePath::pop() { --length_; }

AdaptedProcess::AdaptedProcess(std::vector<std::vector<double>> layers)
    : layers_(std::move(layers)) {
  if (layers_.empty()) throw ContractError("adapted process: no layers");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    if (layers_[k].size() != LatticeModel::nodes_at(static_cast<int>(k))) {
      std::ostringstream msg;
      msg << "adapted process: layer " << k << " has " << layers_[k].size()
          << " values, expected " << LatticeModel::nodes_at(static_cast<int>(k));
      throw ContractError(msg.str());
    }
  }
}

AdaptedProcess AdaptedProcess::generate(const LatticeModel& m, int last_depth,
                                        const std::function<double(const LatticePath&)>& f) {
  if (last_depth < 0 || last_depth > m.steps()) {
    throw ArgumentError("adapted process: depth outside [0, N]");
  }
  m.require_exact("adapted process");
  std::vector<std::vector<double>> layers(static_cast<std::size_t>(last_depth) + 1);
  for (int k = 0; k <= last_depth; ++k) {
    layers[static_cast<std::size_t>(k)].resize(LatticeModel::nodes_at(k));
  }
  LatticePath path(m);
  walk(path, last_depth, [&](const LatticePath& p) {
    const int k = p.length();
    layers[static_cast<std::size_t>(k)][p.node(k)] = f(p);
  });
  return AdaptedProcess(std::move(layers));
}

AdaptedProcess AdaptedProcess::from_paths(
    const LatticeModel& m, int last_depth,
    const std::function<double(const LatticePath&, int)>& f) {
  if (last_depth < 0 || last_depth > m.steps()) {
    throw ArgumentError("adapted process: depth outside [0, N]");
  }
  m.require_exact("adapted process");
  std::vector<std::vector<double>> layers(static_cast<std::size_t>(last_depth) + 1);
  std::vector<std::vector<char>> seen(layers.size());
  for (int k = 0; k <= last_depth; ++k) {
    layers[static_cast<std::size_t>(k)].resize(LatticeModel::nodes_at(k));
    seen[static_cast<std::size_t>(k)].assign(LatticeModel::nodes_at(k), 0);
  }
  for_each_path(m, [&](const LatticePath& p) {
    for (int k = 0; k <= last_depth; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const std::size_t node = p.node(k);
      const double v = f(p, k);
      if (!seen[kk][node]) {
        seen[kk][node] = 1;
        layers[kk][node] = v;
      } else if (!(v == layers[kk][node]) &&
                 !(std::isnan(v) && std::isnan(layers[kk][node]))) {
        std::ostringstream msg;
        msg << "adapted process: value at time " << k << " (node " << node
            << ") depends on later increments";
        throw ContractError(msg.str());
      }
    }
  });
  return AdaptedProcess(std::move(layers));
}

AdaptedProcess AdaptedProcess::constant(const LatticeModel& m, int last_depth, double c) {
  m.require_exact("adapted process");
  std::vector<std::vector<double>> layers;
  for (int k = 0; k <= last_depth; ++k) layers.emplace_back(LatticeModel::nodes_at(k), c);
  return AdaptedProcess(std::move(layers));
}

void for_each_path(const LatticeModel& m, const std::function<void(const LatticePath&)>& visit) {
  m.require_exact("path enumeration");
  LatticePath path(m);
  const int n = m.steps();
  walk(path, n, [&](const LatticePath& p) {
    if (p.length() == n) visit(p);
  });
}

std::vector<double> tabulate(const LatticeModel& m, const PathFunctional& x) {
  m.require_exact("tabulate");
  std::vector<double> leaves(LatticeModel::nodes_at(m.steps()));
  const int n = m.steps();
  for_each_path(m, [&](const LatticePath& p) { leaves[p.node(n)] = x(p); });
  return leaves;
}

std::vector<double> one_step_expectation(std::span<const double> children) {
  if (children.size() % LatticeModel::kBranching != 0) {
    throw ArgumentError("one-step expectation: child count not a multiple of 4");
  }
  std::vector<double> parents(children.size() / LatticeModel::kBranching);
  for (std::size_t i = 0; i < parents.size(); ++i) {
    const double* c = children.data() + LatticeModel::kBranching * i;
    const double hi = 0.5 * (c[3] + c[0]);
    const double lo = 0.5 * (c[2] + c[1]);
    parents[i] = hi >= lo ? hi : lo;  // ties go to sig_hi
  }
  return parents;
}

AdaptedProcess backward_induction(const LatticeModel& m, std::vector<double> leaves) {
  m.require_exact("backward induction");
  const int n = m.steps();
  if (leaves.size() != LatticeModel::nodes_at(n)) {
    throw ArgumentError("backward induction: leaf count does not match 4^N");
  }
  std::vector<std::vector<double>> layers(static_cast<std::size_t>(n) + 1);
  layers[static_cast<std::size_t>(n)] = std::move(leaves);
  for (int k = n - 1; k >= 0; --k) {
    layers[static_cast<std::size_t>(k)] =
        one_step_expectation(layers[static_cast<std::size_t>(k) + 1]);
  }
  return AdaptedProcess(std::move(layers));
}

AdaptedProcess conditional_expectation(const LatticeModel& m, const PathFunctional& x) {
  m.require_exact("conditional expectation");
  return backward_induction(m, tabulate(m, x));
}

std::vector<double> conditional_expectation(const LatticeModel& m, const PathFunctional& x,
                                            int k) {
  if (k < 0 || k > m.steps()) throw ArgumentError("conditional expectation: k outside [0, N]");
  m.require_exact("conditional expectation");
  std::vector<double> v = tabulate(m, x);
  for (int d = m.steps(); d > k; --d) v = one_step_expectation(v);
  return v;
}

double lattice_expectation(const LatticeModel& m, const PathFunctional& x) {
  return conditional_expectation(m, x, 0).front();
}

double markov_expectation(const LatticeModel& m, const std::function<double(double)>& terminal,
                          const DPConfig& cfg) {
  const double dt = m.dt();
  std::vector<Atom> atoms;
  for (double var : {m.var_lo(), m.var_hi()}) {
    const double s = std::sqrt(var * dt);
    if (s == 0.0) {
      atoms.push_back(Atom{{0.0}, {1.0}});
    } else {
      atoms.push_back(Atom{{-s, s}, {0.5, 0.5}});
    }
  }
  return sublinear_dp(atoms, m.steps(), terminal, cfg).value;
}

PathFunctional ito_integral(const LatticeModel& m, const AdaptedProcess& eta) {
  m.require_exact("ito integral");
  require_process(m, eta, m.steps() - 1, "ito integral");
  auto shared = std::make_shared<const AdaptedProcess>(eta);
  const int n = m.steps();
  return [shared, n](const LatticePath& p) {
    if (p.length() != n) throw ContractError("ito integral: path is not complete");
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += shared->along(p, k) * p.dB(k);
    return sum;
  };
}

QuadraticVariation quadratic_variation(const LatticeModel& m) {
  m.require_exact("quadratic variation");
  double residual = 0.0;
  bool within = true;
  // Envelopes accumulated exactly like <B>: rounding is monotone, so
  // increments inside [lo, hi] give partial sums inside the envelopes.
  std::vector<double> lower(static_cast<std::size_t>(m.steps()) + 1, 0.0);
  std::vector<double> upper(lower.size(), 0.0);
  for (int k = 0; k < m.steps(); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    lower[kk + 1] = lower[kk] + m.qv_increment(1);
    upper[kk + 1] = upper[kk] + m.qv_increment(0);
  }
  AdaptedProcess qv = AdaptedProcess::generate(m, m.steps(), [&](const LatticePath& p) {
    const int k = p.length();
    double integral = 0.0;
    for (int j = 0; j < k; ++j) integral += p.B(j) * p.dB(j);
    const double q = p.qv(k);
    residual = std::max(residual, std::abs(p.B(k) * p.B(k) - 2.0 * integral - q));
    const auto kk = static_cast<std::size_t>(k);
    if (q < lower[kk] || q > upper[kk]) within = false;
    return q;
  });
  return QuadraticVariation{std::move(qv), residual, within};
}

double qv_expectation(const LatticeModel& m, const std::function<double(double)>& phi) {
  const int n = m.steps();
  return lattice_expectation(m, [&](const LatticePath& p) { return phi(p.qv(n)); });
}

QVMoment qv_moment(const LatticeModel& m, int n) {
  if (n < 1) throw ArgumentError("qv moment: n must be >= 1");
  m.require_exact("qv moment");
  const double upper = qv_expectation(m, [n](double q) { return std::pow(q, n); });
  const double lower = -qv_expectation(m, [n](double q) { return -std::pow(q, n); });
  const double second = qv_expectation(m, [](double q) { return q * q; });
  const double t = m.horizon();
  return QVMoment{upper, lower, second, 10.0 * m.var_hi() * m.var_hi() * t * t};
}

double martingale_residual(const LatticeModel& m, const AdaptedProcess& phi,
                           const AdaptedProcess& eta, bool with_drift) {
  m.require_exact("martingale residual");
  const int n = m.steps();
  require_process(m, phi, n - 1, "martingale residual (phi)");
  require_process(m, eta, n - 1, "martingale residual (eta)");
  const double dt = m.dt();
  AdaptedProcess martingale = AdaptedProcess::generate(m, n, [&](const LatticePath& p) {
    double value = 0.0;
    for (int j = 0; j < p.length(); ++j) {
      const double e = eta.along(p, j);
      value += phi.along(p, j) * p.dB(j) + e * p.dqv(j);
      if (with_drift) value -= 2.0 * m.g(e) * dt;
    }
    return value;
  });
  double residual = 0.0;
  for (int k = 0; k < n; ++k) {
    const std::vector<double> cond = one_step_expectation(martingale.layer(k + 1));
    const std::span<const double> now = martingale.layer(k);
    for (std::size_t i = 0; i < cond.size(); ++i) {
      residual = std::max(residual, std::abs(cond[i] - now[i]));
    }
  }
  return residual;
}

IsometryResult isometry_check(const LatticeModel& m, const AdaptedProcess& eta) {
  m.require_exact("isometry");
  const PathFunctional integral = ito_integral(m, eta);
  const int n = m.steps();
  const double lhs = lattice_expectation(m, [&](const LatticePath& p) {
    const double v = integral(p);
    return v * v;
  });
  const double rhs = lattice_expectation(m, [&](const LatticePath& p) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      const double e = eta.along(p, k);
      sum += e * e * p.dqv(k);
    }
    return sum;
  });
  return IsometryResult{lhs, rhs};
}

JensenReport jensen_check(const LatticeModel& m, const TestFunction& h,
                          const std::vector<TestFunction>& probes, double tolerance) {
  JensenReport report;
  DPConfig cfg;
  cfg.mode = DPMode::kAuto;
  for (const TestFunction& phi : probes) {
    const double lhs = markov_expectation(m, [&](double x) { return h(phi(x)); }, cfg);
    const double rhs = h(markov_expectation(m, [&](double x) { return phi(x); }, cfg));
    const bool holds = lhs >= rhs - tolerance;
    report.inequality_holds = report.inequality_holds && holds;
    report.rows.push_back(JensenRow{h.name() + "(" + phi.name() + ")", lhs, rhs, holds});
  }

  // G(h'(y) a + h''(y) z^2) - h'(y) G(a) over a (y, z, a) lattice; the
  // derivatives are central differences.
  constexpr double kStep = 1e-4;
  double worst = std::numeric_limits<double>::infinity();
  for (int iy = -8; iy <= 8; ++iy) {
    const double y = 0.25 * iy + 0.01;  // keeps y off kinks at the integers
    const double hp = (h(y + kStep) - h(y - kStep)) / (2.0 * kStep);
    const double hpp = (h(y + kStep) - 2.0 * h(y) + h(y - kStep)) / (kStep * kStep);
    for (int iz = -2; iz <= 2; ++iz) {
      const double z = 0.5 * iz;
      for (int ia = -4; ia <= 4; ++ia) {
        const double a = 0.5 * ia;
        const double value = m.g(hp * a + hpp * z * z) - hp * m.g(a);
        const double scale = std::max({1.0, std::abs(hp * a), std::abs(hpp * z * z)});
        worst = std::min(worst, value / scale);
      }
    }
  }
  report.worst_pointwise = worst;
  // Finite differences cost about sqrt(eps) / kStep^2 relative accuracy.
  report.pointwise_condition = worst >= -1e-6;
  report.consistent =
      m.var_lo() > 0.0 ? report.pointwise_condition == report.inequality_holds : true;
  return report;
}

double gbm_characterization_residual(const LatticeModel& m,
                                     const std::vector<TestFunction>& probes) {
  m.require_exact("characterization");
  const int n = m.steps();
  const int s = n / 2;
  if (s == 0 || s == n) throw ArgumentError("characterization: need N >= 2");
  const LatticeModel rest(n - s, m.time(n) - m.time(s), m.var_lo(), m.var_hi());
  double residual = 0.0;
  for (const TestFunction& phi : probes) {
    const double reference = lattice_expectation(
        rest, [&](const LatticePath& p) { return phi(p.B(rest.steps())); });
    const std::vector<double> cond = conditional_expectation(
        m, [&](const LatticePath& p) { return phi(p.B(n) - p.B(s)); }, s);
    for (double v : cond) residual = std::max(residual, std::abs(v - reference));
  }
  return residual;
}

double gbm_characterization_residual(const LatticeModel& m) {
  const std::vector<TestFunction> probes = {
      functions::identity(),
      functions::abs(),
      functions::call(0.2),
      TestFunction("sin", [](double x) { return std::sin(x); }, 1.0),
      TestFunction("clip", [](double x) { return std::clamp(x, -0.5, 0.5); }, 1.0),
  };
  return gbm_characterization_residual(m, probes);
}

}  // namespace gexp
