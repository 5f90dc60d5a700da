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

#include "gexpect/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <utility>

#include "gexpect/errors.hpp"

namespace gexp {

namespace {

constexpr double kEnvelopeTolerance = 1e-12;

void check_atom(const Atom& a) {
  if (a.values.empty() || a.values.size() != a.probs.size()) {
    throw ArgumentError("atom needs matching, non-empty values and probs");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (!(a.probs[i] >= 0.0) || !std::isfinite(a.values[i])) {
      throw ArgumentError("atom has a negative probability or non-finite value");
    }
    total += a.probs[i];
  }
  if (std::abs(total - 1.0) > kEnvelopeTolerance) {
    throw ArgumentError("atom probabilities do not sum to 1");
  }
}

UncertaintyParams infer_envelope(const std::vector<Atom>& atoms) {
  double mlo = std::numeric_limits<double>::infinity();
  double mhi = -mlo;
  double vlo = mlo;
  double vhi = -mlo;
  for (const auto& a : atoms) {
    mlo = std::min(mlo, a.mean());
    mhi = std::max(mhi, a.mean());
    vlo = std::min(vlo, a.variance());
    vhi = std::max(vhi, a.variance());
  }
  return UncertaintyParams(mlo, mhi, std::max(0.0, vlo), std::max(0.0, vhi));
}

}  // namespace

double Atom::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += probs[i] * values[i];
  return m;
}

double Atom::second_moment() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += probs[i] * values[i] * values[i];
  return m;
}

double Atom::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    v += probs[i] * (values[i] - m) * (values[i] - m);
  }
  return v;
}

Atom Atom::scaled(double factor) const {
  Atom out = *this;
  for (double& v : out.values) v *= factor;
  return out;
}

StepFamily::StepFamily(std::vector<Atom> atoms, UncertaintyParams envelope)
    : atoms_(std::move(atoms)), envelope_(envelope) {
  if (atoms_.empty()) throw ArgumentError("step family needs at least one atom");
  for (const auto& a : atoms_) check_atom(a);
  const UncertaintyParams actual = infer_envelope(atoms_);
  const auto off = [](double a, double b) {
    return std::abs(a - b) > kEnvelopeTolerance * std::max(1.0, std::abs(b));
  };
  if (off(actual.mu_lo, envelope_.mu_lo) || off(actual.mu_hi, envelope_.mu_hi)) {
    throw ArgumentError("atom means do not span the declared mean envelope");
  }
  if (off(actual.var_lo, envelope_.var_lo) || off(actual.var_hi, envelope_.var_hi)) {
    throw ArgumentError("atom variances do not span the declared variance envelope");
  }
}

StepFamily StepFamily::rademacher(double var_lo, double var_hi) {
  const auto env = UncertaintyParams::volatility(var_lo, var_hi);
  std::vector<Atom> atoms;
  for (double s : {env.sigma_lo(), env.sigma_hi()}) {
    atoms.push_back(Atom{{-s, s}, {0.5, 0.5}});
  }
  return StepFamily(std::move(atoms), env);
}

StepFamily StepFamily::dirac(double mu_lo, double mu_hi) {
  return StepFamily({Atom{{mu_lo}, {1.0}}, Atom{{mu_hi}, {1.0}}},
                    UncertaintyParams::mean(mu_lo, mu_hi));
}

StepFamily StepFamily::shifted_rademacher(double mu_lo, double mu_hi, double sigma) {
  std::vector<Atom> atoms;
  for (double mu : {mu_lo, mu_hi}) {
    atoms.push_back(Atom{{mu - sigma, mu + sigma}, {0.5, 0.5}});
  }
  return StepFamily::from_atoms(std::move(atoms));
}

StepFamily StepFamily::from_atoms(std::vector<Atom> atoms) {
  for (const auto& a : atoms) check_atom(a);
  if (atoms.empty()) throw ArgumentError("step family needs at least one atom");
  const UncertaintyParams env = infer_envelope(atoms);
  return StepFamily(std::move(atoms), env);
}

void StepFamily::require_centered() const {
  for (const auto& a : atoms_) {
    if (std::abs(a.mean()) > kEnvelopeTolerance) {
      throw ArgumentError("CLT step family needs mean-zero atoms");
    }
  }
}

StepFamily StepFamily::with_atom(Atom atom) const {
  std::vector<Atom> atoms = atoms_;
  atoms.push_back(std::move(atom));
  return StepFamily(std::move(atoms), envelope_);
}

StepFamily step_family_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("outcomes") || !doc.contains("measures")) {
    throw ArgumentError("step family document needs 'outcomes' and 'measures'");
  }
  for (const auto& [key, _] : doc.items()) {
    if (key != "outcomes" && key != "measures" && key != "variables") {
      throw ArgumentError("unknown key '" + key + "'");
    }
  }
  const auto support = doc.at("outcomes").get<std::vector<double>>();
  std::vector<Atom> atoms;
  for (const auto& m : doc.at("measures")) {
    auto probs = m.get<std::vector<double>>();
    if (probs.size() != support.size()) {
      throw ArgumentError("measure length does not match the number of outcomes");
    }
    atoms.push_back(Atom{support, std::move(probs)});
  }
  return StepFamily::from_atoms(std::move(atoms));
}

namespace {

struct Support {
  std::vector<double> values;  // distinct support points over all atoms
  // For each atom: (support index, probability).
  std::vector<std::vector<std::pair<std::size_t, double>>> atoms;
};

Support collect_support(std::span<const Atom> atoms) {
  Support s;
  for (const auto& a : atoms) {
    for (double v : a.values) {
      if (std::find(s.values.begin(), s.values.end(), v) == s.values.end()) {
        s.values.push_back(v);
      }
    }
  }
  std::sort(s.values.begin(), s.values.end());
  for (const auto& a : atoms) {
    std::vector<std::pair<std::size_t, double>> entries;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      const auto it = std::lower_bound(s.values.begin(), s.values.end(), a.values[i]);
      entries.emplace_back(static_cast<std::size_t>(it - s.values.begin()), a.probs[i]);
    }
    s.atoms.push_back(std::move(entries));
  }
  return s;
}

// One backward step given V_{k+1} at each (state, support point).
template <typename ChildValue>
double bellman(const Support& support, ChildValue&& child) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& atom : support.atoms) {
    double v = 0.0;
    for (const auto& [j, p] : atom) v += p * child(j);
    if (v > best) best = v;
  }
  return best;
}

// Returns false if the state budget is exceeded.
bool exact_dp(const Support& support, int steps,
              const std::function<double(double)>& terminal, std::size_t max_states,
              DPResult& out) {
  double reach = 0.0;
  for (double v : support.values) reach = std::max(reach, std::abs(v));
  const double tol = 1e-10 * (1.0 + reach * steps);

  std::vector<std::vector<double>> layers(static_cast<std::size_t>(steps) + 1);
  layers[0] = {0.0};
  std::size_t total = 1;
  for (int k = 0; k < steps; ++k) {
    const auto& cur = layers[static_cast<std::size_t>(k)];
    std::vector<double> next;
    next.reserve(cur.size() * support.values.size());
    for (double s : cur) {
      for (double x : support.values) next.push_back(s + x);
    }
    std::sort(next.begin(), next.end());
    std::vector<double> unique;
    unique.reserve(next.size());
    for (double v : next) {
      if (unique.empty() || v - unique.back() > tol) unique.push_back(v);
    }
    total += unique.size();
    if (total > max_states) return false;
    layers[static_cast<std::size_t>(k) + 1] = std::move(unique);
  }

  std::vector<double> values(layers.back().size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = terminal(layers.back()[i]);

  std::vector<std::vector<std::size_t>> child(support.values.size());
  for (int k = steps - 1; k >= 0; --k) {
    const auto& cur = layers[static_cast<std::size_t>(k)];
    const auto& nxt = layers[static_cast<std::size_t>(k) + 1];
    // States and children are both sorted, so a two-pointer walk suffices.
    for (std::size_t j = 0; j < support.values.size(); ++j) {
      auto& idx = child[j];
      idx.resize(cur.size());
      std::size_t p = 0;
      for (std::size_t i = 0; i < cur.size(); ++i) {
        const double target = cur[i] + support.values[j];
        while (p + 1 < nxt.size() && nxt[p] < target - tol) ++p;
        if (std::abs(nxt[p] - target) > tol) {
          throw NumericError("exact DP lost track of a reachable state");
        }
        idx[i] = p;
      }
    }
    std::vector<double> prev(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) {
      prev[i] = bellman(support, [&](std::size_t j) { return values[child[j][i]]; });
    }
    values = std::move(prev);
  }
  out = DPResult{values[0], DPMode::kExact, total};
  return true;
}

DPResult grid_dp(std::span<const Atom> atoms, const Support& support, int steps,
                 const std::function<double(double)>& terminal, const DPConfig& cfg) {
  if (cfg.ns < 201) throw ConfigError("DP grid needs ns >= 201");
  double reach = 0.0;
  double var_max = 0.0;
  double mean_lo = 0.0;
  double mean_hi = 0.0;
  bool first = true;
  for (double v : support.values) reach = std::max(reach, std::abs(v));
  for (const auto& a : atoms) {
    var_max = std::max(var_max, a.variance());
    mean_lo = first ? a.mean() : std::min(mean_lo, a.mean());
    mean_hi = first ? a.mean() : std::max(mean_hi, a.mean());
    first = false;
  }
  reach *= steps;
  const double sd = std::sqrt(var_max * steps);
  const double drift_lo = mean_lo * steps;
  const double drift_hi = mean_hi * steps;

  double center = cfg.center;
  double half_width = cfg.half_width;
  if (half_width <= 0.0) {
    const double lo = std::max(-reach, drift_lo - 8.0 * sd);
    const double hi = std::min(reach, drift_hi + 8.0 * sd);
    center = 0.5 * (lo + hi);
    half_width = std::max(0.5 * (hi - lo), 1e-12);
  } else {
    const double need_lo = std::max(-reach, drift_lo - 4.0 * sd);
    const double need_hi = std::min(reach, drift_hi + 4.0 * sd);
    if (need_lo < center - half_width || need_hi > center + half_width) {
      throw ConfigError(
          "grid overflow: state range escapes [center - S, center + S]; "
          "increase half_width");
    }
  }

  const auto ns = static_cast<std::size_t>(cfg.ns);
  const double h = 2.0 * half_width / static_cast<double>(ns - 1);
  const double mid = 0.5 * static_cast<double>(ns - 1);
  std::vector<double> values(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    values[i] = terminal(center + (static_cast<double>(i) - mid) * h);
  }

  struct Shift {
    long long whole;
    double frac;
  };
  std::vector<Shift> shifts;
  for (double x : support.values) {
    const double pos = x / h;
    const double fl = std::floor(pos);
    shifts.push_back({static_cast<long long>(fl), pos - fl});
  }
  const auto last = static_cast<long long>(ns) - 1;
  auto at = [&](long long j) {
    return values[static_cast<std::size_t>(std::clamp(j, 0LL, last))];
  };

  std::vector<double> prev(ns);
  std::vector<double> child_vals(support.values.size());
  for (int k = steps - 1; k >= 0; --k) {
    for (std::size_t i = 0; i < ns; ++i) {
      for (std::size_t j = 0; j < shifts.size(); ++j) {
        const long long base = static_cast<long long>(i) + shifts[j].whole;
        const double w = shifts[j].frac;
        child_vals[j] = w == 0.0 ? at(base) : (1.0 - w) * at(base) + w * at(base + 1);
      }
      prev[i] = bellman(support, [&](std::size_t j) { return child_vals[j]; });
    }
    std::swap(values, prev);
  }
  // Initial state 0 interpolated on the grid.
  const double pos = (0.0 - center) / h + mid;
  const double fl = std::floor(pos);
  const double w = pos - fl;
  const auto base = static_cast<long long>(fl);
  const double v0 = w < 1e-12 ? at(base) : (1.0 - w) * at(base) + w * at(base + 1);
  return DPResult{v0, DPMode::kGrid, ns};
}

}  // namespace

DPResult sublinear_dp(std::span<const Atom> atoms, int steps,
                      const std::function<double(double)>& terminal,
                      const DPConfig& cfg) {
  if (steps < 1) throw ArgumentError("DP needs at least one step");
  if (atoms.empty()) throw ArgumentError("DP needs at least one atom");
  const Support support = collect_support(atoms);
  if (cfg.mode != DPMode::kGrid) {
    DPResult result{};
    if (exact_dp(support, steps, terminal, cfg.max_states, result)) return result;
    if (cfg.mode == DPMode::kExact) {
      throw CapacityError("exact DP exceeds " + std::to_string(cfg.max_states) +
                          " states; use grid mode");
    }
  }
  return grid_dp(atoms, support, steps, terminal, cfg);
}

double lln_value(const StepFamily& fam, const TestFunction& phi, int n,
                 const DPConfig& cfg) {
  if (n < 1) throw ArgumentError("lln_value needs n >= 1");
  std::vector<Atom> atoms;
  for (const auto& a : fam.atoms()) atoms.push_back(a.scaled(1.0 / n));
  return sublinear_dp(atoms, n, phi, cfg).value;
}

double clt_value(const StepFamily& fam, const TestFunction& phi, int n,
                 const DPConfig& cfg) {
  if (n < 1) throw ArgumentError("clt_value needs n >= 1");
  fam.require_centered();
  std::vector<Atom> atoms;
  for (const auto& a : fam.atoms()) atoms.push_back(a.scaled(1.0 / std::sqrt(n)));
  return sublinear_dp(atoms, n, phi, cfg).value;
}

double clt_lln_value(const StepFamily& fam_x, const StepFamily& fam_y,
                     const TestFunction& phi, int n, const DPConfig& cfg) {
  if (n < 1) throw ArgumentError("clt_lln_value needs n >= 1");
  fam_x.require_centered();
  const double sx = 1.0 / std::sqrt(n);
  const double sy = 1.0 / n;
  std::vector<Atom> joint;
  for (const auto& ax : fam_x.atoms()) {
    for (const auto& ay : fam_y.atoms()) {
      Atom a;
      for (std::size_t i = 0; i < ax.values.size(); ++i) {
        for (std::size_t j = 0; j < ay.values.size(); ++j) {
          a.values.push_back(ax.values[i] * sx + ay.values[j] * sy);
          a.probs.push_back(ax.probs[i] * ay.probs[j]);
        }
      }
      joint.push_back(std::move(a));
    }
  }
  return sublinear_dp(joint, n, phi, cfg).value;
}

void ConvergenceReport::write_csv(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << "n,value,abs_error\n";
  for (const auto& r : rows) out << r.n << "," << r.value << "," << r.abs_error << "\n";
  out.precision(old_precision);
}

ConvergenceReport convergence_report(const StepFamily& fam, const TestFunction& phi,
                                     std::span<const int> ns, double reference,
                                     Law law, const DPConfig& cfg) {
  ConvergenceReport report;
  for (int n : ns) {
    const double v =
        law == Law::kClt ? clt_value(fam, phi, n, cfg) : lln_value(fam, phi, n, cfg);
    report.rows.push_back({n, v, std::abs(v - reference)});
  }
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].abs_error > 1.1 * report.rows[i - 1].abs_error + 1e-12) {
      report.monotone = false;
    }
  }
  return report;
}

}  // namespace gexp
