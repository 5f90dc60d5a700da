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

#include "gexpect/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "gexpect/errors.hpp"

namespace gexp {

namespace {

constexpr double kProbabilityTolerance = 1e-12;

double dot(std::span<const double> p, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * v[i];
  return acc;
}

Expectation max_linear(const ScenarioSet& set, std::span<const double> values) {
  Expectation best{dot(set.measure(0), values), 0};
  for (std::size_t k = 1; k < set.num_measures(); ++k) {
    const double v = dot(set.measure(k), values);
    if (v > best.value) best = {v, k};
  }
  return best;
}

}  // namespace

ScenarioSet::ScenarioSet(std::vector<std::string> outcomes,
                         std::vector<std::vector<double>> measures)
    : outcomes_(std::move(outcomes)), measures_(std::move(measures)) {
  if (outcomes_.empty()) throw ArgumentError("scenario set has no outcomes");
  if (measures_.empty()) throw ArgumentError("scenario set has no measures");
  std::set<std::string> seen;
  for (const auto& o : outcomes_) {
    if (!seen.insert(o).second) {
      throw ArgumentError("duplicate outcome label '" + o + "'");
    }
  }
  for (std::size_t k = 0; k < measures_.size(); ++k) {
    const auto& p = measures_[k];
    if (p.size() != outcomes_.size()) {
      throw ArgumentError("measure " + std::to_string(k) + " has " +
                          std::to_string(p.size()) + " weights for " +
                          std::to_string(outcomes_.size()) + " outcomes");
    }
    double total = 0.0;
    for (double w : p) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw ArgumentError("measure " + std::to_string(k) +
                            " has a negative or non-finite weight");
      }
      total += w;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "measure " << k << " sums to " << total << ", not 1";
      throw ArgumentError(msg.str());
    }
  }
}

std::size_t ScenarioSet::index_of(std::string_view label) const {
  const auto it = std::find(outcomes_.begin(), outcomes_.end(), label);
  if (it == outcomes_.end()) {
    throw DomainError("outcome '" + std::string(label) + "' not in scenario set");
  }
  return static_cast<std::size_t>(it - outcomes_.begin());
}

RandomVariable::RandomVariable(std::vector<std::string> outcomes,
                               std::size_t dim, std::vector<double> values)
    : outcomes_(std::move(outcomes)), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw ArgumentError("random variable dimension must be >= 1");
  if (values_.size() != outcomes_.size() * dim_) {
    throw ArgumentError("random variable has " + std::to_string(values_.size()) +
                        " entries, expected " +
                        std::to_string(outcomes_.size() * dim_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ArgumentError("random variable has a non-finite entry");
  }
}

RandomVariable RandomVariable::scalar(const ScenarioSet& set,
                                      std::vector<double> values) {
  return RandomVariable(set.outcomes(), 1, std::move(values));
}

RandomVariable RandomVariable::constant(const ScenarioSet& set, double c) {
  return scalar(set, std::vector<double>(set.size(), c));
}

std::vector<double> RandomVariable::aligned(const ScenarioSet& set) const {
  if (dim_ != 1) {
    throw ArgumentError("expected a scalar random variable, got dimension " +
                        std::to_string(dim_));
  }
  if (outcomes_.size() != set.size()) {
    throw DomainError("random variable is defined on " +
                      std::to_string(outcomes_.size()) + " outcomes, set has " +
                      std::to_string(set.size()));
  }
  if (outcomes_ == set.outcomes()) return values_;
  std::vector<double> out(set.size());
  std::vector<bool> filled(set.size(), false);
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    const std::size_t j = set.index_of(outcomes_[i]);
    out[j] = values_[i];
    filled[j] = true;
  }
  if (std::find(filled.begin(), filled.end(), false) != filled.end()) {
    throw DomainError("random variable does not cover every outcome");
  }
  return out;
}

RandomVariable RandomVariable::map(const std::function<double(double)>& f) const {
  if (dim_ != 1) throw ArgumentError("map() needs a scalar random variable");
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), f);
  return RandomVariable(outcomes_, 1, std::move(out));
}

RandomVariable operator+(const RandomVariable& x, const RandomVariable& y) {
  if (x.outcomes() != y.outcomes() || x.dim() != y.dim()) {
    throw DomainError("sum of random variables on different outcome spaces");
  }
  std::vector<double> out(x.values().begin(), x.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y.values()[i];
  return RandomVariable(x.outcomes(), x.dim(), std::move(out));
}

RandomVariable operator*(double lambda, const RandomVariable& x) {
  std::vector<double> out(x.values().begin(), x.values().end());
  for (double& v : out) v *= lambda;
  return RandomVariable(x.outcomes(), x.dim(), std::move(out));
}

RandomVariable operator+(const RandomVariable& x, double c) {
  std::vector<double> out(x.values().begin(), x.values().end());
  for (double& v : out) v += c;
  return RandomVariable(x.outcomes(), x.dim(), std::move(out));
}

RandomVariable operator-(const RandomVariable& x) { return -1.0 * x; }

Expectation upper_expectation(const ScenarioSet& set, const RandomVariable& x) {
  const std::vector<double> values = x.aligned(set);
  return max_linear(set, values);
}

double risk_measure(const ScenarioSet& set, const RandomVariable& x) {
  return upper_expectation(set, -x).value;
}

double lp_norm(const ScenarioSet& set, const RandomVariable& x, double p) {
  if (!(p >= 1.0)) throw ArgumentError("lp_norm needs p >= 1");
  const RandomVariable powered =
      x.map([p](double v) { return std::pow(std::abs(v), p); });
  return std::pow(upper_expectation(set, powered).value, 1.0 / p);
}

double product_expectation(const ScenarioSet& first, const ScenarioSet& second,
                           const TestFunction& psi, const RandomVariable& x,
                           const RandomVariable& y) {
  if (psi.arity() != x.dim() + y.dim()) {
    throw ArgumentError("psi has arity " + std::to_string(psi.arity()) +
                        ", variables have dimensions " + std::to_string(x.dim()) +
                        " + " + std::to_string(y.dim()));
  }
  if (first.size() * second.size() > kMaxProductSize ||
      first.num_measures() * second.num_measures() > kMaxProductSize) {
    throw CapacityError("product space exceeds the enumeration guard of " +
                        std::to_string(kMaxProductSize));
  }
  if (x.size() != first.size() || y.size() != second.size()) {
    throw DomainError("variables are not defined on their scenario sets");
  }
  // Row i of x / y is aligned to the set's outcome order.
  std::vector<std::size_t> xi(first.size()), yi(second.size());
  for (std::size_t i = 0; i < x.size(); ++i) xi[first.index_of(x.outcomes()[i])] = i;
  for (std::size_t j = 0; j < y.size(); ++j) yi[second.index_of(y.outcomes()[j])] = j;

  std::vector<double> args(psi.arity());
  std::vector<double> inner(second.size());
  std::vector<double> outer(first.size());
  for (std::size_t a = 0; a < first.size(); ++a) {
    const auto xv = x.at(xi[a]);
    std::copy(xv.begin(), xv.end(), args.begin());
    for (std::size_t b = 0; b < second.size(); ++b) {
      const auto yv = y.at(yi[b]);
      std::copy(yv.begin(), yv.end(), args.begin() + static_cast<std::ptrdiff_t>(x.dim()));
      inner[b] = psi(args);
    }
    outer[a] = max_linear(second, inner).value;
  }
  return max_linear(first, outer).value;
}

bool AxiomReport::all_passed() const {
  return std::all_of(results.begin(), results.end(),
                     [](const AxiomResult& r) { return r.passed; });
}

double AxiomReport::worst_violation() const {
  double worst = 0.0;
  for (const auto& r : results) worst = std::max(worst, r.worst_violation);
  return worst;
}

const AxiomResult& AxiomReport::find(std::string_view name) const {
  for (const auto& r : results) {
    if (r.name == name) return r;
  }
  throw ArgumentError("no axiom named '" + std::string(name) + "'");
}

namespace {

class AxiomTally {
 public:
  AxiomTally(std::string name, double tolerance)
      : result_{std::move(name), true, 0.0, 0}, tolerance_(tolerance) {}

  // `excess` > 0 means the inequality is violated by that much; it is
  // compared against tolerance * max(1, scale).
  void record(double excess, double scale) {
    const double relative = std::max(0.0, excess) / std::max(1.0, std::abs(scale));
    result_.worst_violation = std::max(result_.worst_violation, relative);
    if (relative > tolerance_) result_.passed = false;
    ++result_.checks;
  }

  AxiomResult result() const { return result_; }

 private:
  AxiomResult result_;
  double tolerance_;
};

}  // namespace

AxiomReport check_axioms(const ScenarioSet& set,
                         const std::vector<RandomVariable>& raw_probes,
                         double tolerance) {
  if (raw_probes.empty()) throw ArgumentError("check_axioms needs at least one probe");
  std::vector<RandomVariable> probes;
  probes.reserve(raw_probes.size());
  for (const auto& p : raw_probes) {
    probes.push_back(RandomVariable::scalar(set, p.aligned(set)));
  }
  constexpr double kLambdas[] = {0.0, 0.5, 1.0, 2.0};
  constexpr double kShifts[] = {-1.0, 0.0, 3.0};
  constexpr double kAlphas[] = {-2.0, 1.0};

  auto E = [&set](const RandomVariable& v) { return upper_expectation(set, v).value; };
  auto norm2 = [&set](const RandomVariable& v) { return lp_norm(set, v, 2.0); };

  AxiomTally monotone("monotonicity", tolerance);
  AxiomTally constant("constant_preserving", tolerance);
  AxiomTally subadd("sub_additivity", tolerance);
  AxiomTally homog("positive_homogeneity", tolerance);
  AxiomTally cash("cash_translation", tolerance);
  AxiomTally holder("hoelder", tolerance);
  AxiomTally minkowski("minkowski", tolerance);
  AxiomTally certain("mean_certain_additivity", tolerance);

  for (double c : kShifts) {
    const double ec = E(RandomVariable::constant(set, c));
    constant.record(std::abs(ec - c), c);
  }

  for (const auto& x : probes) {
    const double ex = E(x);
    for (double lambda : kLambdas) {
      const double lhs = E(lambda * x);
      homog.record(std::abs(lhs - lambda * ex), lambda * ex);
    }
    for (double c : kShifts) {
      cash.record(std::abs(E(x + c) - ex - c), std::abs(ex) + std::abs(c));
    }
    for (const auto& y : probes) {
      const double ey = E(y);
      std::vector<double> hi(x.size());
      std::vector<double> prod(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        hi[i] = std::max(x.values()[i], y.values()[i]);
        prod[i] = std::abs(x.values()[i] * y.values()[i]);
      }
      const RandomVariable upper(x.outcomes(), 1, hi);
      // X <= max(X, Y) and Y <= max(X, Y) pointwise.
      const double eu = E(upper);
      monotone.record(ex - eu, eu);
      monotone.record(ey - eu, eu);

      const double exy = E(x + y);
      subadd.record(exy - ex - ey, std::abs(ex) + std::abs(ey));

      const double nx = norm2(x);
      const double ny = norm2(y);
      const double eprod = E(RandomVariable(x.outcomes(), 1, prod));
      holder.record(eprod - nx * ny, nx * ny);
      minkowski.record(norm2(x + y) - nx - ny, nx + ny);

      // Y has no mean uncertainty: E[Y] = -E[-Y].
      const double neg_y = E(-y);
      if (std::abs(ey + neg_y) <= tolerance * std::max(1.0, std::abs(ey))) {
        for (double alpha : kAlphas) {
          const double lhs = E(x + alpha * y);
          certain.record(std::abs(lhs - ex - alpha * ey),
                         std::abs(ex) + std::abs(alpha * ey));
        }
      }
    }
  }

  AxiomReport report;
  for (const auto* t : {&monotone, &constant, &subadd, &homog, &cash, &holder,
                        &minkowski, &certain}) {
    report.results.push_back(t->result());
  }
  return report;
}

ScenarioDocument scenario_from_json(const nlohmann::json& doc) {
  static const std::set<std::string> kKeys = {"outcomes", "measures", "variables"};
  if (!doc.is_object()) throw ArgumentError("scenario document must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (!kKeys.contains(key)) throw ArgumentError("unknown key '" + key + "'");
  }
  if (!doc.contains("outcomes") || !doc.contains("measures")) {
    throw ArgumentError("scenario document needs 'outcomes' and 'measures'");
  }
  std::vector<std::string> outcomes;
  for (const auto& o : doc.at("outcomes")) {
    outcomes.push_back(o.is_string() ? o.get<std::string>() : o.dump());
  }
  auto measures = doc.at("measures").get<std::vector<std::vector<double>>>();
  ScenarioSet set(outcomes, std::move(measures));

  std::map<std::string, RandomVariable> variables;
  if (doc.contains("variables")) {
    for (const auto& [name, entry] : doc.at("variables").items()) {
      if (!entry.is_array() || entry.size() != set.size()) {
        throw ArgumentError("variable '" + name + "' must list one value per outcome");
      }
      std::size_t dim = 1;
      std::vector<double> values;
      if (!entry.empty() && entry.front().is_array()) {
        dim = entry.front().size();
        for (const auto& row : entry) {
          if (!row.is_array() || row.size() != dim) {
            throw ArgumentError("variable '" + name + "' has ragged rows");
          }
          for (const auto& v : row) values.push_back(v.get<double>());
        }
      } else {
        values = entry.get<std::vector<double>>();
      }
      variables.emplace(name, RandomVariable(set.outcomes(), dim, std::move(values)));
    }
  }
  return ScenarioDocument{std::move(set), std::move(variables)};
}

ScenarioDocument load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open scenario file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError("scenario file '" + path + "': " + e.what());
  }
  return scenario_from_json(doc);
}

nlohmann::json to_json(const ScenarioDocument& doc) {
  nlohmann::json out;
  out["outcomes"] = doc.set.outcomes();
  out["measures"] = doc.set.measures();
  nlohmann::json vars = nlohmann::json::object();
  for (const auto& [name, v] : doc.variables) {
    if (v.dim() == 1) {
      vars[name] = std::vector<double>(v.values().begin(), v.values().end());
    } else {
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < v.size(); ++i) {
        rows.push_back(std::vector<double>(v.at(i).begin(), v.at(i).end()));
      }
      vars[name] = rows;
    }
  }
  out["variables"] = vars;
  return out;
}

}  // namespace gexp
