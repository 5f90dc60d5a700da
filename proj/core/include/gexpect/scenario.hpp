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

#ifndef GEXPECT_SCENARIO_HPP_
#define GEXPECT_SCENARIO_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gexpect/test_function.hpp"

namespace gexp {

// Finite outcome space carrying a finite family of probability vectors.
// The upper expectation is the max of the linear expectations.
class ScenarioSet {
 public:
  ScenarioSet(std::vector<std::string> outcomes,
              std::vector<std::vector<double>> measures);

  std::size_t size() const noexcept { return outcomes_.size(); }
  std::size_t num_measures() const noexcept { return measures_.size(); }
  const std::vector<std::string>& outcomes() const noexcept { return outcomes_; }
  const std::vector<double>& measure(std::size_t k) const { return measures_.at(k); }
  const std::vector<std::vector<double>>& measures() const noexcept {
    return measures_;
  }

  // Index of an outcome label; DomainError if absent.
  std::size_t index_of(std::string_view label) const;

 private:
  std::vector<std::string> outcomes_;
  std::vector<std::vector<double>> measures_;
};

// Map outcome -> R^d, stored in the outcome order of the owning set.
class RandomVariable {
 public:
  RandomVariable(std::vector<std::string> outcomes, std::size_t dim,
                 std::vector<double> values);

  // Scalar variable in the outcome order of `set`.
  static RandomVariable scalar(const ScenarioSet& set, std::vector<double> values);
  static RandomVariable constant(const ScenarioSet& set, double c);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return outcomes_.size(); }
  const std::vector<std::string>& outcomes() const noexcept { return outcomes_; }
  std::span<const double> at(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<const double> values() const noexcept { return values_; }

  // Scalar values re-ordered to match `set`. DomainError on outcome mismatch,
  // ArgumentError if dim() != 1.
  std::vector<double> aligned(const ScenarioSet& set) const;

  RandomVariable map(const std::function<double(double)>& f) const;

 private:
  std::vector<std::string> outcomes_;
  std::size_t dim_;
  std::vector<double> values_;
};

RandomVariable operator+(const RandomVariable& x, const RandomVariable& y);
RandomVariable operator*(double lambda, const RandomVariable& x);
RandomVariable operator+(const RandomVariable& x, double c);
RandomVariable operator-(const RandomVariable& x);

struct Expectation {
  double value;
  std::size_t argmax;  // lowest index among maximizing measures
};

Expectation upper_expectation(const ScenarioSet& set, const RandomVariable& x);

// rho(X) = E[-X].
double risk_measure(const ScenarioSet& set, const RandomVariable& x);

// (E[|X|^p])^(1/p), p >= 1.
double lp_norm(const ScenarioSet& set, const RandomVariable& x, double p);

// E1[phibar(X)] with phibar(x) = E2[psi(x, Y)]: Y is independent from X.
// Swap the arguments (and the order of psi's inputs) for the reverse order.
double product_expectation(const ScenarioSet& first, const ScenarioSet& second,
                           const TestFunction& psi, const RandomVariable& x,
                           const RandomVariable& y);

// m1*m2 and K1*K2 above this are rejected by product_expectation.
inline constexpr std::size_t kMaxProductSize = 10'000;

struct AxiomResult {
  std::string name;
  bool passed;
  double worst_violation;
  std::size_t checks;
};

struct AxiomReport {
  std::vector<AxiomResult> results;
  bool all_passed() const;
  double worst_violation() const;
  const AxiomResult& find(std::string_view name) const;
};

// Monotonicity, constant preservation, sub-additivity, positive homogeneity,
// cash translation, Hoelder/Minkowski (p=q=2) and the mean-certainty identity
// over every ordered pair of probes. Tolerance is relative to the magnitudes
// involved.
AxiomReport check_axioms(const ScenarioSet& set,
                         const std::vector<RandomVariable>& probes,
                         double tolerance = 1e-12);

// {"outcomes":[...], "measures":[[...],...], "variables":{"name":[...]}}.
// A variable entry is a list of scalars or a list of equal-length lists.
struct ScenarioDocument {
  ScenarioSet set;
  std::map<std::string, RandomVariable> variables;
};

ScenarioDocument scenario_from_json(const nlohmann::json& doc);
ScenarioDocument load_scenario(const std::string& path);
nlohmann::json to_json(const ScenarioDocument& doc);

}  // namespace gexp

#endif  // GEXPECT_SCENARIO_HPP_
