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

#ifndef GEXPECT_LIMITS_HPP_
#define GEXPECT_LIMITS_HPP_

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "gexpect/gpde.hpp"
#include "gexpect/test_function.hpp"

namespace gexp {

// Finite-support distribution: values[i] with probability probs[i].
struct Atom {
  std::vector<double> values;
  std::vector<double> probs;

  double mean() const;
  double variance() const;
  double second_moment() const;
  Atom scaled(double factor) const;
};

// A family of step distributions realizing a declared envelope. The
// constructor checks that atom means span exactly [mu_lo, mu_hi] and atom
// variances span [var_lo, var_hi] (tolerance 1e-12).
class StepFamily {
 public:
  StepFamily(std::vector<Atom> atoms, UncertaintyParams envelope);

  // {1/2 d(-s) + 1/2 d(s)} for s in {sigma_lo, sigma_hi}.
  static StepFamily rademacher(double var_lo, double var_hi);
  // {d(mu_lo), d(mu_hi)}.
  static StepFamily dirac(double mu_lo, double mu_hi);
  // {1/2 d(mu - s) + 1/2 d(mu + s)} for mu in {mu_lo, mu_hi}.
  static StepFamily shifted_rademacher(double mu_lo, double mu_hi, double sigma);
  // Envelope inferred from the atoms.
  static StepFamily from_atoms(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const UncertaintyParams& envelope() const noexcept { return envelope_; }

  // Every atom has mean 0 (within 1e-12); ArgumentError otherwise.
  void require_centered() const;

  StepFamily with_atom(Atom atom) const;

 private:
  std::vector<Atom> atoms_;
  UncertaintyParams envelope_;
};

// Same layout as a scenario document: numeric "outcomes" are the support
// points and each entry of "measures" is one atom.
StepFamily step_family_from_json(const nlohmann::json& doc);

enum class DPMode {
  kAuto,   // exact when the reachable state set fits, grid otherwise
  kExact,  // reachable partial sums, no interpolation
  kGrid,   // uniform state grid with linear interpolation
};

struct DPConfig {
  // Grid half-width around `center`; 0 selects the automatic width
  // (8 standard deviations around the drift range, clipped to the reach).
  double half_width = 0.0;
  double center = 0.0;
  int ns = 2001;
  DPMode mode = DPMode::kAuto;
  // Total number of stored states allowed in exact mode.
  std::size_t max_states = 20'000'000;
};

struct DPResult {
  double value;
  DPMode mode;  // kExact or kGrid: what actually ran
  std::size_t states;
};

// V_steps = terminal; V_k(s) = max_theta sum_i p_theta,i V_{k+1}(s + x_theta,i);
// returns V_0(0).
DPResult sublinear_dp(std::span<const Atom> atoms, int steps,
                      const std::function<double(double)>& terminal,
                      const DPConfig& cfg = {});

// E[phi(S_n / n)].
double lln_value(const StepFamily& fam, const TestFunction& phi, int n,
                 const DPConfig& cfg = {});
// E[phi(S_n / sqrt(n))]; atoms must be centred.
double clt_value(const StepFamily& fam, const TestFunction& phi, int n,
                 const DPConfig& cfg = {});
// E[phi(sum X_i / sqrt(n) + Y_i / n)] with joint atom choice per step.
double clt_lln_value(const StepFamily& fam_x, const StepFamily& fam_y,
                     const TestFunction& phi, int n, const DPConfig& cfg = {});

enum class Law { kClt, kLln };

struct ConvergenceRow {
  int n;
  double value;
  double abs_error;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  // Error nonincreasing up to 10% relative slack (1e-12 absolute floor).
  bool monotone = true;
  void write_csv(std::ostream& out) const;
};

ConvergenceReport convergence_report(const StepFamily& fam, const TestFunction& phi,
                                     std::span<const int> ns, double reference,
                                     Law law = Law::kClt, const DPConfig& cfg = {});

}  // namespace gexp

#endif  // GEXPECT_LIMITS_HPP_
