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

#ifndef GEXPECT_LATTICE_HPP_
#define GEXPECT_LATTICE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gexpect/gpde.hpp"
#include "gexpect/limits.hpp"
#include "gexpect/test_function.hpp"

namespace gexp {

// N-step lattice whose increments are drawn from
//   {-sig_hi, -sig_lo, +sig_lo, +sig_hi} * sqrt(dt),  dt = T / N.
// A node at depth k is a path prefix of k increments; its index is the
// base-4 number formed by the increment digits, first step most significant.
// The volatility is chosen per node by the maximizing controller; both signs
// carry weight 1/2.
class LatticeModel {
 public:
  static constexpr int kBranching = 4;
  static constexpr int kExactMaxSteps = 12;

  LatticeModel(int steps, double horizon, double var_lo, double var_hi);

  int steps() const noexcept { return steps_; }
  double horizon() const noexcept { return horizon_; }
  double dt() const noexcept { return dt_; }
  double var_lo() const noexcept { return var_lo_; }
  double var_hi() const noexcept { return var_hi_; }
  double sigma_lo() const noexcept { return sigma_lo_; }
  double sigma_hi() const noexcept { return sigma_hi_; }
  double time(int k) const noexcept { return dt_ * k; }
  UncertaintyParams params() const { return UncertaintyParams(0.0, 0.0, var_lo_, var_hi_); }

  // Increment for digit c in 0..3 and the matching <B> increment var * dt.
  double increment(int c) const { return increments_[static_cast<std::size_t>(c)]; }
  double qv_increment(int c) const { return qv_increments_[static_cast<std::size_t>(c)]; }

  static std::size_t nodes_at(int depth) { return std::size_t{1} << (2 * depth); }

  // CapacityError unless steps() <= kExactMaxSteps.
  void require_exact(const std::string& op) const;

  // sup_{var_lo <= s2 <= var_hi} s2 a / 2.
  double g(double a) const;

 private:
  int steps_;
  double horizon_;
  double dt_;
  double var_lo_;
  double var_hi_;
  double sigma_lo_;
  double sigma_hi_;
  std::array<double, 4> increments_;
  std::array<double, 4> qv_increments_;
};

// A (possibly partial) path: the first length() increment digits.
class LatticePath {
 public:
  explicit LatticePath(const LatticeModel& model);

  const LatticeModel& model() const noexcept { return *model_; }
  int length() const noexcept { return length_; }
  int digit(int k) const { return digits_[static_cast<std::size_t>(k)]; }
  // B at time k (k <= length()).
  double B(int k) const { return b_[static_cast<std::size_t>(k)]; }
  // <B> at time k.
  double qv(int k) const { return qv_[static_cast<std::size_t>(k)]; }
  // Increments of step k (time k -> k + 1), k < length().
  double dB(int k) const { return model_->increment(digit(k)); }
  double dqv(int k) const { return model_->qv_increment(digit(k)); }
  // Index of the prefix of length k.
  std::size_t node(int k) const { return nodes_[static_cast<std::size_t>(k)]; }

  void push(int digit);
  void pop();

 private:
  const LatticeModel* model_;
  int length_ = 0;
  std::vector<int> digits_;
  std::vector<double> b_;
  std::vector<double> qv_;
  std::vector<std::size_t> nodes_;
};

using PathFunctional = std::function<double(const LatticePath&)>;

// Values on every node of depths 0..depth(); layer k has 4^k entries.
class AdaptedProcess {
 public:
  AdaptedProcess() = default;
  explicit AdaptedProcess(std::vector<std::vector<double>> layers);

  // f(prefix) for every prefix of length 0..last_depth; adapted by construction.
  static AdaptedProcess generate(const LatticeModel& m, int last_depth,
                                 const std::function<double(const LatticePath&)>& f);
  // f(full path, k) evaluated on every complete path; throws ContractError if
  // the value at time k depends on increments after k.
  static AdaptedProcess from_paths(const LatticeModel& m, int last_depth,
                                   const std::function<double(const LatticePath&, int)>& f);
  static AdaptedProcess constant(const LatticeModel& m, int last_depth, double c);

  int depth() const noexcept { return static_cast<int>(layers_.size()) - 1; }
  double at(int k, std::size_t node) const {
    return layers_[static_cast<std::size_t>(k)][node];
  }
  std::span<const double> layer(int k) const { return layers_[static_cast<std::size_t>(k)]; }
  double root() const { return layers_.front().front(); }
  // Value along a path at time k.
  double along(const LatticePath& path, int k) const { return at(k, path.node(k)); }

 private:
  std::vector<std::vector<double>> layers_;
};

// Calls visit(path) for every complete path, in node order.
void for_each_path(const LatticeModel& m, const std::function<void(const LatticePath&)>& visit);

// X evaluated on every complete path (4^N values in node order).
std::vector<double> tabulate(const LatticeModel& m, const PathFunctional& x);

// One backward step: parent value = max over sigma of the +/- average.
std::vector<double> one_step_expectation(std::span<const double> children);

// E[X | Omega_k] for every k from leaf values.
AdaptedProcess backward_induction(const LatticeModel& m, std::vector<double> leaves);

AdaptedProcess conditional_expectation(const LatticeModel& m, const PathFunctional& x);
// Depth-k slice of the above.
std::vector<double> conditional_expectation(const LatticeModel& m, const PathFunctional& x,
                                            int k);
// E[X] at the root.
double lattice_expectation(const LatticeModel& m, const PathFunctional& x);

// E[terminal(B_T)] by state-space backward induction (no step cap).
double markov_expectation(const LatticeModel& m, const std::function<double(double)>& terminal,
                          const DPConfig& cfg = {});

// Pathwise sum_k eta_k dB_k; eta needs depth >= N - 1 (ContractError otherwise).
PathFunctional ito_integral(const LatticeModel& m, const AdaptedProcess& eta);

struct QuadraticVariation {
  AdaptedProcess qv;
  // max over nodes of |B_k^2 - 2 sum_{j<k} B_j dB_j - <B>_k|.
  double identity_residual;
  // var_lo t <= <B>_t <= var_hi t on every node. The envelopes are summed in
  // the same order as <B>, so the comparison is exact in floating point.
  bool within_envelope;
};

QuadraticVariation quadratic_variation(const LatticeModel& m);

// E[phi(<B>_T)].
double qv_expectation(const LatticeModel& m, const std::function<double(double)>& phi);

struct QVMoment {
  double upper;  // E[<B>_T^n]
  double lower;  // -E[-<B>_T^n]
  double second_moment;  // E[<B>_T^2]
  double second_moment_bound;  // 10 sig_hi^4 T^2
};

QVMoment qv_moment(const LatticeModel& m, int n);

// M_k = sum_{j<k} phi_j dB_j + eta_j d<B>_j - 2 G(eta_j) dt (drift term only
// when with_drift); returns max over nodes of |E[M_{k+1} | Omega_k] - M_k|.
double martingale_residual(const LatticeModel& m, const AdaptedProcess& phi,
                           const AdaptedProcess& eta, bool with_drift = true);

struct IsometryResult {
  double lhs;  // E[(sum eta dB)^2]
  double rhs;  // E[sum eta^2 d<B>]
};

IsometryResult isometry_check(const LatticeModel& m, const AdaptedProcess& eta);

struct JensenRow {
  std::string probe;
  double lhs;  // E[h(xi)]
  double rhs;  // h(E[xi])
  bool holds;
};

struct JensenReport {
  std::vector<JensenRow> rows;
  bool inequality_holds = true;
  // G(h'(y) a + h''(y) z^2) - h'(y) G(a) >= 0 on the (y, z, a) sample lattice.
  bool pointwise_condition = true;
  double worst_pointwise = 0.0;
  // Both sides agree (only claimed when var_lo > 0).
  bool consistent = true;
};

JensenReport jensen_check(const LatticeModel& m, const TestFunction& h,
                          const std::vector<TestFunction>& probes,
                          double tolerance = 1e-9);

// Max over depth-N/2 nodes and probes of |E[phi(B_T - B_s) | Omega_s] - E[phi(B_{T-s})]|.
double gbm_characterization_residual(const LatticeModel& m,
                                     const std::vector<TestFunction>& probes);
double gbm_characterization_residual(const LatticeModel& m);

}  // namespace gexp

#endif  // GEXPECT_LATTICE_HPP_
