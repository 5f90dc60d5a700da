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

#ifndef GEXPECT_TESTS_ORACLES_HPP_
#define GEXPECT_TESTS_ORACLES_HPP_

// Brute-force references that share no code with the library kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

struct TwoPoint {
  std::vector<double> values;
  std::vector<double> probs;
};

// Exhaustive tree: every node picks the best distribution for its subtree.
inline double tree_value(const std::vector<TwoPoint>& family, int steps, double scale,
                         const std::function<double(double)>& terminal, double s = 0.0,
                         int depth = 0) {
  if (depth == steps) return terminal(s);
  double best = -std::numeric_limits<double>::infinity();
  for (const TwoPoint& d : family) {
    double v = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      v += d.probs[i] * tree_value(family, steps, scale, terminal, s + scale * d.values[i],
                                   depth + 1);
    }
    best = std::max(best, v);
  }
  return best;
}

// Recursive lattice expectation of a functional of the increment sequence.
// Volatilities are tried in the order given; both signs weigh 1/2.
inline double lattice_value(int steps, double dt, const std::vector<double>& sigmas,
                            const std::function<double(const std::vector<double>&)>& x,
                            std::vector<double>& increments) {
  if (static_cast<int>(increments.size()) == steps) return x(increments);
  double best = -std::numeric_limits<double>::infinity();
  for (double s : sigmas) {
    const double h = s * std::sqrt(dt);
    increments.push_back(h);
    const double up = lattice_value(steps, dt, sigmas, x, increments);
    increments.back() = -h;
    const double down = lattice_value(steps, dt, sigmas, x, increments);
    increments.pop_back();
    best = std::max(best, 0.5 * (up + down));
  }
  return best;
}

inline double lattice_value(int steps, double dt, const std::vector<double>& sigmas,
                            const std::function<double(const std::vector<double>&)>& x) {
  std::vector<double> increments;
  return lattice_value(steps, dt, sigmas, x, increments);
}

}  // namespace oracle

#endif  // GEXPECT_TESTS_ORACLES_HPP_
