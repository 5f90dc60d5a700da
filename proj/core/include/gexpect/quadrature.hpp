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

#ifndef GEXPECT_QUADRATURE_HPP_
#define GEXPECT_QUADRATURE_HPP_

#include <vector>

namespace gexp {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite rule for the weight exp(-x^2) (weights sum to sqrt(pi)),
// computed by Golub-Welsch. Exact for polynomials of degree < 2n.
QuadratureRule gauss_hermite(int n);

}  // namespace gexp

#endif  // GEXPECT_QUADRATURE_HPP_
