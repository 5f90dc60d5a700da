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

#ifndef GEXPECT_ERRORS_HPP_
#define GEXPECT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace gexp {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the domain of an operation (outcome mismatch, |x| > L, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed argument (p < 1, arity mismatch, invalid parameters).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Solver or grid configuration that cannot be honoured.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// NaN / overflow while stepping a scheme.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Problem size beyond an exact-mode cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// A declared contract (adaptedness, residual bound) does not hold.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Fixed-point iteration hit its iteration budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double last_delta)
      : Error(what), iterations_(iterations), last_delta_(last_delta) {}

  int iterations() const noexcept { return iterations_; }
  double last_delta() const noexcept { return last_delta_; }

 private:
  int iterations_;
  double last_delta_;
};

}  // namespace gexp

#endif  // GEXPECT_ERRORS_HPP_
