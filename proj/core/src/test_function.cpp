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

#include "gexpect/test_function.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <utility>

#include "gexpect/errors.hpp"

namespace gexp {
namespace {

// Shortest round-trip spelling, so names read back through parse().
std::string Num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

TestFunction::TestFunction(std::string name, Scalar fn, double lipschitz,
                           double growth, double radius)
    : name_(std::move(name)),
      arity_(1),
      scalar_(std::move(fn)),
      lipschitz_(lipschitz),
      growth_(growth),
      radius_(radius) {
  vector_ = [f = scalar_](std::span<const double> x) { return f(x[0]); };
}

TestFunction::TestFunction(std::string name, std::size_t arity, Vector fn,
                           double lipschitz, double growth)
    : name_(std::move(name)),
      arity_(arity),
      vector_(std::move(fn)),
      lipschitz_(lipschitz),
      growth_(growth),
      radius_(0.0) {
  if (arity_ == 0) throw ArgumentError("test function arity must be >= 1");
  if (arity_ == 1) {
    scalar_ = [f = vector_](double x) { return f(std::span<const double>(&x, 1)); };
  }
}

double TestFunction::operator()(double x) const {
  if (arity_ != 1) {
    throw ArgumentError("test function '" + name_ + "' has arity " +
                        std::to_string(arity_) + ", called with a scalar");
  }
  return scalar_(x);
}

double TestFunction::operator()(std::span<const double> x) const {
  if (x.size() != arity_) {
    throw ArgumentError("test function '" + name_ + "' expects " +
                        std::to_string(arity_) + " arguments, got " +
                        std::to_string(x.size()));
  }
  return vector_(x);
}

TestFunction TestFunction::reflected() const {
  if (arity_ != 1) throw ArgumentError("reflected() needs arity 1");
  return TestFunction(name_ + "(-x)", [f = scalar_](double x) { return f(-x); },
                      lipschitz_, growth_, radius_);
}

TestFunction TestFunction::affine(double lambda, double c) const {
  if (arity_ != 1) throw ArgumentError("affine() needs arity 1");
  return TestFunction(
      name_ + "*" + Num(lambda) + "+" + Num(c),
      [f = scalar_, lambda, c](double x) { return lambda * f(x) + c; },
      std::abs(lambda) * lipschitz_, growth_, radius_);
}

TestFunction operator+(const TestFunction& a, const TestFunction& b) {
  if (a.arity() != 1 || b.arity() != 1) {
    throw ArgumentError("sum of test functions needs arity 1");
  }
  return TestFunction(a.name() + "+" + b.name(),
                      [a, b](double x) { return a(x) + b(x); },
                      a.lipschitz() + b.lipschitz(),
                      std::max(a.growth(), b.growth()),
                      std::max(a.radius(), b.radius()));
}

namespace functions {

TestFunction identity() {
  return TestFunction("identity", [](double x) { return x; }, 1.0, 1.0);
}

TestFunction constant(double c) {
  return TestFunction("const:" + Num(c), [c](double) { return c; },
                      0.0, 0.0);
}

TestFunction square() {
  return TestFunction("square", [](double x) { return x * x; },
                      TestFunction::kUnbounded, 2.0);
}

TestFunction quartic() {
  return TestFunction("quartic",
                      [](double x) {
                        const double x2 = x * x;
                        return x2 * x2;
                      },
                      TestFunction::kUnbounded, 4.0);
}

TestFunction cube() {
  return TestFunction("cube", [](double x) { return x * x * x; },
                      TestFunction::kUnbounded, 3.0);
}

TestFunction abs() {
  return TestFunction("abs", [](double x) { return std::abs(x); }, 1.0, 1.0);
}

TestFunction exp() {
  return TestFunction("exp", [](double x) { return std::exp(x); },
                      TestFunction::kUnbounded, 1.0);
}

TestFunction call(double strike) {
  return TestFunction("call:" + Num(strike),
                      [strike](double x) { return std::max(x - strike, 0.0); },
                      1.0, 1.0, std::abs(strike));
}

TestFunction dist(double lo, double hi) {
  if (!(lo <= hi)) throw ArgumentError("dist:[a,b] needs a <= b");
  return TestFunction(
      "dist:[" + Num(lo) + "," + Num(hi) + "]",
      [lo, hi](double x) {
        if (x < lo) return lo - x;
        if (x > hi) return x - hi;
        return 0.0;
      },
      1.0, 1.0, std::max(std::abs(lo), std::abs(hi)));
}

TestFunction power(double p) {
  return TestFunction("power:" + Num(p),
                      [p](double x) { return std::pow(std::abs(x), p); },
                      TestFunction::kUnbounded, p);
}

namespace {

double parse_number(std::string_view text, std::string_view whole) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw ArgumentError("bad number '" + std::string(text) +
                        "' in test function '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

TestFunction parse(std::string_view spec) {
  const std::string whole(spec);
  if (spec == "square") return square();
  if (spec == "quartic") return quartic();
  if (spec == "cube") return cube();
  if (spec == "abs") return abs();
  if (spec == "exp") return exp();
  if (spec == "identity" || spec == "x") return identity();
  if (spec.starts_with("neg:")) {
    TestFunction inner = parse(spec.substr(4));
    return TestFunction("neg:" + inner.name(),
                        [inner](double x) { return -inner(x); },
                        inner.lipschitz(), inner.growth(), inner.radius());
  }
  if (spec.starts_with("call:")) return call(parse_number(spec.substr(5), whole));
  if (spec.starts_with("const:")) return constant(parse_number(spec.substr(6), whole));
  if (spec.starts_with("dist:")) {
    std::string_view body = spec.substr(5);
    if (body.size() < 5 || body.front() != '[' || body.back() != ']') {
      throw ArgumentError("expected dist:[a,b], got '" + whole + "'");
    }
    body = body.substr(1, body.size() - 2);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) {
      throw ArgumentError("expected dist:[a,b], got '" + whole + "'");
    }
    return dist(parse_number(body.substr(0, comma), whole),
                parse_number(body.substr(comma + 1), whole));
  }
  throw ArgumentError("unknown test function '" + whole + "'");
}

}  // namespace functions

}  // namespace gexp
