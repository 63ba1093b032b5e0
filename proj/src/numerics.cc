// Copyright 2026 The ABLQ Accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ablq/numerics.h"

#include <cmath>

#include "boost/math/special_functions/erf.hpp"

namespace ablq {
namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;
constexpr double kAsymptoticThreshold = -30.0;

// ln Phi(x) for x << 0 from the Mills-ratio expansion
//   Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...).
double LogNormalCdfAsymptotic(double x) {
  const double inv_x2 = 1.0 / (x * x);
  double term = 1.0;
  double series = 1.0;
  for (int k = 1; k <= 12; ++k) {
    term *= -(2.0 * k - 1.0) * inv_x2;
    series += term;
  }
  return -0.5 * x * x - std::log(-x) - kHalfLogTwoPi + std::log(series);
}

}  // namespace

double LogNormalCdf(double x) {
  if (std::isnan(x)) return x;
  if (x == kInfinity) return 0.0;
  if (x == -kInfinity) return -kInfinity;
  if (x < kAsymptoticThreshold) return LogNormalCdfAsymptotic(x);
  if (x > 0) return std::log1p(-0.5 * std::erfc(x * M_SQRT1_2));
  return std::log(0.5 * std::erfc(-x * M_SQRT1_2));
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double NormalQuantile(double p) {
  if (p <= 0.0) return -kInfinity;
  if (p >= 1.0) return kInfinity;
  return -M_SQRT2 * boost::math::erfc_inv(2.0 * p);
}

double LogAddExp(double a, double b) {
  if (a == -kInfinity) return b;
  if (b == -kInfinity) return a;
  const double hi = std::fmax(a, b);
  const double lo = std::fmin(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double LogSubExp(double a, double b) {
  if (b == -kInfinity) return a;
  if (a <= b) return -kInfinity;
  return a + Log1mExp(b - a);
}

double Log1mExp(double a) {
  if (a >= 0.0) return -kInfinity;
  // Maechler's switch point keeps both branches at full relative accuracy.
  if (a > -M_LN2) return std::log(-std::expm1(a));
  return std::log1p(-std::exp(a));
}

}  // namespace ablq
