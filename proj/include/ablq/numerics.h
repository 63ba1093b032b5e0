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

// Scalar numerics shared by the accountants: log-space normal CDF, log-space
// arithmetic helpers and compensated summation.

#ifndef ABLQ_NUMERICS_H_
#define ABLQ_NUMERICS_H_

#include <cmath>
#include <limits>

namespace ablq {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Natural log of the standard normal CDF. Accurate to about 1e-14 relative
// error over the whole real line; uses an asymptotic series below -30 so the
// result stays finite where Phi(x) underflows.
double LogNormalCdf(double x);

// ln(1 - Phi(x)) = ln Phi(-x).
inline double LogNormalSf(double x) { return LogNormalCdf(-x); }

double NormalCdf(double x);

// Inverse of the standard normal CDF for p in (0, 1).
double NormalQuantile(double p);

// log(exp(a) + exp(b)).
double LogAddExp(double a, double b);

// log(exp(a) - exp(b)); requires a >= b. Returns -inf when a == b.
double LogSubExp(double a, double b);

// log(1 - exp(a)) for a <= 0.
double Log1mExp(double a);

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void Add(double value) {
    const double t = sum_ + value;
    if (std::fabs(sum_) >= std::fabs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  double Result() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace ablq

#endif  // ABLQ_NUMERICS_H_
