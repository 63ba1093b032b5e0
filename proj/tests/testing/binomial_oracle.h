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

// Exact binomial tail by rational arithmetic, used as a test oracle.

#ifndef ABLQ_TESTS_TESTING_BINOMIAL_ORACLE_H_
#define ABLQ_TESTS_TESTING_BINOMIAL_ORACLE_H_

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

namespace ablq::testing {

// Pr[Bin(n, num/den) > max_batch] summed exactly over k = max_batch+1..n.
inline double ExactBinomialTail(int64_t n, int64_t num, int64_t den,
                                int64_t max_batch) {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  if (max_batch >= n) return 0.0;
  if (max_batch < 0) return 1.0;
  cpp_int choose = 1;  // C(n, k), updated incrementally
  const cpp_int a = num;
  const cpp_int c = den - num;
  cpp_int total = 0;
  // Term k is C(n,k) a^k c^(n-k); walk k from n downward.
  cpp_int a_pow = boost::multiprecision::pow(a, static_cast<unsigned>(n));
  cpp_int c_pow = 1;
  for (int64_t k = n; k > max_batch; --k) {
    total += choose * a_pow * c_pow;
    // Move to k - 1.
    choose = choose * k / (n - k + 1);
    if (num == 0) break;
    a_pow /= a;
    c_pow *= c;
  }
  const cpp_int denom =
      boost::multiprecision::pow(cpp_int(den), static_cast<unsigned>(n));
  return cpp_rational(total, denom).convert_to<double>();
}

}  // namespace ablq::testing

#endif  // ABLQ_TESTS_TESTING_BINOMIAL_ORACLE_H_
