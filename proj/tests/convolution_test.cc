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

#include "convolution.h"

#include <random>
#include <vector>

#include "gtest/gtest.h"

namespace ablq::internal {
namespace {

std::vector<double> RandomMasses(std::mt19937_64& rng, size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

TEST(ConvolutionTest, DirectMatchesHandComputation) {
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> b = {0.5, 0.25};
  const std::vector<double> expected = {0.5, 1.25, 2.0, 0.75};
  EXPECT_EQ(ConvolveDirect(a, b), expected);
}

TEST(ConvolutionTest, FftMatchesDirect) {
  std::mt19937_64 rng(11);
  for (size_t n : {1, 7, 64, 300, 1025}) {
    for (size_t m : {1, 5, 49, 777}) {
      const auto a = RandomMasses(rng, n);
      const auto b = RandomMasses(rng, m);
      const auto direct = ConvolveDirect(a, b);
      const auto fft = ConvolveFft(a, b);
      ASSERT_EQ(direct.size(), fft.size());
      double scale = 0.0;
      for (double x : direct) scale = std::max(scale, x);
      for (size_t i = 0; i < direct.size(); ++i) {
        EXPECT_NEAR(direct[i], fft[i], 1e-12 * scale) << n << "x" << m;
      }
    }
  }
}

TEST(ConvolutionTest, SelfConvolutionAndClamping) {
  std::mt19937_64 rng(5);
  auto a = RandomMasses(rng, 5000);
  a[17] = 0.0;
  const auto fft = Convolve(a, a);
  const auto direct = ConvolveDirect(a, a);
  for (size_t i = 0; i < fft.size(); ++i) {
    EXPECT_GE(fft[i], 0.0);
    EXPECT_NEAR(fft[i], direct[i], 1e-9);
  }
}

TEST(ConvolutionTest, PreservesTotalMass) {
  std::vector<double> a(4096, 1.0 / 4096), b(3000, 1.0 / 3000);
  double total = 0.0;
  for (double x : Convolve(a, b)) total += x;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

}  // namespace
}  // namespace ablq::internal
