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

#include "ablq/poisson_accounting.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "ablq/errors.h"
#include "ablq/gaussian_mechanism.h"
#include "ablq/privacy_loss_distribution.h"
#include "testing/binomial_oracle.h"

namespace ablq {
namespace {

using ::ablq::testing::ExactBinomialTail;

TEST(BinomialTailTest, Examples) {
  EXPECT_DOUBLE_EQ(BinomialTail(10, 0.5, 7), 56.0 / 1024.0);
  EXPECT_EQ(BinomialTail(10, 0.5, 10), 0.0);
  EXPECT_EQ(BinomialTail(10, 0.5, 12), 0.0);
  EXPECT_EQ(BinomialTail(10, 0.0, 0), 0.0);
  EXPECT_EQ(BinomialTail(10, 0.3, -1), 1.0);
}

TEST(BinomialTailTest, OracleSelfCheck) {
  EXPECT_DOUBLE_EQ(ExactBinomialTail(10, 1, 2, 7), 56.0 / 1024.0);
}

TEST(BinomialTailTest, MatchesExactSummation) {
  struct Case {
    int64_t n, b, max_batch;
  };
  const Case cases[] = {{1000, 100, 100}, {1000, 100, 120}, {1000, 100, 150},
                        {1000, 100, 200}, {2000, 37, 60},   {500, 250, 300},
                        {1000, 1, 8},     {1500, 300, 301}};
  for (const Case& c : cases) {
    const double p = static_cast<double>(c.b) / static_cast<double>(c.n);
    const double exact = ExactBinomialTail(c.n, c.b, c.n, c.max_batch);
    EXPECT_NEAR(BinomialTail(c.n, p, c.max_batch), exact, 1e-10 * exact)
        << c.n << " " << c.b << " " << c.max_batch;
    EXPECT_NEAR(LogBinomialTail(c.n, p, c.max_batch), std::log(exact), 1e-9);
  }
}

TEST(BinomialTailTest, DeepTailStaysInLogSpace) {
  const double exact = ExactBinomialTail(1000, 10, 1000, 200);
  ASSERT_GT(exact, 0.0);
  EXPECT_NEAR(LogBinomialTail(1000, 0.01, 200), std::log(exact),
              1e-9 * std::fabs(std::log(exact)));
  const double log_tail = LogBinomialTail(100000, 0.01, 5000);
  EXPECT_TRUE(std::isfinite(log_tail));
  EXPECT_LT(log_tail, -700.0);
}

TEST(BinomialTailTest, Monotone) {
  double prev = 1.0;
  for (int64_t b = 0; b <= 300; ++b) {
    const double v = BinomialTail(1000, 0.1, b);
    EXPECT_LE(v, prev);
    prev = v;
  }
  prev = 0.0;
  for (int i = 1; i < 50; ++i) {
    const double v = BinomialTail(1000, 0.01 * i, 120);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(TruncationBudgetTest, CorrectionFormula) {
  const SamplerConfig c = SamplerConfig::TruncatedPoisson(1000, 100, 110, 7);
  const TruncationBudget t = ComputeTruncationBudget(c, 1.5);
  EXPECT_DOUBLE_EQ(t.psi, BinomialTail(1000, 0.1, 110));
  EXPECT_DOUBLE_EQ(t.correction, 7 * (1 + std::exp(1.5)) * t.psi);
  const TruncationBudget none = ComputeTruncationBudget(
      SamplerConfig::TruncatedPoisson(1000, 100, std::nullopt, 7), 1.5);
  EXPECT_EQ(none.psi, 0.0);
  EXPECT_EQ(none.correction, 0.0);
}

TEST(TruncatedPoissonDeltaTest, AdditiveDecomposition) {
  const SamplerConfig c = SamplerConfig::TruncatedPoisson(1000, 100, 100, 10);
  auto r = TruncatedPoissonDeltaBreakdown(c, 1.0, 1.0);
  ASSERT_TRUE(r.ok());
  auto untruncated = TruncatedPoissonDelta(
      SamplerConfig::TruncatedPoisson(1000, 100, std::nullopt, 10), 1.0, 1.0);
  ASSERT_TRUE(untruncated.ok());
  EXPECT_EQ(untruncated->bound, BoundKind::kUpperBound);
  const double psi = ExactBinomialTail(1000, 100, 1000, 100);
  EXPECT_NEAR(r->truncation.psi, psi, 1e-10 * psi);
  EXPECT_DOUBLE_EQ(r->pld_delta, untruncated->delta);
  const double expected =
      std::min(1.0, untruncated->delta + 10 * (1 + std::exp(1.0)) * psi);
  EXPECT_NEAR(r->delta, expected, 1e-10 * expected);
}

TEST(TruncatedPoissonDeltaTest, MatchesPairDelta) {
  const SamplerConfig c =
      SamplerConfig::TruncatedPoisson(1000, 20, std::nullopt, 30);
  auto r = TruncatedPoissonDelta(c, 0.9, 0.5);
  auto pld = PairDelta(SubsampledGaussianPair{0.02, 0.9}, 30, 0.5,
                       Rounding::kPessimistic);
  ASSERT_TRUE(r.ok() && pld.ok());
  EXPECT_DOUBLE_EQ(r->delta, pld->delta);
}

TEST(TruncatedPoissonDeltaTest, VanishingSamplingRate) {
  // With q = 1e-9 the exact value is q * delta_G(sigma, 0). Pessimistic
  // rounding can only add about one grid step of loss; the optimistic
  // estimate vanishes.
  auto r = TruncatedPoissonDelta(
      SamplerConfig::TruncatedPoisson(1'000'000'000, 1, std::nullopt, 1), 1.0,
      0.0);
  auto opt = PairDelta(SubsampledGaussianPair{1e-9, 1.0}, 1, 0.0,
                       Rounding::kOptimistic);
  ASSERT_TRUE(r.ok() && opt.ok());
  const double exact = 1e-9 * GaussianDelta(1.0, 0.0);
  EXPECT_GE(r->delta, exact);
  EXPECT_LE(r->delta, exact + 1e-4);
  EXPECT_LT(opt->delta, 1e-8);
}

TEST(TruncatedPoissonDeltaTest, MonotoneInSigmaAndB) {
  double prev = 1.1;
  for (double sigma : {0.6, 0.8, 1.0, 1.5, 2.0}) {
    auto r = TruncatedPoissonDelta(
        SamplerConfig::TruncatedPoisson(1000, 50, 60, 20), sigma, 1.0);
    ASSERT_TRUE(r.ok());
    EXPECT_LE(r->delta, prev);
    prev = r->delta;
  }
  prev = 1.1;
  for (int64_t max_batch : {50, 55, 60, 70, 90}) {
    auto r = TruncatedPoissonDelta(
        SamplerConfig::TruncatedPoisson(1000, 50, max_batch, 20), 1.0, 1.0);
    ASSERT_TRUE(r.ok());
    EXPECT_LE(r->delta, prev);
    prev = r->delta;
  }
}

TEST(TruncatedPoissonDeltaTest, RejectsDeterministicConfig) {
  EXPECT_FALSE(
      TruncatedPoissonDelta(SamplerConfig::Deterministic(10, 5, 2), 1.0, 1.0)
          .ok());
}

// Brute-force hockey stick between explicit distributions.
double HockeyStick(const std::vector<double>& p, const std::vector<double>& q,
                   double eps) {
  double d = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    d += std::max(0.0, p[i] - std::exp(eps) * q[i]);
  }
  return d;
}

TEST(TotalVariationTriangleTest, PlantedPerturbation) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  auto simplex = [&](size_t m) {
    std::vector<double> v(m);
    double s = 0.0;
    for (double& x : v) s += (x = u(rng));
    for (double& x : v) x /= s;
    return v;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const size_t m = 2 + trial % 7;
    const auto p = simplex(m), q = simplex(m), rp = simplex(m),
               rq = simplex(m);
    const double eta = 0.2 * u(rng);
    std::vector<double> p2(m), q2(m);
    for (size_t i = 0; i < m; ++i) {
      p2[i] = (1 - eta) * p[i] + eta * rp[i];
      q2[i] = (1 - eta) * q[i] + eta * rq[i];
    }
    for (double eps : {0.0, 0.5, 2.0}) {
      EXPECT_LE(HockeyStick(p2, q2, eps),
                HockeyStick(p, q, eps) + eta * (1 + std::exp(eps)) + 1e-15);
    }
  }
}

TEST(ChooseMaxBatchTest, VacuousBudgetReturnsB) {
  auto r = ChooseMaxBatch(1000, 100, 1, 0.0, 1.0, 1.0);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r, 100);
}

TEST(ChooseMaxBatchTest, MinimalOnRandomConfigs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int64_t n = std::uniform_int_distribution<int64_t>(200, 2000)(rng);
    const int64_t b = std::uniform_int_distribution<int64_t>(1, n / 3)(rng);
    const int64_t steps = std::uniform_int_distribution<int64_t>(1, 500)(rng);
    const double eps = std::uniform_real_distribution<double>(0.1, 8.0)(rng);
    const double delta = std::pow(10.0, -std::uniform_real_distribution<double>(
                                            4.0, 10.0)(rng));
    auto r = ChooseMaxBatch(n, b, steps, eps, delta);
    ASSERT_TRUE(r.ok());
    const double factor = steps * (1 + std::exp(eps));
    const double budget = kDefaultTruncationBudgetFraction * delta;
    EXPECT_GE(*r, b);
    EXPECT_LE(ExactBinomialTail(n, b, n, *r) * factor, budget * (1 + 1e-9));
    if (*r > b) {
      EXPECT_GT(ExactBinomialTail(n, b, n, *r - 1) * factor,
                budget * (1 - 1e-9));
    }
  }
}

TEST(ChooseMaxBatchTest, OrderOfMagnitudeAtScale) {
  auto r = ChooseMaxBatch(int64_t{1} << 20, 65536, 16, 5.0, 2.7e-8);
  ASSERT_TRUE(r.ok());
  EXPECT_GT(*r, 65536);
  EXPECT_LT(*r, 2 * 65536);
}

TEST(ChooseMaxBatchTest, Errors) {
  EXPECT_TRUE(IsError(ChooseMaxBatch(10, 20, 1, 1.0, 1e-6).status(),
                      ErrorKind::kInvalidConfig));
  EXPECT_TRUE(IsError(ChooseMaxBatch(10, 2, 1, 1.0, 0.0).status(),
                      ErrorKind::kInvalidArgument));
}

}  // namespace
}  // namespace ablq
