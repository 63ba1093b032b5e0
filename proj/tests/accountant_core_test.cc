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

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "ablq/errors.h"
#include "ablq/numerics.h"
#include "ablq/sampler_config.h"

namespace ablq {
namespace {

// ln Phi(x) at 50 digits from mpmath quadrature (tests/oracles).
struct LogPhiCase {
  double x;
  double expected;
};

constexpr LogPhiCase kLogPhi[] = {
    {-37.0, -689.0305855768905936}, {-30.0, -454.32124395634319711},
    {-20.0, -203.91715537109726394}, {-10.0, -53.231285150512470578},
    {-5.0, -15.064998393988725736},  {-1.0, -1.8410216450092635058},
    {0.0, -0.69314718055994530942},  {0.5, -0.36894641528865639307},
    {1.0, -0.17275377902344988953},  {3.0, -0.0013508099647481937988},
    {5.0, -2.8665161296376359338e-7}, {8.0, -6.2209605742717860585e-16},
};

TEST(LogNormalCdfTest, MatchesQuadratureOracle) {
  for (const LogPhiCase& c : kLogPhi) {
    EXPECT_NEAR(LogNormalCdf(c.x), c.expected, 1e-12 * std::fabs(c.expected))
        << "x=" << c.x;
  }
}

TEST(LogNormalCdfTest, Limits) {
  EXPECT_EQ(LogNormalCdf(kInfinity), 0.0);
  EXPECT_TRUE(std::isfinite(LogNormalCdf(-30.0)));
  EXPECT_TRUE(std::isfinite(LogNormalCdf(-1e3)));
}

TEST(LogNormalCdfTest, MonotoneAndNonPositive) {
  double prev = -kInfinity;
  for (double x = -40.0; x <= 10.0; x += 0.01) {
    const double v = LogNormalCdf(x);
    EXPECT_LE(v, 0.0);
    EXPECT_GE(v, prev) << x;
    prev = v;
  }
}

TEST(LogNormalCdfTest, ComplementsSumToOne) {
  for (double x = -8.0; x <= 8.0; x += 0.125) {
    EXPECT_NEAR(std::exp(LogNormalCdf(x)) + std::exp(LogNormalCdf(-x)), 1.0,
                1e-12);
  }
}

TEST(NumericsTest, NormalQuantileInvertsCdf) {
  for (double p : {1e-300, 1e-20, 1e-5, 0.1, 0.5, 0.9, 1 - 1e-9}) {
    EXPECT_NEAR(NormalCdf(NormalQuantile(p)), p, 1e-9 * p);
  }
}

TEST(NumericsTest, LogSpaceHelpers) {
  EXPECT_NEAR(LogAddExp(std::log(2.0), std::log(3.0)), std::log(5.0), 1e-15);
  EXPECT_NEAR(LogSubExp(std::log(5.0), std::log(3.0)), std::log(2.0), 1e-15);
  EXPECT_EQ(LogSubExp(1.0, 1.0), -kInfinity);
  EXPECT_NEAR(Log1mExp(std::log(0.25)), std::log(0.75), 1e-15);
  EXPECT_NEAR(Log1mExp(-1e-20), std::log(1e-20), 1e-12);
}

TEST(NumericsTest, CompensatedSumKeepsSmallTerms) {
  CompensatedSum sum;
  sum.Add(1.0);
  for (int i = 0; i < 1000; ++i) sum.Add(1e-17);
  sum.Add(-1.0);
  EXPECT_NEAR(sum.Result(), 1e-14, 1e-27);
}

TEST(PrivacyParamsTest, Validate) {
  EXPECT_TRUE((PrivacyParams{1.0, 1e-6}).Validate().ok());
  EXPECT_FALSE((PrivacyParams{-1.0, 1e-6}).Validate().ok());
  EXPECT_FALSE((PrivacyParams{1.0, 1.5}).Validate().ok());
}

TEST(SamplerConfigTest, ValidPersistentShuffle) {
  SamplerConfig c = SamplerConfig::PersistentShuffle(8, 2, 8);
  ASSERT_TRUE(ValidateConfig(c).ok());
  EXPECT_EQ(c.epochs(), 2.0);
  EXPECT_EQ(c.steps_per_epoch(), 4.0);
  EXPECT_EQ(IntegerEpochs(c), 2);
  EXPECT_EQ(IntegerStepsPerEpoch(c), 4);
}

TEST(SamplerConfigTest, RejectsNonIntegralStepsPerEpoch) {
  absl::Status s = ValidateConfig(SamplerConfig::PersistentShuffle(8, 3, 8));
  EXPECT_TRUE(IsError(s, ErrorKind::kInvalidConfig));
  EXPECT_NE(s.message().find("S"), absl::string_view::npos);
}

TEST(SamplerConfigTest, RejectsNonIntegralEpochs) {
  EXPECT_TRUE(IsError(ValidateConfig(SamplerConfig::DynamicShuffle(8, 2, 3)),
                      ErrorKind::kInvalidConfig));
}

TEST(SamplerConfigTest, RejectsBadSizes) {
  EXPECT_TRUE(IsError(ValidateConfig(SamplerConfig::Deterministic(4, 8, 2)),
                      ErrorKind::kInvalidConfig));
  EXPECT_TRUE(IsError(
      ValidateConfig(SamplerConfig::TruncatedPoisson(100, 10, 9, 5)),
      ErrorKind::kInvalidConfig));
  EXPECT_TRUE(IsError(ValidateConfig(SamplerConfig::Deterministic(4, 0, 2)),
                      ErrorKind::kInvalidConfig));
}

TEST(SamplerConfigTest, LargeTruncatedPoissonIsValid) {
  EXPECT_TRUE(ValidateConfig(SamplerConfig::TruncatedPoisson(
                                 46'000'000, 65536, 67642, 1234))
                  .ok());
  EXPECT_TRUE(ValidateConfig(SamplerConfig::TruncatedPoisson(
                                 1000, 10, std::nullopt, 7))
                  .ok());
}

TEST(SamplerConfigTest, ValidationIsPure) {
  SamplerConfig c = SamplerConfig::DynamicShuffle(12, 4, 6);
  const bool first = ValidateConfig(c).ok();
  for (int i = 0; i < 10; ++i) EXPECT_EQ(ValidateConfig(c).ok(), first);
}

TEST(SamplerConfigTest, BoundKinds) {
  EXPECT_EQ(BoundKindFor(SamplerKind::kDeterministic), BoundKind::kExact);
  EXPECT_EQ(BoundKindFor(SamplerKind::kTruncatedPoisson),
            BoundKind::kUpperBound);
  EXPECT_EQ(BoundKindFor(SamplerKind::kPersistentShuffle),
            BoundKind::kLowerBound);
  EXPECT_EQ(BoundKindFor(SamplerKind::kDynamicShuffle),
            BoundKind::kLowerBound);
}

TEST(SamplerConfigTest, ParsesNamesAndAliases) {
  EXPECT_EQ(*ParseSamplerKind("poisson"), SamplerKind::kTruncatedPoisson);
  EXPECT_EQ(*ParseSamplerKind("truncated-poisson"),
            SamplerKind::kTruncatedPoisson);
  EXPECT_EQ(*ParseSamplerKind("shuffle-dynamic"), SamplerKind::kDynamicShuffle);
  EXPECT_EQ(*ParseSamplerKind("persistent-shuffle"),
            SamplerKind::kPersistentShuffle);
  EXPECT_TRUE(IsError(ParseSamplerKind("bogus").status(),
                      ErrorKind::kParseError));
  for (SamplerKind k :
       {SamplerKind::kDeterministic, SamplerKind::kTruncatedPoisson,
        SamplerKind::kPersistentShuffle, SamplerKind::kDynamicShuffle}) {
    EXPECT_EQ(*ParseSamplerKind(SamplerKindName(k)), k);
  }
}

TEST(ErrorsTest, NamesRoundTrip) {
  absl::Status s = MakeError(ErrorKind::kBracketFailure, "x");
  EXPECT_EQ(ErrorName(s), "BracketFailure");
  EXPECT_TRUE(IsError(s, ErrorKind::kBracketFailure));
  EXPECT_FALSE(IsError(s, ErrorKind::kOverflow));
  EXPECT_FALSE(IsError(absl::OkStatus(), ErrorKind::kOverflow));
}

}  // namespace
}  // namespace ablq
