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

#include "ablq/calibration.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "ablq/errors.h"
#include "ablq/gaussian_mechanism.h"
#include "ablq/poisson_accounting.h"

namespace ablq {
namespace {

TEST(CalibrateSigmaTest, DeterministicRoundTrip) {
  const SamplerConfig c = SamplerConfig::Deterministic(100, 100, 1);
  for (double eps : {0.5, 1.0, 4.0}) {
    auto r = CalibrateSigma(c, eps, 1e-6);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r->bound, BoundKind::kExact);
    EXPECT_FALSE(r->optimistic);
    EXPECT_LE(GaussianDelta(r->sigma, eps), 1e-6);
    EXPECT_GT(GaussianDelta(r->sigma * (1 - 2e-4), eps), 1e-6);
  }
}

TEST(CalibrateSigmaTest, PoissonIsMinimal) {
  const SamplerConfig c =
      SamplerConfig::TruncatedPoisson(1000, 20, std::nullopt, 50);
  auto r = CalibrateSigma(c, 1.0, 1e-5);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->bound, BoundKind::kUpperBound);
  auto at = ComputeDelta(c, r->sigma, 1.0);
  auto below = ComputeDelta(c, r->sigma * (1 - 2e-4), 1.0);
  ASSERT_TRUE(at.ok() && below.ok());
  EXPECT_LE(at->delta, 1e-5);
  EXPECT_GT(below->delta, 1e-5);
}

TEST(CalibrateSigmaTest, LowerBoundIsOptimistic) {
  auto r = CalibrateSigma(SamplerConfig::PersistentShuffle(64, 4, 16), 1.0,
                          1e-5);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->bound, BoundKind::kLowerBound);
  EXPECT_TRUE(r->optimistic);
}

TEST(CalibrateSigmaTest, BracketFailureFlag) {
  auto r = CalibrateSigma(SamplerConfig::Deterministic(10, 10, 1), 6e5, 1e-6);
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r->bracket_failure);
  EXPECT_EQ(r->sigma, 1e-3);
}

TEST(CalibrateSigmaTest, RejectsBadTargets) {
  const SamplerConfig c = SamplerConfig::Deterministic(10, 10, 1);
  EXPECT_TRUE(IsError(CalibrateSigma(c, 1.0, 0.0).status(),
                      ErrorKind::kInvalidArgument));
  EXPECT_TRUE(IsError(CalibrateSigma(c, -1.0, 1e-6).status(),
                      ErrorKind::kInvalidArgument));
  EXPECT_TRUE(IsError(
      CalibrateSigma(SamplerConfig::Deterministic(10, 3, 1), 1.0, 1e-6)
          .status(),
      ErrorKind::kInvalidConfig));
}

TEST(CalibrateSigmaTest, IterationCapReportsNoConvergence) {
  CalibrationOptions options;
  options.max_iterations = 3;
  EXPECT_TRUE(IsError(CalibrateSigma(SamplerConfig::Deterministic(10, 10, 1),
                                     1.0, 1e-10, options)
                          .status(),
                      ErrorKind::kNoConvergence));
}

TEST(EpsilonAtDeltaTest, InvertsClosedForm) {
  const SamplerConfig c = SamplerConfig::Deterministic(10, 10, 1);
  auto zero = EpsilonAtDelta(c, 1.0, 0.38292492254802620728);
  ASSERT_TRUE(zero.ok());
  EXPECT_LT(zero->epsilon, 1e-4);
  auto r = EpsilonAtDelta(c, 1.0, 2.7e-8);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->epsilon, 5.5959175171199916414, 1e-4 * 5.6);
  EXPECT_GE(r->epsilon, 5.5959175171199916414);
}

TEST(EpsilonAtDeltaTest, RoundTripWithCalibration) {
  const SamplerConfig c =
      SamplerConfig::TruncatedPoisson(1000, 20, std::nullopt, 50);
  auto sigma = CalibrateSigma(c, 2.0, 1e-6);
  ASSERT_TRUE(sigma.ok());
  auto eps = EpsilonAtDelta(c, sigma->sigma, 1e-6);
  ASSERT_TRUE(eps.ok());
  EXPECT_NEAR(eps->epsilon, 2.0, 2e-3);
  EXPECT_LE(eps->epsilon, 2.0 * (1 + 1e-4));
}

TEST(EpsilonAtDeltaTest, NonincreasingInSigma) {
  const SamplerConfig c =
      SamplerConfig::TruncatedPoisson(1000, 10, std::nullopt, 100);
  double prev = 1e9;
  for (double sigma : {0.7, 0.9, 1.2, 1.6}) {
    auto r = EpsilonAtDelta(c, sigma, 1e-6);
    ASSERT_TRUE(r.ok());
    EXPECT_LE(r->epsilon, prev);
    prev = r->epsilon;
  }
}

double Sigma(const SamplerConfig& c, double eps, double delta) {
  auto r = CalibrateSigma(c, eps, delta);
  EXPECT_TRUE(r.ok()) << r.status();
  return r.ok() ? r->sigma : std::nan("");
}

TEST(CalibrateSigmaTest, DeterministicNeedsMostNoise) {
  const int64_t n = 4096, b = 256, steps = 16;
  const double eps = 1.0, delta = 1e-6;
  auto max_batch = ChooseMaxBatch(n, b, steps, eps, delta);
  ASSERT_TRUE(max_batch.ok());
  const double det = Sigma(SamplerConfig::Deterministic(n, b, steps), eps,
                           delta);
  const double poisson = Sigma(
      SamplerConfig::TruncatedPoisson(n, b, *max_batch, steps), eps, delta);
  const double dynamic =
      Sigma(SamplerConfig::DynamicShuffle(n, b, steps), eps, delta);
  const double persistent =
      Sigma(SamplerConfig::PersistentShuffle(n, b, steps), eps, delta);
  EXPECT_GE(det, dynamic);
  EXPECT_GE(det, poisson);
  EXPECT_GE(det, persistent);
}

TEST(CalibrateSigmaTest, PoissonBelowShuffleAtSmallBatch) {
  const int64_t n = 4096, b = 64, steps = 64;
  const double eps = 5.0, delta = 2.7e-8;
  auto max_batch = ChooseMaxBatch(n, b, steps, eps, delta);
  ASSERT_TRUE(max_batch.ok());
  const double poisson = Sigma(
      SamplerConfig::TruncatedPoisson(n, b, *max_batch, steps), eps, delta);
  const double dynamic =
      Sigma(SamplerConfig::DynamicShuffle(n, b, steps), eps, delta);
  EXPECT_LT(poisson, dynamic);
}

TEST(SweepAxisTest, Names) {
  for (SweepAxis a :
       {SweepAxis::kBatchSize, SweepAxis::kEpsilon, SweepAxis::kEpochs}) {
    EXPECT_EQ(*ParseSweepAxis(SweepAxisName(a)), a);
  }
  EXPECT_FALSE(ParseSweepAxis("sigma").ok());
}

SweepScenario SmallScenario() {
  SweepScenario s;
  s.dataset_size = 1024;
  s.batch_size = 64;
  s.epochs = 1;
  s.epsilon = 2.0;
  s.delta = 1e-6;
  s.threads = 3;
  return s;
}

TEST(SweepTest, SingleValueGivesOnePointPerSampler) {
  auto points = Sweep(SweepAxis::kEpsilon, {2.0}, SmallScenario());
  ASSERT_TRUE(points.ok());
  ASSERT_EQ(points->size(), 4u);
  EXPECT_EQ((*points)[0].sampler.kind, SamplerKind::kDeterministic);
  EXPECT_EQ((*points)[1].sampler.kind, SamplerKind::kTruncatedPoisson);
  EXPECT_TRUE((*points)[1].sampler.max_batch_size.has_value());
  EXPECT_EQ((*points)[3].bound, BoundKind::kLowerBound);
  EXPECT_TRUE((*points)[3].optimistic);
  for (const CurvePoint& p : *points) {
    ASSERT_TRUE(p.status.ok()) << p.status;
    auto d = ComputeDelta(p.sampler, p.sigma, p.epsilon);
    ASSERT_TRUE(d.ok());
    EXPECT_LE(d->delta, p.delta * (1 + 1e-3));
  }
}

TEST(SweepTest, ValueMajorOrderAndAxes) {
  SweepScenario s = SmallScenario();
  s.samplers = {SamplerKind::kDeterministic, SamplerKind::kTruncatedPoisson};
  auto points = Sweep(SweepAxis::kBatchSize, {32, 64, 128}, s);
  ASSERT_TRUE(points.ok());
  ASSERT_EQ(points->size(), 6u);
  for (size_t i = 0; i < 6; ++i) {
    EXPECT_EQ((*points)[i].axis_value, (std::vector<double>{32, 64, 128})[i / 2]);
    EXPECT_EQ((*points)[i].sampler.batch_size,
              static_cast<int64_t>((*points)[i].axis_value));
    EXPECT_EQ((*points)[i].sampler.kind, s.samplers[i % 2]);
  }
  auto epochs = Sweep(SweepAxis::kEpochs, {1, 2}, s);
  ASSERT_TRUE(epochs.ok());
  EXPECT_EQ((*epochs)[2].sampler.steps, 2 * 1024 / 64);
}

TEST(SweepTest, ErrorsAreRecordedPerPoint) {
  SweepScenario s = SmallScenario();
  s.samplers = {SamplerKind::kDeterministic};
  auto points = Sweep(SweepAxis::kBatchSize, {100, 64}, s);
  ASSERT_TRUE(points.ok());
  ASSERT_EQ(points->size(), 2u);
  EXPECT_TRUE(IsError((*points)[0].status, ErrorKind::kInvalidConfig));
  EXPECT_TRUE(std::isnan((*points)[0].sigma));
  EXPECT_TRUE((*points)[1].status.ok());
  std::ostringstream csv;
  WriteCurveCsv(*points, csv);
  EXPECT_NE(csv.str().find(",nan,error:InvalidConfig,"), std::string::npos);
}

TEST(SweepTest, CsvIsDeterministicAcrossThreadCounts) {
  SweepScenario s = SmallScenario();
  std::string first;
  for (int threads : {1, 4}) {
    s.threads = threads;
    auto points = Sweep(SweepAxis::kEpsilon, {1.0, 3.0}, s);
    ASSERT_TRUE(points.ok());
    std::ostringstream csv;
    WriteCurveCsv(*points, csv);
    if (first.empty()) {
      first = csv.str();
    } else {
      EXPECT_EQ(csv.str(), first);
    }
  }
  EXPECT_EQ(first.rfind("# ablq-accounting 0.1.0\n"
                        "sampler,axis,axis_value,epsilon,delta,sigma,"
                        "bound_kind,max_batch_B,grid_step\n",
                        0),
            0u);
  EXPECT_NE(first.find("deterministic,epsilon,1,1.00000000e+00,"),
            std::string::npos);
}

TEST(SweepTest, JsonMirror) {
  SweepScenario s = SmallScenario();
  s.samplers = {SamplerKind::kPersistentShuffle};
  auto points = Sweep(SweepAxis::kEpsilon, {1.0}, s);
  ASSERT_TRUE(points.ok());
  std::ostringstream json;
  WriteCurveJson(*points, json);
  EXPECT_NE(json.str().find("\"bound_kind\": \"lower\""), std::string::npos);
  EXPECT_NE(json.str().find("\"optimistic\": true"), std::string::npos);
  EXPECT_NE(json.str().find("\"version\": \"0.1.0\""), std::string::npos);
}

TEST(SweepTest, RejectsEmptyValues) {
  EXPECT_FALSE(Sweep(SweepAxis::kEpsilon, {}, SmallScenario()).ok());
}

}  // namespace
}  // namespace ablq
