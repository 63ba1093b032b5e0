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

// Inversion of the accountants: noise calibration at fixed (eps, delta),
// epsilon at fixed (sigma, delta), and sweeps over batch size, epsilon or
// epochs.

#ifndef ABLQ_CALIBRATION_H_
#define ABLQ_CALIBRATION_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ablq/poisson_accounting.h"
#include "ablq/privacy_loss_distribution.h"
#include "ablq/sampler_config.h"

namespace ablq {

inline constexpr char kToolVersion[] = "0.1.0";

// delta(eps) for the sampler, labelled with its bound direction.
absl::StatusOr<DeltaResult> ComputeDelta(const SamplerConfig& config,
                                         double sigma, double epsilon,
                                         const PldOptions& options = {});

struct CalibrationOptions {
  double rel_tol = 1e-4;
  int max_iterations = 200;
  double sigma_min = 1e-3;
  PldOptions pld;
  // Locate the answer on a 10x coarser grid first, then refine on the
  // requested grid inside a narrow bracket.
  bool coarse_to_fine = true;
};

struct SigmaResult {
  double sigma = 0.0;
  BoundKind bound = BoundKind::kExact;
  // Lower-bound accountants give an optimistic (too small) sigma.
  bool optimistic = false;
  // delta(sigma_min) already meets the target; sigma is sigma_min.
  bool bracket_failure = false;
  int evaluations = 0;
};

// Smallest sigma with delta(sigma, eps) <= delta. Exact and upper-bound
// accountants return the upper end of the final bracket; lower-bound
// accountants return its midpoint.
absl::StatusOr<SigmaResult> CalibrateSigma(
    const SamplerConfig& config, double epsilon, double delta,
    const CalibrationOptions& options = {});

struct EpsilonResult {
  double epsilon = 0.0;
  BoundKind bound = BoundKind::kExact;
  int evaluations = 0;
};

// Smallest epsilon with delta(sigma, eps) <= delta, same conventions.
absl::StatusOr<EpsilonResult> EpsilonAtDelta(
    const SamplerConfig& config, double sigma, double delta,
    const CalibrationOptions& options = {});

enum class SweepAxis { kBatchSize, kEpsilon, kEpochs };

const char* SweepAxisName(SweepAxis axis);
absl::StatusOr<SweepAxis> ParseSweepAxis(absl::string_view name);

struct SweepScenario {
  int64_t dataset_size = 1 << 20;
  int64_t batch_size = 1 << 16;
  int64_t epochs = 1;
  double epsilon = 5.0;
  double delta = 2.7e-8;
  std::vector<SamplerKind> samplers = {
      SamplerKind::kDeterministic, SamplerKind::kTruncatedPoisson,
      SamplerKind::kPersistentShuffle, SamplerKind::kDynamicShuffle};
  double budget_fraction = kDefaultTruncationBudgetFraction;
  CalibrationOptions calibration;
  int threads = 0;  // 0: hardware concurrency
};

struct CurvePoint {
  SamplerConfig sampler;
  SweepAxis axis = SweepAxis::kEpsilon;
  double axis_value = 0.0;
  double sigma = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  BoundKind bound = BoundKind::kExact;
  bool optimistic = false;
  double grid_step = 0.0;
  absl::Status status;  // non-OK points carry their error
};

// Calibrates sigma for every (value, sampler) pair. Points are returned in
// value-major, sampler-minor order regardless of the thread count.
absl::StatusOr<std::vector<CurvePoint>> Sweep(SweepAxis axis,
                                              const std::vector<double>& values,
                                              const SweepScenario& base);

void WriteCurveCsv(const std::vector<CurvePoint>& points, std::ostream& out);
void WriteCurveJson(const std::vector<CurvePoint>& points, std::ostream& out);

}  // namespace ablq

#endif  // ABLQ_CALIBRATION_H_
