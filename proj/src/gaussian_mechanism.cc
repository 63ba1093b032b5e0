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

#include "ablq/gaussian_mechanism.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "ablq/errors.h"
#include "ablq/numerics.h"
#include "ablq/status_macros.h"

namespace ablq {
namespace {

constexpr double kFlushToZero = 1e-320;

}  // namespace

absl::StatusOr<EffectiveGaussian> EffectiveGaussian::Create(double sigma_eff) {
  if (!(sigma_eff > 0.0)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("sigma_eff must be positive, got ",
                                  sigma_eff));
  }
  return EffectiveGaussian(sigma_eff);
}

absl::StatusOr<EffectiveGaussian> EffectiveGaussian::ForEpochs(double sigma,
                                                               int64_t epochs) {
  if (epochs < 1) {
    return MakeError(ErrorKind::kInvalidArgument, "epochs must be positive");
  }
  return Create(sigma / std::sqrt(static_cast<double>(epochs)));
}

double EffectiveGaussian::Delta(double epsilon) const {
  return GaussianDelta(sigma_eff_, epsilon);
}

double GaussianDelta(double sigma_eff, double epsilon) {
  if (!(sigma_eff > 0.0) || !(epsilon >= 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (std::isinf(sigma_eff) || std::isinf(epsilon)) return 0.0;
  const double shift = 0.5 / sigma_eff;
  const double log_first = LogNormalCdf(-sigma_eff * epsilon + shift);
  const double log_second = epsilon + LogNormalCdf(-sigma_eff * epsilon - shift);
  const double log_delta = LogSubExp(log_first, log_second);
  const double delta = std::exp(log_delta);
  if (!(delta >= kFlushToZero)) return 0.0;
  return std::fmin(delta, 1.0);
}

absl::StatusOr<DeltaResult> DeterministicDelta(const SamplerConfig& config,
                                               double sigma, double epsilon) {
  ABLQ_RETURN_IF_ERROR(ValidateConfig(config));
  if (config.kind != SamplerKind::kDeterministic) {
    return MakeError(ErrorKind::kInvalidConfig,
                     "deterministic accounting needs a deterministic sampler");
  }
  ABLQ_ASSIGN_OR_RETURN(EffectiveGaussian gaussian,
                        EffectiveGaussian::ForEpochs(sigma,
                                                     IntegerEpochs(config)));
  if (!(epsilon >= 0.0)) {
    return MakeError(ErrorKind::kInvalidArgument, "epsilon must be >= 0");
  }
  return DeltaResult{gaussian.Delta(epsilon), BoundKind::kExact};
}

}  // namespace ablq
