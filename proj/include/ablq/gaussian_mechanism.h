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

// Closed-form accounting for the deterministic (no subsampling) sampler.
// E epochs of the Gaussian mechanism compose to a single Gaussian mechanism
// with noise scale sigma / sqrt(E).

#ifndef ABLQ_GAUSSIAN_MECHANISM_H_
#define ABLQ_GAUSSIAN_MECHANISM_H_

#include "absl/status/statusor.h"
#include "ablq/sampler_config.h"

namespace ablq {

class EffectiveGaussian {
 public:
  static absl::StatusOr<EffectiveGaussian> Create(double sigma_eff);
  static absl::StatusOr<EffectiveGaussian> ForEpochs(double sigma,
                                                     int64_t epochs);

  double sigma_eff() const { return sigma_eff_; }

  double Delta(double epsilon) const;

 private:
  explicit EffectiveGaussian(double sigma_eff) : sigma_eff_(sigma_eff) {}
  double sigma_eff_;
};

// delta(eps) = Phi(-s*eps + 1/(2s)) - e^eps * Phi(-s*eps - 1/(2s)) for the
// pair (N(1, s^2), N(0, s^2)). The e^eps * Phi(.) product is formed in log
// space; results below 1e-320 are flushed to exactly 0. Returns NaN when
// sigma_eff <= 0 or epsilon < 0.
double GaussianDelta(double sigma_eff, double epsilon);

// delta for ABLQ with the deterministic sampler (exact).
absl::StatusOr<DeltaResult> DeterministicDelta(const SamplerConfig& config,
                                               double sigma, double epsilon);

}  // namespace ablq

#endif  // ABLQ_GAUSSIAN_MECHANISM_H_
