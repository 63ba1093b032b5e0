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

// Lower bounds on delta for ABLQ with shuffled batch samplers. Persistent
// shuffling is bounded through threshold events on the maximum coordinate of
// a Gaussian mixture; dynamic shuffling through a bucketized discrete pair
// composed once per epoch.

#ifndef ABLQ_SHUFFLE_LOWER_BOUNDS_H_
#define ABLQ_SHUFFLE_LOWER_BOUNDS_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "ablq/dominating_pair.h"
#include "ablq/privacy_loss_distribution.h"
#include "ablq/sampler_config.h"

namespace ablq {

// P = sum_s (1/S) N(shift_p e_s, sigma_eff^2 I),
// Q = sum_s (1/S) N(shift_q e_s, sigma_eff^2 I) on R^S.
struct ShuffleMixturePair {
  int64_t steps_per_epoch = 1;  // S
  double sigma_eff = 1.0;
  double shift_p = 2.0;
  double shift_q = 1.0;
};

enum class MixtureSide { kP, kQ };

// ln Pr[max_s w_s <= c] under the chosen side.
double LogMaxCdf(const ShuffleMixturePair& pair, double c, MixtureSide side);
// ln Pr[max_s w_s > c] under the chosen side.
double LogMaxExceedProb(const ShuffleMixturePair& pair, double c,
                        MixtureSide side);
// Pr[max_s w_s > c] = 1 - Phi((c - shift)/s) Phi(c/s)^(S-1).
double MaxExceedProb(const ShuffleMixturePair& pair, double c,
                     MixtureSide side);

struct ThresholdWitness {
  double delta = 0.0;
  double threshold = 0.0;
  // True when the complement event in the reverse order attains the bound.
  bool reverse_order = false;
};

// sup over c of max(P(G_c) - e^eps Q(G_c), Q(G_c^c) - e^eps P(G_c^c), 0) for
// G_c = {max > c}.
ThresholdWitness BestThresholdEvent(const ShuffleMixturePair& pair,
                                    double epsilon);

absl::StatusOr<DeltaResult> PersistentDeltaLower(const SamplerConfig& config,
                                                 double sigma, double epsilon);

// Cells {max <= c_1}, {c_1 < max <= c_2}, ..., {max > c_last}.
struct Bucketization {
  std::vector<double> thresholds;

  size_t cell_count() const { return thresholds.size() + 1; }
};

absl::Status ValidateBucketization(const Bucketization& buckets);

// Outer thresholds leave at most e^-41 of P mass beyond each end; interior
// thresholds sit on the lattice k * delta_bucket * sigma^2.
absl::StatusOr<Bucketization> ChooseThresholds(double sigma,
                                               int64_t steps_per_epoch,
                                               double delta_bucket);

// P-mass of the two outer cells, ln(P(G_0) + P(G_last)).
double LogOuterMass(double sigma, int64_t steps_per_epoch,
                    const Bucketization& buckets);

// Discrete pair of cell probabilities for a single epoch (sigma_eff = sigma).
// Cells whose Q-probability underflows are merged into a neighbour.
absl::StatusOr<DiscretePair> SingleEpochBucketPair(
    double sigma, int64_t steps_per_epoch, const Bucketization& buckets);

absl::StatusOr<DeltaResult> DynamicDeltaLower(const SamplerConfig& config,
                                              double sigma, double epsilon,
                                              const PldOptions& options = {});

}  // namespace ablq

#endif  // ABLQ_SHUFFLE_LOWER_BOUNDS_H_
