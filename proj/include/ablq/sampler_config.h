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

// Domain types shared by every accountant: privacy parameters, the sampler
// configuration tuple and the direction label attached to reported numbers.

#ifndef ABLQ_SAMPLER_CONFIG_H_
#define ABLQ_SAMPLER_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace ablq {

struct PrivacyParams {
  double epsilon = 0.0;  // nats
  double delta = 0.0;

  absl::Status Validate() const;
};

enum class SamplerKind {
  kDeterministic,
  kTruncatedPoisson,
  kPersistentShuffle,
  kDynamicShuffle,
};

// Which side of the true privacy curve a reported number lies on.
enum class BoundKind { kExact, kUpperBound, kLowerBound };

absl::string_view SamplerKindName(SamplerKind kind);
absl::StatusOr<SamplerKind> ParseSamplerKind(absl::string_view name);
absl::string_view BoundKindName(BoundKind bound);
BoundKind BoundKindFor(SamplerKind kind);

// The tuple (n, b, B, T) describing one batch sampler. `max_batch_size` is
// only meaningful for truncated Poisson sampling; std::nullopt means B is
// unbounded, i.e. plain Poisson subsampling.
struct SamplerConfig {
  SamplerKind kind = SamplerKind::kDeterministic;
  int64_t dataset_size = 0;  // n
  int64_t batch_size = 0;    // b (expected batch size for Poisson)
  std::optional<int64_t> max_batch_size;  // B
  int64_t steps = 0;                      // T

  static SamplerConfig Deterministic(int64_t n, int64_t b, int64_t steps);
  static SamplerConfig PersistentShuffle(int64_t n, int64_t b, int64_t steps);
  static SamplerConfig DynamicShuffle(int64_t n, int64_t b, int64_t steps);
  static SamplerConfig TruncatedPoisson(int64_t n, int64_t b,
                                        std::optional<int64_t> max_batch_size,
                                        int64_t steps);

  // E = bT/n. Integral for valid permutation samplers.
  double epochs() const;
  // S = n/b. Integral for valid permutation samplers.
  double steps_per_epoch() const;
  // q = b/n.
  double sampling_probability() const;

  bool is_permutation() const { return kind != SamplerKind::kTruncatedPoisson; }
  std::string DebugString() const;
};

// Accepts iff the configuration satisfies its sampler's validity rules.
// Fails with ErrorKind::kInvalidConfig naming the violated constraint.
absl::Status ValidateConfig(const SamplerConfig& config);

// Integer epochs / steps-per-epoch; only call on validated permutation configs.
int64_t IntegerEpochs(const SamplerConfig& config);
int64_t IntegerStepsPerEpoch(const SamplerConfig& config);

struct DeltaResult {
  double delta = 0.0;
  BoundKind bound = BoundKind::kExact;
};

}  // namespace ablq

#endif  // ABLQ_SAMPLER_CONFIG_H_
