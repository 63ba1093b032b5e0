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

#include "ablq/sampler_config.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "ablq/errors.h"

namespace ablq {

absl::Status PrivacyParams::Validate() const {
  if (!(epsilon >= 0.0) || std::isinf(epsilon)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("epsilon must be finite and >= 0, got ",
                                  epsilon));
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("delta must lie in [0, 1], got ", delta));
  }
  return absl::OkStatus();
}

absl::string_view SamplerKindName(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kDeterministic:
      return "deterministic";
    case SamplerKind::kTruncatedPoisson:
      return "poisson";
    case SamplerKind::kPersistentShuffle:
      return "shuffle-persistent";
    case SamplerKind::kDynamicShuffle:
      return "shuffle-dynamic";
  }
  return "unknown";
}

absl::StatusOr<SamplerKind> ParseSamplerKind(absl::string_view name) {
  if (name == "deterministic") return SamplerKind::kDeterministic;
  if (name == "poisson" || name == "truncated-poisson") {
    return SamplerKind::kTruncatedPoisson;
  }
  if (name == "shuffle-persistent" || name == "persistent-shuffle") {
    return SamplerKind::kPersistentShuffle;
  }
  if (name == "shuffle-dynamic" || name == "dynamic-shuffle") {
    return SamplerKind::kDynamicShuffle;
  }
  return MakeError(ErrorKind::kParseError,
                   absl::StrCat("unknown sampler '", name, "'"));
}

absl::string_view BoundKindName(BoundKind bound) {
  switch (bound) {
    case BoundKind::kExact:
      return "exact";
    case BoundKind::kUpperBound:
      return "upper";
    case BoundKind::kLowerBound:
      return "lower";
  }
  return "unknown";
}

BoundKind BoundKindFor(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kDeterministic:
      return BoundKind::kExact;
    case SamplerKind::kTruncatedPoisson:
      return BoundKind::kUpperBound;
    case SamplerKind::kPersistentShuffle:
    case SamplerKind::kDynamicShuffle:
      return BoundKind::kLowerBound;
  }
  return BoundKind::kExact;
}

SamplerConfig SamplerConfig::Deterministic(int64_t n, int64_t b,
                                           int64_t steps) {
  return {SamplerKind::kDeterministic, n, b, std::nullopt, steps};
}

SamplerConfig SamplerConfig::PersistentShuffle(int64_t n, int64_t b,
                                               int64_t steps) {
  return {SamplerKind::kPersistentShuffle, n, b, std::nullopt, steps};
}

SamplerConfig SamplerConfig::DynamicShuffle(int64_t n, int64_t b,
                                            int64_t steps) {
  return {SamplerKind::kDynamicShuffle, n, b, std::nullopt, steps};
}

SamplerConfig SamplerConfig::TruncatedPoisson(
    int64_t n, int64_t b, std::optional<int64_t> max_batch_size,
    int64_t steps) {
  return {SamplerKind::kTruncatedPoisson, n, b, max_batch_size, steps};
}

double SamplerConfig::epochs() const {
  return static_cast<double>(batch_size) * static_cast<double>(steps) /
         static_cast<double>(dataset_size);
}

double SamplerConfig::steps_per_epoch() const {
  return static_cast<double>(dataset_size) / static_cast<double>(batch_size);
}

double SamplerConfig::sampling_probability() const {
  return static_cast<double>(batch_size) / static_cast<double>(dataset_size);
}

std::string SamplerConfig::DebugString() const {
  return absl::StrCat(
      SamplerKindName(kind), "(n=", dataset_size, ", b=", batch_size, ", B=",
      max_batch_size.has_value() ? absl::StrCat(*max_batch_size) : "inf",
      ", T=", steps, ")");
}

absl::Status ValidateConfig(const SamplerConfig& config) {
  const int64_t n = config.dataset_size;
  const int64_t b = config.batch_size;
  const int64_t t = config.steps;
  auto invalid = [&](absl::string_view what) {
    return MakeError(ErrorKind::kInvalidConfig,
                     absl::StrCat(what, " in ", config.DebugString()));
  };
  if (n < 1) return invalid("dataset size n must be positive");
  if (b < 1) return invalid("batch size b must be positive");
  if (t < 1) return invalid("step count T must be positive");
  if (b > n) return invalid("batch size b exceeds dataset size n (b > n)");
  if (config.kind == SamplerKind::kTruncatedPoisson) {
    if (config.max_batch_size.has_value() && *config.max_batch_size < b) {
      return invalid("max batch size B is below batch size b (B < b)");
    }
    return absl::OkStatus();
  }
  if (n % b != 0) {
    return invalid("steps per epoch S = n/b is not an integer");
  }
  // E = bT/n is an integer iff n divides b*T; with S = n/b integral this is
  // equivalent to S dividing T.
  if (t % (n / b) != 0) {
    return invalid("epochs E = bT/n is not an integer");
  }
  return absl::OkStatus();
}

int64_t IntegerEpochs(const SamplerConfig& config) {
  return config.steps / (config.dataset_size / config.batch_size);
}

int64_t IntegerStepsPerEpoch(const SamplerConfig& config) {
  return config.dataset_size / config.batch_size;
}

}  // namespace ablq
