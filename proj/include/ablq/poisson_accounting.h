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

// Upper-bound accounting for truncated Poisson subsampling: the binomial
// tail probability that a batch overflows B, the total-variation correction
// for truncation, and the choice of B for a given budget.

#ifndef ABLQ_POISSON_ACCOUNTING_H_
#define ABLQ_POISSON_ACCOUNTING_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "ablq/privacy_loss_distribution.h"
#include "ablq/sampler_config.h"

namespace ablq {

inline constexpr double kDefaultTruncationBudgetFraction = 1e-5;

// Pr[Bin(n, p) > max_batch_size]. Returns 0 when max_batch_size >= n or
// p == 0, 1 when max_batch_size < 0.
double BinomialTail(int64_t n, double p, int64_t max_batch_size);

// Natural log of BinomialTail; stays finite below the double range.
double LogBinomialTail(int64_t n, double p, int64_t max_batch_size);

struct TruncationBudget {
  double budget_fraction = kDefaultTruncationBudgetFraction;
  double psi = 0.0;         // Pr[Bin(n, b/n) > B]
  double correction = 0.0;  // T * (1 + e^eps) * psi
};

TruncationBudget ComputeTruncationBudget(const SamplerConfig& config,
                                         double epsilon);

struct TruncatedPoissonBreakdown {
  double delta = 0.0;      // min(1, pld_delta + correction)
  double pld_delta = 0.0;  // Poisson subsampling part
  TruncationBudget truncation;
};

// Upper bound on delta(eps) for ABLQ with truncated Poisson sampling.
absl::StatusOr<TruncatedPoissonBreakdown> TruncatedPoissonDeltaBreakdown(
    const SamplerConfig& config, double sigma, double epsilon,
    const PldOptions& options = {});

absl::StatusOr<DeltaResult> TruncatedPoissonDelta(
    const SamplerConfig& config, double sigma, double epsilon,
    const PldOptions& options = {});

// Smallest B >= b with Psi(n, b, B) * T * (1 + e^eps) <= budget_fraction *
// delta.
absl::StatusOr<int64_t> ChooseMaxBatch(
    int64_t n, int64_t b, int64_t steps, double epsilon, double delta,
    double budget_fraction = kDefaultTruncationBudgetFraction);

}  // namespace ablq

#endif  // ABLQ_POISSON_ACCOUNTING_H_
