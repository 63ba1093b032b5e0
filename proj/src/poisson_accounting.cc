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

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "ablq/errors.h"
#include "ablq/numerics.h"
#include "ablq/status_macros.h"
#include "boost/math/special_functions/beta.hpp"

namespace ablq {
namespace {

// Below this the incomplete beta result is too close to underflow to take
// its log.
constexpr double kSmallestReliableTail = 1e-290;

double LogBinomialPmf(int64_t n, int64_t k, double log_p, double log1m_p) {
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) -
         std::lgamma(nn - kk + 1.0) + kk * log_p + (nn - kk) * log1m_p;
}

// log sum_{k > B} pmf(k); used only deep in the upper tail, where terms
// decrease geometrically.
double LogTailBySummation(int64_t n, double p, int64_t max_batch_size) {
  const double log_p = std::log(p);
  const double log1m_p = std::log1p(-p);
  const double first = LogBinomialPmf(n, max_batch_size + 1, log_p, log1m_p);
  CompensatedSum sum;
  for (int64_t k = max_batch_size + 1; k <= n; ++k) {
    const double term =
        std::exp(LogBinomialPmf(n, k, log_p, log1m_p) - first);
    sum.Add(term);
    if (term < 1e-18 * sum.Result()) break;
  }
  return first + std::log(sum.Result());
}

bool Feasible(double log_psi, double log_factor, double log_budget) {
  return log_psi + log_factor <= log_budget;
}

}  // namespace

double BinomialTail(int64_t n, double p, int64_t max_batch_size) {
  if (max_batch_size < 0) return 1.0;
  if (max_batch_size >= n || p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  // Pr[X > B] = I_p(B + 1, n - B).
  return boost::math::ibeta(static_cast<double>(max_batch_size + 1),
                            static_cast<double>(n - max_batch_size), p);
}

double LogBinomialTail(int64_t n, double p, int64_t max_batch_size) {
  const double psi = BinomialTail(n, p, max_batch_size);
  if (psi >= kSmallestReliableTail || psi == 1.0) return std::log(psi);
  if (max_batch_size >= n || p <= 0.0) return -kInfinity;
  return LogTailBySummation(n, p, max_batch_size);
}

TruncationBudget ComputeTruncationBudget(const SamplerConfig& config,
                                         double epsilon) {
  TruncationBudget budget;
  if (!config.max_batch_size.has_value()) return budget;
  budget.psi = BinomialTail(config.dataset_size, config.sampling_probability(),
                            *config.max_batch_size);
  budget.correction = static_cast<double>(config.steps) *
                      (1.0 + std::exp(epsilon)) * budget.psi;
  return budget;
}

absl::StatusOr<TruncatedPoissonBreakdown> TruncatedPoissonDeltaBreakdown(
    const SamplerConfig& config, double sigma, double epsilon,
    const PldOptions& options) {
  if (config.kind != SamplerKind::kTruncatedPoisson) {
    return MakeError(ErrorKind::kInvalidConfig,
                     "truncated Poisson accounting needs a poisson sampler");
  }
  ABLQ_RETURN_IF_ERROR(ValidateConfig(config));
  if (!(sigma > 0.0)) {
    return MakeError(ErrorKind::kInvalidArgument, "sigma must be > 0");
  }
  SubsampledGaussianPair pair{config.sampling_probability(), sigma,
                              SubsamplingDirection::kRemove};
  ABLQ_ASSIGN_OR_RETURN(
      PairDeltaResult pld,
      PairDelta(pair, config.steps, epsilon, Rounding::kPessimistic, options));
  TruncatedPoissonBreakdown out;
  out.pld_delta = pld.delta;
  out.truncation = ComputeTruncationBudget(config, epsilon);
  out.delta = std::min(1.0, out.pld_delta + out.truncation.correction);
  return out;
}

absl::StatusOr<DeltaResult> TruncatedPoissonDelta(const SamplerConfig& config,
                                                  double sigma, double epsilon,
                                                  const PldOptions& options) {
  ABLQ_ASSIGN_OR_RETURN(
      TruncatedPoissonBreakdown breakdown,
      TruncatedPoissonDeltaBreakdown(config, sigma, epsilon, options));
  return DeltaResult{breakdown.delta, BoundKind::kUpperBound};
}

absl::StatusOr<int64_t> ChooseMaxBatch(int64_t n, int64_t b, int64_t steps,
                                       double epsilon, double delta,
                                       double budget_fraction) {
  if (n < 1 || b < 1 || b > n || steps < 1) {
    return MakeError(ErrorKind::kInvalidConfig,
                     "choose_max_batch needs 1 <= b <= n and T >= 1");
  }
  if (!(delta > 0.0 && delta <= 1.0)) {
    return MakeError(ErrorKind::kInvalidArgument, "delta must lie in (0, 1]");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "epsilon must be finite and >= 0");
  }
  if (!(budget_fraction > 0.0 && budget_fraction <= 1.0)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "budget_fraction must lie in (0, 1]");
  }
  const double p = static_cast<double>(b) / static_cast<double>(n);
  const double log_factor =
      std::log(static_cast<double>(steps)) + LogAddExp(0.0, epsilon);
  const double log_budget = std::log(budget_fraction) + std::log(delta);
  auto feasible = [&](int64_t max_batch) {
    return Feasible(LogBinomialTail(n, p, max_batch), log_factor, log_budget);
  };

  if (feasible(b)) return b;
  // Exponential bracket: lo infeasible, hi feasible.
  int64_t lo = b;
  int64_t width = 1;
  int64_t hi = std::min(n, b + width);
  while (!feasible(hi)) {
    if (hi == n) {
      return MakeError(ErrorKind::kInfeasible,
                       absl::StrCat("no B <= n=", n, " meets the budget"));
    }
    lo = hi;
    width *= 2;
    hi = std::min(n, b + width);
  }
  while (hi - lo > 1) {
    const int64_t mid = lo + (hi - lo) / 2;
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace ablq
