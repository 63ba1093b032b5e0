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

#include "ablq/shuffle_lower_bounds.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "ablq/errors.h"
#include "ablq/numerics.h"
#include "ablq/status_macros.h"

namespace ablq {
namespace {

constexpr double kOuterLogMass = -41.0;
constexpr double kCancellationTolerance = 1e-12;
constexpr int kCoarseGridPoints = 201;
constexpr int kDenseGridPoints = 10000;
constexpr int64_t kMaxThresholds = int64_t{1} << 26;
const double kLogHalf = std::log(0.5);

double Shift(const ShuffleMixturePair& pair, MixtureSide side) {
  return side == MixtureSide::kP ? pair.shift_p : pair.shift_q;
}

// Event probabilities needed by both witness orders at one threshold.
struct EventLogs {
  double p_exceed;
  double q_exceed;
  double p_below;
  double q_below;
};

EventLogs EvaluateEvents(const ShuffleMixturePair& pair, double c) {
  return {LogMaxExceedProb(pair, c, MixtureSide::kP),
          LogMaxExceedProb(pair, c, MixtureSide::kQ),
          LogMaxCdf(pair, c, MixtureSide::kP),
          LogMaxCdf(pair, c, MixtureSide::kQ)};
}

// P(A) - e^eps Q(A) from logs; e^eps Q(A) never overflows into inf - inf.
double Divergence(double log_first, double log_second, double epsilon) {
  return std::exp(log_first) - std::exp(epsilon + log_second);
}

double ForwardObjective(const ShuffleMixturePair& pair, double c,
                        double epsilon) {
  const EventLogs e = EvaluateEvents(pair, c);
  return Divergence(e.p_exceed, e.q_exceed, epsilon);
}

double ReverseObjective(const ShuffleMixturePair& pair, double c,
                        double epsilon) {
  const EventLogs e = EvaluateEvents(pair, c);
  return Divergence(e.q_below, e.p_below, epsilon);
}

template <typename F>
std::pair<double, double> GoldenSectionMax(F f, double a, double b,
                                           double tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 500 && b - a > tolerance; ++iter) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

// Grid search followed by golden-section refinement around the best cell,
// plus a dense grid in case the objective is not unimodal.
template <typename F>
std::pair<double, double> MaximizeOverThreshold(F f, double lo, double hi,
                                                double tolerance) {
  double best_c = lo;
  double best_value = -kInfinity;
  int best_index = 0;
  const double coarse_step = (hi - lo) / (kCoarseGridPoints - 1);
  for (int i = 0; i < kCoarseGridPoints; ++i) {
    const double c = lo + i * coarse_step;
    const double value = f(c);
    if (value > best_value) {
      best_value = value;
      best_c = c;
      best_index = i;
    }
  }
  const double a = lo + std::max(0, best_index - 1) * coarse_step;
  const double b =
      lo + std::min(kCoarseGridPoints - 1, best_index + 1) * coarse_step;
  auto [c_refined, refined] = GoldenSectionMax(f, a, b, tolerance);
  if (refined > best_value) {
    best_value = refined;
    best_c = c_refined;
  }
  const double dense_step = (hi - lo) / (kDenseGridPoints - 1);
  for (int i = 0; i < kDenseGridPoints; ++i) {
    const double c = lo + i * dense_step;
    const double value = f(c);
    if (value > best_value) {
      best_value = value;
      best_c = c;
    }
  }
  return {best_c, best_value};
}

// Root of an increasing function g(c) = target, by bracketing and bisection.
template <typename G>
double SolveIncreasing(G g, double target, double start, double scale) {
  double lo = start;
  double hi = start;
  double step = scale;
  while (g(lo) > target) {
    lo -= step;
    step *= 2.0;
  }
  step = scale;
  while (g(hi) <= target) {
    hi += step;
    step *= 2.0;
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(lo));
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// ln(mass) of the cell between two thresholds given ln F and ln(1 - F) at
// both ends. Returns -inf for an empty cell.
absl::StatusOr<double> LogCellMass(double log_cdf_a, double log_cdf_b,
                                   double log_sf_a, double log_sf_b) {
  double head;
  double diff;
  if (log_cdf_b <= kLogHalf) {
    head = log_cdf_b;
    diff = log_cdf_a - log_cdf_b;
  } else {
    head = log_sf_a;
    diff = log_sf_b - log_sf_a;
  }
  if (diff < 0.0) return head + Log1mExp(diff);
  if (diff == 0.0) return -kInfinity;
  const double negative = std::exp(head) * std::expm1(diff);
  if (negative > kCancellationTolerance) {
    return MakeError(ErrorKind::kNumericalCancellation,
                     absl::StrCat("bucket mass ", -negative,
                                  " is below -1e-12"));
  }
  return -kInfinity;
}

}  // namespace

double LogMaxCdf(const ShuffleMixturePair& pair, double c, MixtureSide side) {
  const double s = pair.sigma_eff;
  double out = LogNormalCdf((c - Shift(pair, side)) / s);
  if (pair.steps_per_epoch > 1) {
    out += static_cast<double>(pair.steps_per_epoch - 1) * LogNormalCdf(c / s);
  }
  return out;
}

double LogMaxExceedProb(const ShuffleMixturePair& pair, double c,
                        MixtureSide side) {
  const double log_cdf = LogMaxCdf(pair, c, side);
  if (log_cdf < kLogHalf) return Log1mExp(log_cdf);
  const double s = pair.sigma_eff;
  const double others = static_cast<double>(pair.steps_per_epoch - 1);
  const double log_a = LogNormalSf((c - Shift(pair, side)) / s);
  const double log_b = pair.steps_per_epoch > 1 ? LogNormalSf(c / s)
                                                : -kInfinity;
  const double first_order =
      pair.steps_per_epoch > 1 ? LogAddExp(log_a, std::log(others) + log_b)
                               : log_a;
  // 1 - (1-a)(1-b)^(S-1) = a + (S-1) b up to a relative e^-40 here.
  if (first_order < -40.0) return first_order;
  double log_keep = std::log1p(-std::exp(log_a));
  if (pair.steps_per_epoch > 1) log_keep += others * std::log1p(-std::exp(log_b));
  return std::log(-std::expm1(log_keep));
}

double MaxExceedProb(const ShuffleMixturePair& pair, double c,
                     MixtureSide side) {
  return std::exp(LogMaxExceedProb(pair, c, side));
}

ThresholdWitness BestThresholdEvent(const ShuffleMixturePair& pair,
                                    double epsilon) {
  const double s = pair.sigma_eff;
  const double lo = std::min({0.0, pair.shift_p, pair.shift_q}) - 10.0 * s;
  const double hi = std::max({0.0, pair.shift_p, pair.shift_q}) + 10.0 * s;
  const double tolerance = 1e-9 * s;
  auto forward = MaximizeOverThreshold(
      [&](double c) { return ForwardObjective(pair, c, epsilon); }, lo, hi,
      tolerance);
  auto reverse = MaximizeOverThreshold(
      [&](double c) { return ReverseObjective(pair, c, epsilon); }, lo, hi,
      tolerance);
  ThresholdWitness witness;
  if (reverse.second > forward.second) {
    witness.delta = reverse.second;
    witness.threshold = reverse.first;
    witness.reverse_order = true;
  } else {
    witness.delta = forward.second;
    witness.threshold = forward.first;
  }
  witness.delta = std::clamp(witness.delta, 0.0, 1.0);
  return witness;
}

absl::StatusOr<DeltaResult> PersistentDeltaLower(const SamplerConfig& config,
                                                 double sigma,
                                                 double epsilon) {
  if (config.kind != SamplerKind::kPersistentShuffle) {
    return MakeError(ErrorKind::kInvalidConfig,
                     "persistent accounting needs a shuffle-persistent sampler");
  }
  ABLQ_RETURN_IF_ERROR(ValidateConfig(config));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return MakeError(ErrorKind::kInvalidArgument, "sigma must be > 0");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "epsilon must be finite and >= 0");
  }
  ShuffleMixturePair pair;
  pair.steps_per_epoch = IntegerStepsPerEpoch(config);
  pair.sigma_eff =
      sigma / std::sqrt(static_cast<double>(IntegerEpochs(config)));
  return DeltaResult{BestThresholdEvent(pair, epsilon).delta,
                     BoundKind::kLowerBound};
}

absl::Status ValidateBucketization(const Bucketization& buckets) {
  if (buckets.thresholds.empty()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "a bucketization needs at least one threshold");
  }
  for (size_t i = 0; i < buckets.thresholds.size(); ++i) {
    if (!std::isfinite(buckets.thresholds[i])) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "thresholds must be finite");
    }
    if (i > 0 && !(buckets.thresholds[i] > buckets.thresholds[i - 1])) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "thresholds must be strictly increasing");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Bucketization> ChooseThresholds(double sigma,
                                               int64_t steps_per_epoch,
                                               double delta_bucket) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return MakeError(ErrorKind::kInvalidArgument, "sigma must be > 0");
  }
  if (steps_per_epoch < 1) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "steps per epoch must be >= 1");
  }
  if (!(delta_bucket > 0.0)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "delta_bucket must be > 0");
  }
  ShuffleMixturePair pair{steps_per_epoch, sigma};
  const double gap = delta_bucket * sigma * sigma;
  const double c_low = SolveIncreasing(
      [&](double c) { return LogMaxCdf(pair, c, MixtureSide::kP); },
      kOuterLogMass, pair.shift_p, sigma);
  const double c_high = SolveIncreasing(
      [&](double c) { return -LogMaxExceedProb(pair, c, MixtureSide::kP); },
      -kOuterLogMass, pair.shift_p, sigma);
  const double k_low = std::floor(c_low / gap);
  const double k_high = std::ceil(c_high / gap);
  if (!(k_high > k_low)) {
    return MakeError(ErrorKind::kDegenerateRange,
                     "upper threshold does not exceed the lower threshold");
  }
  if (k_high - k_low + 1.0 > static_cast<double>(kMaxThresholds)) {
    return MakeError(ErrorKind::kOverflow,
                     absl::StrCat("bucketization needs ", k_high - k_low + 1.0,
                                  " thresholds"));
  }
  const int64_t first = static_cast<int64_t>(k_low);
  const int64_t count = static_cast<int64_t>(k_high - k_low) + 1;
  Bucketization buckets;
  buckets.thresholds.resize(static_cast<size_t>(count));
  for (int64_t i = 0; i < count; ++i) {
    buckets.thresholds[static_cast<size_t>(i)] =
        static_cast<double>(first + i) * gap;
  }
  return buckets;
}

double LogOuterMass(double sigma, int64_t steps_per_epoch,
                    const Bucketization& buckets) {
  ShuffleMixturePair pair{steps_per_epoch, sigma};
  return LogAddExp(
      LogMaxCdf(pair, buckets.thresholds.front(), MixtureSide::kP),
      LogMaxExceedProb(pair, buckets.thresholds.back(), MixtureSide::kP));
}

absl::StatusOr<DiscretePair> SingleEpochBucketPair(
    double sigma, int64_t steps_per_epoch, const Bucketization& buckets) {
  ABLQ_RETURN_IF_ERROR(ValidateBucketization(buckets));
  if (!(sigma > 0.0) || steps_per_epoch < 1) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "bucket pair needs sigma > 0 and S >= 1");
  }
  ShuffleMixturePair pair{steps_per_epoch, sigma};
  const std::vector<double>& c = buckets.thresholds;
  const size_t n = c.size();
  std::vector<double> cdf_p(n), sf_p(n), cdf_q(n), sf_q(n);
  for (size_t j = 0; j < n; ++j) {
    cdf_p[j] = LogMaxCdf(pair, c[j], MixtureSide::kP);
    sf_p[j] = LogMaxExceedProb(pair, c[j], MixtureSide::kP);
    cdf_q[j] = LogMaxCdf(pair, c[j], MixtureSide::kQ);
    sf_q[j] = LogMaxExceedProb(pair, c[j], MixtureSide::kQ);
  }

  std::vector<double> log_p;
  std::vector<double> log_q;
  log_p.reserve(n + 1);
  log_q.reserve(n + 1);
  double pending_p = -kInfinity;
  double pending_q = -kInfinity;
  auto push = [&](double lp, double lq) {
    pending_p = LogAddExp(pending_p, lp);
    pending_q = LogAddExp(pending_q, lq);
    if (pending_q > -kInfinity) {
      log_p.push_back(pending_p);
      log_q.push_back(pending_q);
      pending_p = -kInfinity;
      pending_q = -kInfinity;
    }
  };
  push(cdf_p[0], cdf_q[0]);
  for (size_t j = 1; j < n; ++j) {
    ABLQ_ASSIGN_OR_RETURN(
        double lp, LogCellMass(cdf_p[j - 1], cdf_p[j], sf_p[j - 1], sf_p[j]));
    ABLQ_ASSIGN_OR_RETURN(
        double lq, LogCellMass(cdf_q[j - 1], cdf_q[j], sf_q[j - 1], sf_q[j]));
    push(lp, lq);
  }
  push(sf_p[n - 1], sf_q[n - 1]);
  if (pending_p > -kInfinity) {
    if (log_p.empty()) {
      return MakeError(ErrorKind::kNumericalCancellation,
                       "every bucket has zero Q-probability");
    }
    log_p.back() = LogAddExp(log_p.back(), pending_p);
  }

  for (std::vector<double>* logs : {&log_p, &log_q}) {
    CompensatedSum total;
    for (double lm : *logs) total.Add(std::exp(lm));
    const double sum = total.Result();
    if (std::fabs(sum - 1.0) > kCancellationTolerance) {
      return MakeError(ErrorKind::kNumericalCancellation,
                       absl::StrCat("bucket masses sum to ", sum));
    }
    const double log_sum = std::log(sum);
    for (double& lm : *logs) lm -= log_sum;
  }
  return DiscretePair::CreateFromLogMasses(std::move(log_p), std::move(log_q));
}

absl::StatusOr<DeltaResult> DynamicDeltaLower(const SamplerConfig& config,
                                              double sigma, double epsilon,
                                              const PldOptions& options) {
  if (config.kind != SamplerKind::kDynamicShuffle) {
    return MakeError(ErrorKind::kInvalidConfig,
                     "dynamic accounting needs a shuffle-dynamic sampler");
  }
  ABLQ_RETURN_IF_ERROR(ValidateConfig(config));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return MakeError(ErrorKind::kInvalidArgument, "sigma must be > 0");
  }
  const int64_t s = IntegerStepsPerEpoch(config);
  ABLQ_ASSIGN_OR_RETURN(Bucketization buckets,
                        ChooseThresholds(sigma, s, options.grid_step));
  ABLQ_ASSIGN_OR_RETURN(DiscretePair pair,
                        SingleEpochBucketPair(sigma, s, buckets));
  ABLQ_ASSIGN_OR_RETURN(PairDeltaResult result,
                        PairDelta(pair, IntegerEpochs(config), epsilon,
                                  Rounding::kOptimistic, options));
  return DeltaResult{result.delta, BoundKind::kLowerBound};
}

}  // namespace ablq
