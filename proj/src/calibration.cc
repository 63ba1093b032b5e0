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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ablq/errors.h"
#include "ablq/gaussian_mechanism.h"
#include "ablq/shuffle_lower_bounds.h"
#include "ablq/status_macros.h"
#include "nlohmann/json.hpp"

namespace ablq {
namespace {

constexpr double kCoarseFactor = 10.0;
constexpr double kCoarseRelTol = 1e-3;
constexpr double kRefineWidth = 0.01;
constexpr double kMaxEpsilon = 1e5;

bool UsesPld(SamplerKind kind) {
  return kind == SamplerKind::kTruncatedPoisson ||
         kind == SamplerKind::kDynamicShuffle;
}

absl::Status CheckTarget(double delta, const CalibrationOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return MakeError(ErrorKind::kInvalidArgument, "delta must lie in (0, 1)");
  }
  if (!(options.rel_tol > 0.0 && options.rel_tol < 1.0)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "rel_tol must lie in (0, 1)");
  }
  if (options.max_iterations < 1) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "max_iterations must be >= 1");
  }
  return absl::OkStatus();
}

// Root search for a function f that is decreasing in its argument. Tracks
// lo with f(lo) > target and hi with f(hi) <= target.
class DecreasingSearch {
 public:
  DecreasingSearch(std::function<absl::StatusOr<double>(double)> f,
                   double target, int max_iterations)
      : f_(std::move(f)), target_(target), max_iterations_(max_iterations) {}

  // True when f(x) <= target.
  absl::StatusOr<bool> Satisfied(double x) {
    if (++evaluations_ > max_iterations_) {
      return MakeError(ErrorKind::kNoConvergence,
                       absl::StrCat("no convergence after ", max_iterations_,
                                    " evaluations"));
    }
    ABLQ_ASSIGN_OR_RETURN(double value, f_(x));
    if (std::isnan(value)) {
      return MakeError(ErrorKind::kNoConvergence,
                       absl::StrCat("accountant returned NaN at ", x));
    }
    return value <= target_;
  }

  // Shrinks [lo, hi] until hi - lo <= rel_tol * hi.
  absl::Status Bisect(double& lo, double& hi, double rel_tol) {
    while (hi - lo > rel_tol * hi) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      ABLQ_ASSIGN_OR_RETURN(bool ok, Satisfied(mid));
      (ok ? hi : lo) = mid;
    }
    return absl::OkStatus();
  }

  int evaluations() const { return evaluations_; }

 private:
  std::function<absl::StatusOr<double>(double)> f_;
  double target_;
  int max_iterations_;
  int evaluations_ = 0;
};

struct SigmaBracket {
  double lo = 0.0;
  double hi = 0.0;
  bool trivial = false;
};

// Exponential bracketing from sigma = 1.
absl::StatusOr<SigmaBracket> BracketSigma(DecreasingSearch& search,
                                          double sigma_min) {
  SigmaBracket b;
  ABLQ_ASSIGN_OR_RETURN(bool at_one, search.Satisfied(1.0));
  if (!at_one) {
    b.lo = 1.0;
    b.hi = 2.0;
    while (true) {
      ABLQ_ASSIGN_OR_RETURN(bool ok, search.Satisfied(b.hi));
      if (ok) break;
      b.lo = b.hi;
      b.hi *= 2.0;
    }
    return b;
  }
  b.hi = 1.0;
  b.lo = 0.5;
  while (true) {
    if (b.lo <= sigma_min) {
      ABLQ_ASSIGN_OR_RETURN(bool ok, search.Satisfied(sigma_min));
      if (ok) {
        b.lo = b.hi = sigma_min;
        b.trivial = true;
        return b;
      }
      b.lo = sigma_min;
      return b;
    }
    ABLQ_ASSIGN_OR_RETURN(bool ok, search.Satisfied(b.lo));
    if (!ok) return b;
    b.hi = b.lo;
    b.lo *= 0.5;
  }
}

// Widens [guess / (1 + w), guess * (1 + w)] until it brackets the root.
absl::StatusOr<SigmaBracket> BracketAround(DecreasingSearch& search,
                                           double guess, double sigma_min) {
  double factor = 1.0 + kRefineWidth;
  SigmaBracket b{std::max(sigma_min, guess / factor), guess * factor, false};
  while (true) {
    ABLQ_ASSIGN_OR_RETURN(bool ok, search.Satisfied(b.hi));
    if (ok) break;
    b.lo = b.hi;
    factor *= factor;
    b.hi *= factor;
  }
  factor = 1.0 + kRefineWidth;
  while (true) {
    ABLQ_ASSIGN_OR_RETURN(bool ok, search.Satisfied(b.lo));
    if (!ok) return b;
    if (b.lo <= sigma_min) {
      b.hi = b.lo = sigma_min;
      b.trivial = true;
      return b;
    }
    b.hi = b.lo;
    factor *= factor;
    b.lo = std::max(sigma_min, b.lo / factor);
  }
}

absl::StatusOr<SigmaResult> CalibrateOnGrid(const SamplerConfig& config,
                                            double epsilon, double delta,
                                            const CalibrationOptions& options,
                                            double rel_tol,
                                            std::optional<double> guess) {
  DecreasingSearch search(
      [&](double sigma) -> absl::StatusOr<double> {
        ABLQ_ASSIGN_OR_RETURN(DeltaResult r,
                              ComputeDelta(config, sigma, epsilon, options.pld));
        return r.delta;
      },
      delta, options.max_iterations);
  SigmaBracket bracket;
  if (guess.has_value()) {
    ABLQ_ASSIGN_OR_RETURN(bracket,
                          BracketAround(search, *guess, options.sigma_min));
  } else {
    ABLQ_ASSIGN_OR_RETURN(bracket, BracketSigma(search, options.sigma_min));
  }
  SigmaResult result;
  result.bound = BoundKindFor(config.kind);
  result.optimistic = result.bound == BoundKind::kLowerBound;
  if (bracket.trivial) {
    result.sigma = options.sigma_min;
    result.bracket_failure = true;
  } else {
    ABLQ_RETURN_IF_ERROR(search.Bisect(bracket.lo, bracket.hi, rel_tol));
    result.sigma = result.bound == BoundKind::kLowerBound
                       ? 0.5 * (bracket.lo + bracket.hi)
                       : bracket.hi;
  }
  result.evaluations = search.evaluations();
  return result;
}

absl::StatusOr<EpsilonResult> EpsilonOnGrid(const SamplerConfig& config,
                                            double sigma, double delta,
                                            const CalibrationOptions& options,
                                            double rel_tol,
                                            std::optional<double> guess) {
  DecreasingSearch search(
      [&](double epsilon) -> absl::StatusOr<double> {
        ABLQ_ASSIGN_OR_RETURN(DeltaResult r,
                              ComputeDelta(config, sigma, epsilon, options.pld));
        return r.delta;
      },
      delta, options.max_iterations);
  EpsilonResult result;
  result.bound = BoundKindFor(config.kind);
  double lo = 0.0;
  double hi = 1.0;
  if (guess.has_value()) {
    lo = std::max(0.0, *guess * (1.0 - kRefineWidth) - 1e-6);
    hi = *guess * (1.0 + kRefineWidth) + 1e-6;
  }
  ABLQ_ASSIGN_OR_RETURN(bool at_lo, search.Satisfied(lo));
  while (at_lo && lo > 0.0) {
    const double width = hi - lo;
    hi = lo;
    lo = std::max(0.0, lo - 2.0 * width);
    ABLQ_ASSIGN_OR_RETURN(at_lo, search.Satisfied(lo));
  }
  if (at_lo) {
    result.epsilon = 0.0;
    result.evaluations = search.evaluations();
    return result;
  }
  while (true) {
    ABLQ_ASSIGN_OR_RETURN(bool ok, search.Satisfied(hi));
    if (ok) break;
    if (hi > kMaxEpsilon) {
      return MakeError(ErrorKind::kBracketFailure,
                       "delta target not reached for any finite epsilon");
    }
    const double width = hi - lo;
    lo = hi;
    hi += 2.0 * width;
  }
  ABLQ_RETURN_IF_ERROR(search.Bisect(lo, hi, rel_tol));
  result.epsilon =
      result.bound == BoundKind::kLowerBound ? 0.5 * (lo + hi) : hi;
  result.evaluations = search.evaluations();
  return result;
}

CalibrationOptions Coarsened(const CalibrationOptions& options) {
  CalibrationOptions coarse = options;
  coarse.pld.grid_step = options.pld.grid_step * kCoarseFactor;
  return coarse;
}

bool CanCoarsen(const SamplerConfig& config,
                const CalibrationOptions& options) {
  return options.coarse_to_fine && UsesPld(config.kind) &&
         options.pld.grid_step * kCoarseFactor <= 0.1;
}

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  return absl::StrFormat("%.8e", value);
}

}  // namespace

absl::StatusOr<DeltaResult> ComputeDelta(const SamplerConfig& config,
                                         double sigma, double epsilon,
                                         const PldOptions& options) {
  switch (config.kind) {
    case SamplerKind::kDeterministic:
      return DeterministicDelta(config, sigma, epsilon);
    case SamplerKind::kTruncatedPoisson:
      return TruncatedPoissonDelta(config, sigma, epsilon, options);
    case SamplerKind::kPersistentShuffle:
      return PersistentDeltaLower(config, sigma, epsilon);
    case SamplerKind::kDynamicShuffle:
      return DynamicDeltaLower(config, sigma, epsilon, options);
  }
  return MakeError(ErrorKind::kInvalidConfig, "unknown sampler kind");
}

absl::StatusOr<SigmaResult> CalibrateSigma(const SamplerConfig& config,
                                           double epsilon, double delta,
                                           const CalibrationOptions& options) {
  ABLQ_RETURN_IF_ERROR(ValidateConfig(config));
  ABLQ_RETURN_IF_ERROR(CheckTarget(delta, options));
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "epsilon must be finite and >= 0");
  }
  if (!CanCoarsen(config, options)) {
    return CalibrateOnGrid(config, epsilon, delta, options, options.rel_tol,
                           std::nullopt);
  }
  ABLQ_ASSIGN_OR_RETURN(
      SigmaResult coarse,
      CalibrateOnGrid(config, epsilon, delta, Coarsened(options),
                      std::max(options.rel_tol, kCoarseRelTol), std::nullopt));
  std::optional<double> guess;
  if (!coarse.bracket_failure) guess = coarse.sigma;
  ABLQ_ASSIGN_OR_RETURN(SigmaResult fine,
                        CalibrateOnGrid(config, epsilon, delta, options,
                                        options.rel_tol, guess));
  fine.evaluations += coarse.evaluations;
  return fine;
}

absl::StatusOr<EpsilonResult> EpsilonAtDelta(const SamplerConfig& config,
                                             double sigma, double delta,
                                             const CalibrationOptions& options) {
  ABLQ_RETURN_IF_ERROR(ValidateConfig(config));
  ABLQ_RETURN_IF_ERROR(CheckTarget(delta, options));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return MakeError(ErrorKind::kInvalidArgument, "sigma must be > 0");
  }
  if (!CanCoarsen(config, options)) {
    return EpsilonOnGrid(config, sigma, delta, options, options.rel_tol,
                         std::nullopt);
  }
  ABLQ_ASSIGN_OR_RETURN(
      EpsilonResult coarse,
      EpsilonOnGrid(config, sigma, delta, Coarsened(options),
                    std::max(options.rel_tol, kCoarseRelTol), std::nullopt));
  ABLQ_ASSIGN_OR_RETURN(EpsilonResult fine,
                        EpsilonOnGrid(config, sigma, delta, options,
                                      options.rel_tol, coarse.epsilon));
  fine.evaluations += coarse.evaluations;
  return fine;
}

const char* SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kBatchSize:
      return "batch-size";
    case SweepAxis::kEpsilon:
      return "epsilon";
    case SweepAxis::kEpochs:
      return "epochs";
  }
  return "unknown";
}

absl::StatusOr<SweepAxis> ParseSweepAxis(absl::string_view name) {
  if (name == "batch-size" || name == "batch_size") return SweepAxis::kBatchSize;
  if (name == "epsilon") return SweepAxis::kEpsilon;
  if (name == "epochs") return SweepAxis::kEpochs;
  return MakeError(ErrorKind::kInvalidArgument,
                   absl::StrCat("unknown sweep axis '", name, "'"));
}

namespace {

absl::StatusOr<int64_t> IntegralValue(double value, absl::string_view what) {
  if (!(value >= 1.0) || value != std::floor(value) || value > 9e15) {
    return MakeError(ErrorKind::kInvalidConfig,
                     absl::StrCat(what, " must be a positive integer, got ",
                                  value));
  }
  return static_cast<int64_t>(value);
}

void EvaluatePoint(const SweepScenario& base, CurvePoint& point) {
  const SamplerKind kind = point.sampler.kind;
  int64_t n = base.dataset_size;
  int64_t b = base.batch_size;
  int64_t epochs = base.epochs;
  point.epsilon = base.epsilon;
  point.delta = base.delta;
  point.bound = BoundKindFor(kind);
  point.optimistic = point.bound == BoundKind::kLowerBound;
  point.grid_step = base.calibration.pld.grid_step;
  point.sigma = std::nan("");
  auto fail = [&](absl::Status status) { point.status = std::move(status); };

  switch (point.axis) {
    case SweepAxis::kBatchSize: {
      auto v = IntegralValue(point.axis_value, "batch size");
      if (!v.ok()) return fail(v.status());
      b = *v;
      break;
    }
    case SweepAxis::kEpochs: {
      auto v = IntegralValue(point.axis_value, "epochs");
      if (!v.ok()) return fail(v.status());
      epochs = *v;
      break;
    }
    case SweepAxis::kEpsilon:
      point.epsilon = point.axis_value;
      break;
  }
  if (b < 1 || b > n || (epochs * n) % b != 0) {
    return fail(MakeError(ErrorKind::kInvalidConfig,
                          absl::StrCat("E * n / b must be an integer (n=", n,
                                       ", b=", b, ", E=", epochs, ")")));
  }
  const int64_t steps = epochs * n / b;
  SamplerConfig config;
  switch (kind) {
    case SamplerKind::kDeterministic:
      config = SamplerConfig::Deterministic(n, b, steps);
      break;
    case SamplerKind::kPersistentShuffle:
      config = SamplerConfig::PersistentShuffle(n, b, steps);
      break;
    case SamplerKind::kDynamicShuffle:
      config = SamplerConfig::DynamicShuffle(n, b, steps);
      break;
    case SamplerKind::kTruncatedPoisson: {
      auto max_batch = ChooseMaxBatch(n, b, steps, point.epsilon, point.delta,
                                      base.budget_fraction);
      if (!max_batch.ok()) return fail(max_batch.status());
      config = SamplerConfig::TruncatedPoisson(n, b, *max_batch, steps);
      break;
    }
  }
  point.sampler = config;
  auto sigma = CalibrateSigma(config, point.epsilon, point.delta,
                              base.calibration);
  if (!sigma.ok()) return fail(sigma.status());
  if (sigma->bracket_failure) {
    return fail(MakeError(ErrorKind::kBracketFailure,
                          "target already met at the smallest sigma"));
  }
  point.sigma = sigma->sigma;
}

}  // namespace

absl::StatusOr<std::vector<CurvePoint>> Sweep(SweepAxis axis,
                                              const std::vector<double>& values,
                                              const SweepScenario& base) {
  if (values.empty()) {
    return MakeError(ErrorKind::kInvalidArgument, "sweep needs values");
  }
  if (base.samplers.empty()) {
    return MakeError(ErrorKind::kInvalidArgument, "sweep needs samplers");
  }
  std::vector<CurvePoint> points;
  points.reserve(values.size() * base.samplers.size());
  for (double value : values) {
    for (SamplerKind kind : base.samplers) {
      CurvePoint point;
      point.axis = axis;
      point.axis_value = value;
      point.sampler.kind = kind;
      point.sampler.dataset_size = base.dataset_size;
      point.sampler.batch_size = base.batch_size;
      points.push_back(std::move(point));
    }
  }
  int threads = base.threads > 0
                    ? base.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(points.size()));
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next++; i < points.size(); i = next++) {
      EvaluatePoint(base, points[i]);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return points;
}

namespace {

std::string BoundColumn(const CurvePoint& p) {
  if (!p.status.ok()) return absl::StrCat("error:", ErrorName(p.status));
  return std::string(BoundKindName(p.bound));
}

std::string MaxBatchColumn(const CurvePoint& p) {
  if (p.sampler.kind != SamplerKind::kTruncatedPoisson ||
      !p.sampler.max_batch_size.has_value()) {
    return "";
  }
  return absl::StrCat(*p.sampler.max_batch_size);
}

}  // namespace

void WriteCurveCsv(const std::vector<CurvePoint>& points, std::ostream& out) {
  out << "# ablq-accounting " << kToolVersion << "\n";
  out << "sampler,axis,axis_value,epsilon,delta,sigma,bound_kind,max_batch_B,"
         "grid_step\n";
  for (const CurvePoint& p : points) {
    out << SamplerKindName(p.sampler.kind) << ',' << SweepAxisName(p.axis)
        << ',' << absl::StrFormat("%.9g", p.axis_value) << ','
        << FormatNumber(p.epsilon) << ',' << FormatNumber(p.delta) << ','
        << FormatNumber(p.status.ok() ? p.sigma : std::nan("")) << ','
        << BoundColumn(p) << ',' << MaxBatchColumn(p) << ','
        << FormatNumber(p.grid_step) << '\n';
  }
}

void WriteCurveJson(const std::vector<CurvePoint>& points, std::ostream& out) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const CurvePoint& p : points) {
    nlohmann::ordered_json row;
    row["sampler"] = std::string(SamplerKindName(p.sampler.kind));
    row["axis"] = SweepAxisName(p.axis);
    row["axis_value"] = p.axis_value;
    row["epsilon"] = p.epsilon;
    row["delta"] = p.delta;
    if (p.status.ok()) {
      row["sigma"] = p.sigma;
    } else {
      row["sigma"] = nullptr;
    }
    row["bound_kind"] = BoundColumn(p);
    row["optimistic"] = p.optimistic;
    const std::string max_batch = MaxBatchColumn(p);
    if (max_batch.empty()) {
      row["max_batch_B"] = nullptr;
    } else {
      row["max_batch_B"] = *p.sampler.max_batch_size;
    }
    row["grid_step"] = p.grid_step;
    if (!p.status.ok()) row["error"] = std::string(p.status.message());
    rows.push_back(std::move(row));
  }
  nlohmann::ordered_json doc;
  doc["tool"] = "ablq-accounting";
  doc["version"] = kToolVersion;
  doc["points"] = std::move(rows);
  out << doc.dump(2) << "\n";
}

}  // namespace ablq
