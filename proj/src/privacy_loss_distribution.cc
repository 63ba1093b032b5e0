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

#include "ablq/privacy_loss_distribution.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "ablq/errors.h"
#include "ablq/numerics.h"
#include "ablq/status_macros.h"
#include "convolution.h"

namespace ablq {

struct PldAccess {
  static PrivacyLossDistribution Make(double grid_step, int64_t lowest_index,
                                      std::vector<double> masses,
                                      double infinity_mass,
                                      Rounding rounding) {
    return PrivacyLossDistribution(grid_step, lowest_index, std::move(masses),
                                   infinity_mass, rounding);
  }
};

namespace {

constexpr double kMassTolerance = 1e-9;
constexpr double kMaxTailMassBound = 1e-6;
// Grid indices beyond this magnitude are treated as overflow.
constexpr double kMaxIndexMagnitude = 4e18;

// Loss distribution under the first member of a continuous pair. The loss
// is a monotone function of the outcome, so its CDF is a Gaussian or mixture
// CDF evaluated at the inverse image of the loss level.
class ContinuousLoss {
 public:
  enum class Shape { kPoint, kNormal, kMixtureUp, kMixtureDown };

  static ContinuousLoss Point() {
    ContinuousLoss m;
    m.shape_ = Shape::kPoint;
    return m;
  }

  static ContinuousLoss Normal(double mean, double sd, double z) {
    ContinuousLoss m;
    m.shape_ = Shape::kNormal;
    m.mean_ = mean;
    m.sd_ = sd;
    m.lo_ = mean - sd * z;
    m.hi_ = mean + sd * z;
    return m;
  }

  // P = (1-q) N(0, s^2) + q N(1, s^2) against N(0, s^2), or the reverse.
  static ContinuousLoss Mixture(double q, double sigma, bool reverse,
                                double z) {
    ContinuousLoss m;
    m.shape_ = reverse ? Shape::kMixtureDown : Shape::kMixtureUp;
    m.q_ = q;
    m.sigma_ = sigma;
    m.log_q_ = std::log(q);
    m.log1m_q_ = std::log1p(-q);
    SubsampledGaussianPair pair{q, sigma, SubsamplingDirection::kRemove};
    if (!reverse) {
      m.lo_ = PrivacyLossAt(pair, -sigma * z);
      m.hi_ = PrivacyLossAt(pair, 1.0 + sigma * z);
    } else {
      m.lo_ = -PrivacyLossAt(pair, sigma * z);
      m.hi_ = -PrivacyLossAt(pair, -sigma * z);
    }
    return m;
  }

  Shape shape() const { return shape_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double Cdf(double loss) const {
    switch (shape_) {
      case Shape::kPoint:
        return loss >= 0.0 ? 1.0 : 0.0;
      case Shape::kNormal:
        return NormalCdf((loss - mean_) / sd_);
      case Shape::kMixtureUp: {
        if (loss <= log1m_q_) return 0.0;
        const double x = InverseLoss(loss);
        return (1.0 - q_) * NormalCdf(x / sigma_) +
               q_ * NormalCdf((x - 1.0) / sigma_);
      }
      case Shape::kMixtureDown: {
        if (-loss <= log1m_q_) return 1.0;
        return NormalCdf(-InverseLoss(-loss) / sigma_);
      }
    }
    return 0.0;
  }

  double Sf(double loss) const {
    switch (shape_) {
      case Shape::kPoint:
        return loss >= 0.0 ? 0.0 : 1.0;
      case Shape::kNormal:
        return NormalCdf(-(loss - mean_) / sd_);
      case Shape::kMixtureUp: {
        if (loss <= log1m_q_) return 1.0;
        const double x = InverseLoss(loss);
        return (1.0 - q_) * NormalCdf(-x / sigma_) +
               q_ * NormalCdf((1.0 - x) / sigma_);
      }
      case Shape::kMixtureDown: {
        if (-loss <= log1m_q_) return 0.0;
        return NormalCdf(InverseLoss(-loss) / sigma_);
      }
    }
    return 0.0;
  }

 private:
  // Outcome x with ln((1-q) + q exp((2x-1)/(2 s^2))) = loss; loss > ln(1-q).
  double InverseLoss(double loss) const {
    return 0.5 + sigma_ * sigma_ * (LogSubExp(loss, log1m_q_) - log_q_);
  }

  Shape shape_ = Shape::kPoint;
  double mean_ = 0.0;
  double sd_ = 1.0;
  double q_ = 0.0;
  double sigma_ = 1.0;
  double log_q_ = 0.0;
  double log1m_q_ = 0.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

ContinuousLoss ModelFor(const GaussianPair& pair, double z) {
  if (pair.mu == 0.0) return ContinuousLoss::Point();
  const double ratio = pair.mu / pair.sigma;
  // Either order: the loss is N(mu^2 / (2 s^2), (mu / s)^2) under the first
  // distribution.
  return ContinuousLoss::Normal(0.5 * ratio * ratio, std::fabs(ratio), z);
}

ContinuousLoss ModelFor(const SubsampledGaussianPair& pair, PairOrder order,
                        double z) {
  if (pair.q <= 0.0) return ContinuousLoss::Point();
  if (pair.q >= 1.0) return ModelFor(GaussianPair{1.0, pair.sigma}, z);
  const bool reverse = (pair.direction == SubsamplingDirection::kAdd) !=
                       (order == PairOrder::kQP);
  return ContinuousLoss::Mixture(pair.q, pair.sigma, reverse, z);
}

absl::Status CheckIndexRange(double lo_index, double hi_index,
                             int64_t max_atoms) {
  if (!(std::fabs(lo_index) < kMaxIndexMagnitude) ||
      !(std::fabs(hi_index) < kMaxIndexMagnitude)) {
    return MakeError(ErrorKind::kOverflow, "loss grid index out of range");
  }
  if (hi_index - lo_index + 2.0 > static_cast<double>(max_atoms)) {
    return MakeError(ErrorKind::kOverflow,
                     absl::StrCat("discretized support needs ",
                                  hi_index - lo_index + 2.0,
                                  " atoms, limit is ", max_atoms));
  }
  return absl::OkStatus();
}

int64_t CapIndex(double cap, double step) {
  if (!(cap < kMaxIndexMagnitude * step)) {
    return std::numeric_limits<int64_t>::max();
  }
  return static_cast<int64_t>(std::floor(cap / step));
}

absl::StatusOr<PrivacyLossDistribution> DiscretizeContinuous(
    const ContinuousLoss& model, Rounding rounding,
    const DiscretizationOptions& options) {
  const double step = options.grid_step;
  if (model.shape() == ContinuousLoss::Shape::kPoint) {
    return PldAccess::Make(step, 0, {1.0}, 0.0, rounding);
  }
  const bool pessimistic = rounding == Rounding::kPessimistic;
  const double lo_index = pessimistic ? std::ceil(model.lo() / step)
                                      : std::floor(model.lo() / step);
  const double hi_index = pessimistic ? std::ceil(model.hi() / step)
                                      : std::floor(model.hi() / step);
  ABLQ_RETURN_IF_ERROR(CheckIndexRange(lo_index, hi_index, options.max_atoms));
  const int64_t i_min = static_cast<int64_t>(lo_index);
  const int64_t i_max = static_cast<int64_t>(hi_index);
  const int64_t i_top = std::max(
      i_min, std::min(i_max, CapIndex(options.loss_cap, step)));

  // CDF and survival at the boundaries i_min .. i_top + 1.
  const size_t points = static_cast<size_t>(i_top - i_min + 2);
  std::vector<double> cdf(points);
  std::vector<double> sf(points);
  for (size_t j = 0; j < points; ++j) {
    const double loss = static_cast<double>(i_min + static_cast<int64_t>(j)) *
                        step;
    cdf[j] = model.Cdf(loss);
    sf[j] = model.Sf(loss);
  }
  auto slab = [&](size_t a, size_t b) {
    const double mass = cdf[b] <= 0.5 ? cdf[b] - cdf[a] : sf[a] - sf[b];
    return std::max(0.0, mass);
  };

  const size_t atoms = static_cast<size_t>(i_top - i_min + 1);
  std::vector<double> masses(atoms, 0.0);
  double infinity_mass = 0.0;
  if (pessimistic) {
    // Loss in ((i-1) step, i step] goes to i; everything below i_min is
    // lifted onto i_min; everything above i_top goes to infinity.
    masses[0] = cdf[0];
    for (size_t j = 1; j < atoms; ++j) masses[j] = slab(j - 1, j);
    infinity_mass = sf[atoms - 1];
  } else {
    // Loss in [i step, (i+1) step) goes to i; mass below i_min and above
    // (i_max + 1) step is dropped; mass between the cap and that point
    // lands on the cap.
    for (size_t j = 0; j + 1 < atoms; ++j) masses[j] = slab(j, j + 1);
    const double top_end = static_cast<double>(i_max + 1) * step;
    masses[atoms - 1] = std::max(0.0, sf[atoms - 1] - model.Sf(top_end));
  }
  return PldAccess::Make(step, i_min, std::move(masses), infinity_mass,
                         rounding);
}

absl::StatusOr<PrivacyLossDistribution> DiscretizeDiscrete(
    const DiscretePair& pair, Rounding rounding, PairOrder order,
    const DiscretizationOptions& options) {
  const double step = options.grid_step;
  const bool pessimistic = rounding == Rounding::kPessimistic;
  const std::vector<double>& log_first =
      order == PairOrder::kPQ ? pair.log_p() : pair.log_q();
  const std::vector<double>& log_second =
      order == PairOrder::kPQ ? pair.log_q() : pair.log_p();
  const int64_t cap_index = CapIndex(options.loss_cap, step);

  double infinity_mass = 0.0;
  std::vector<std::pair<int64_t, double>> atoms;
  atoms.reserve(log_first.size());
  int64_t i_min = std::numeric_limits<int64_t>::max();
  int64_t i_max = std::numeric_limits<int64_t>::min();
  for (size_t i = 0; i < log_first.size(); ++i) {
    if (log_first[i] == -kInfinity) continue;
    const double mass = std::exp(log_first[i]);
    if (log_second[i] == -kInfinity) {
      infinity_mass += mass;
      continue;
    }
    const double scaled = (log_first[i] - log_second[i]) / step;
    const double rounded = pessimistic ? std::ceil(scaled) : std::floor(scaled);
    if (!(std::fabs(rounded) < kMaxIndexMagnitude)) {
      return MakeError(ErrorKind::kOverflow, "loss grid index out of range");
    }
    int64_t index = static_cast<int64_t>(rounded);
    if (index > cap_index) {
      if (pessimistic) {
        infinity_mass += mass;
        continue;
      }
      index = cap_index;
    }
    atoms.emplace_back(index, mass);
    i_min = std::min(i_min, index);
    i_max = std::max(i_max, index);
  }
  if (atoms.empty()) {
    return PldAccess::Make(step, 0, {}, std::min(1.0, infinity_mass),
                           rounding);
  }
  ABLQ_RETURN_IF_ERROR(CheckIndexRange(static_cast<double>(i_min),
                                       static_cast<double>(i_max),
                                       options.max_atoms));
  std::vector<double> masses(static_cast<size_t>(i_max - i_min + 1), 0.0);
  for (const auto& [index, mass] : atoms) {
    masses[static_cast<size_t>(index - i_min)] += mass;
  }
  return PldAccess::Make(step, i_min, std::move(masses),
                         std::min(1.0, infinity_mass), rounding);
}

// Trims tail mass after a convolution, see CompositionOptions.
void TrimTails(std::vector<double>& masses, int64_t& lowest_index,
               double& infinity_mass, double tail_mass_bound,
               Rounding rounding) {
  if (masses.empty()) return;
  const double half = 0.5 * tail_mass_bound;
  size_t lo = 0;
  double lower = 0.0;
  while (lo + 1 < masses.size() && lower + masses[lo] <= half) {
    lower += masses[lo++];
  }
  size_t hi = masses.size();
  double upper = 0.0;
  while (hi > lo + 1 && upper + masses[hi - 1] <= half) {
    upper += masses[--hi];
  }
  if (rounding == Rounding::kPessimistic) {
    masses[lo] += lower;
    infinity_mass += upper;
  }
  if (hi < masses.size()) masses.resize(hi);
  if (lo > 0) masses.erase(masses.begin(), masses.begin() + lo);
  lowest_index += static_cast<int64_t>(lo);
}

void ApplyCap(std::vector<double>& masses, int64_t& lowest_index,
              double& infinity_mass, int64_t cap_index, Rounding rounding) {
  if (masses.empty()) return;
  const int64_t highest = lowest_index + static_cast<int64_t>(masses.size()) -
                          1;
  if (highest <= cap_index) return;
  if (rounding == Rounding::kPessimistic) {
    const int64_t keep = std::max<int64_t>(0, cap_index - lowest_index + 1);
    CompensatedSum moved;
    for (size_t j = static_cast<size_t>(keep); j < masses.size(); ++j) {
      moved.Add(masses[j]);
    }
    infinity_mass += moved.Result();
    masses.resize(static_cast<size_t>(keep));
    if (masses.empty()) lowest_index = 0;
    return;
  }
  if (lowest_index > cap_index) {
    CompensatedSum total;
    for (double m : masses) total.Add(m);
    masses.assign(1, total.Result());
    lowest_index = cap_index;
    return;
  }
  const size_t cap_pos = static_cast<size_t>(cap_index - lowest_index);
  CompensatedSum moved;
  for (size_t j = cap_pos; j < masses.size(); ++j) moved.Add(masses[j]);
  masses.resize(cap_pos + 1);
  masses[cap_pos] = moved.Result();
}

bool SameGrid(double a, double b) {
  return std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), std::fabs(b));
}

absl::StatusOr<PrivacyLossDistribution> ComposeWithCap(
    const PrivacyLossDistribution& a, const PrivacyLossDistribution& b,
    const CompositionOptions& options, int64_t cap_index) {
  if (!SameGrid(a.grid_step(), b.grid_step())) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "composed distributions must share a grid step");
  }
  if (a.rounding() != b.rounding()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "composed distributions must share a rounding direction");
  }
  const double ia = a.infinity_mass();
  const double ib = b.infinity_mass();
  const double fa = a.FiniteMass();
  const double fb = b.FiniteMass();
  double infinity_mass = ia * (fb + ib) + fa * ib;

  std::vector<double> masses;
  int64_t lowest = a.lowest_index() + b.lowest_index();
  if (!a.masses().empty() && !b.masses().empty()) {
    const double support = static_cast<double>(a.size()) +
                           static_cast<double>(b.size()) - 1.0;
    if (support > static_cast<double>(options.max_atoms)) {
      return MakeError(ErrorKind::kOverflow,
                       absl::StrCat("composed support needs ", support,
                                    " atoms, limit is ", options.max_atoms));
    }
    masses = &a == &b ? internal::Convolve(a.masses(), a.masses())
                      : internal::Convolve(a.masses(), b.masses());
  } else {
    lowest = 0;
  }
  ApplyCap(masses, lowest, infinity_mass, cap_index, a.rounding());
  TrimTails(masses, lowest, infinity_mass, options.tail_mass_bound,
            a.rounding());
  if (masses.empty()) lowest = 0;
  return PldAccess::Make(a.grid_step(), lowest, std::move(masses),
                         std::min(1.0, infinity_mass), a.rounding());
}

absl::Status CheckComposition(const CompositionOptions& options) {
  if (!(options.tail_mass_bound >= 0.0 &&
        options.tail_mass_bound <= kMaxTailMassBound)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "tail_mass_bound must lie in [0, 1e-6]");
  }
  if (options.max_atoms < 1) {
    return MakeError(ErrorKind::kInvalidArgument, "max_atoms must be >= 1");
  }
  return absl::OkStatus();
}

}  // namespace

const char* RoundingName(Rounding rounding) {
  return rounding == Rounding::kPessimistic ? "pessimistic" : "optimistic";
}

absl::StatusOr<PrivacyLossDistribution> PrivacyLossDistribution::Create(
    double grid_step, int64_t lowest_index, std::vector<double> masses,
    double infinity_mass, Rounding rounding) {
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) {
    return MakeError(ErrorKind::kInvalidArgument, "grid_step must be > 0");
  }
  if (!(infinity_mass >= 0.0 && infinity_mass <= 1.0)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "infinity_mass must lie in [0, 1]");
  }
  CompensatedSum total;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "masses must be finite and non-negative");
    }
    total.Add(m);
  }
  total.Add(infinity_mass);
  const double sum = total.Result();
  if (sum > 1.0 + kMassTolerance ||
      (rounding == Rounding::kPessimistic && sum < 1.0 - kMassTolerance)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("total mass ", sum, " is not valid for ",
                                  RoundingName(rounding), " rounding"));
  }
  return PrivacyLossDistribution(grid_step, lowest_index, std::move(masses),
                                 infinity_mass, rounding);
}

double PrivacyLossDistribution::FiniteMass() const {
  CompensatedSum total;
  for (double m : masses_) total.Add(m);
  return total.Result();
}

double PrivacyLossDistribution::HockeyStick(double epsilon) const {
  CompensatedSum sum;
  for (size_t i = masses_.size(); i-- > 0;) {
    const double loss = LossAt(i);
    if (loss <= epsilon) break;
    sum.Add(masses_[i] * -std::expm1(epsilon - loss));
  }
  sum.Add(infinity_mass_);
  return std::clamp(sum.Result(), 0.0, 1.0);
}

double HockeyStick(const PrivacyLossDistribution& pld, double epsilon) {
  return pld.HockeyStick(epsilon);
}

absl::StatusOr<PrivacyLossDistribution> Discretize(
    const DominatingPairSpec& pair, Rounding rounding,
    const DiscretizationOptions& options, PairOrder order) {
  ABLQ_RETURN_IF_ERROR(ValidatePair(pair));
  if (!(options.grid_step > 0.0)) {
    return MakeError(ErrorKind::kInvalidArgument, "grid_step must be > 0");
  }
  if (options.grid_step > 1.0) {
    return MakeError(ErrorKind::kGridTooCoarse,
                     absl::StrCat("grid_step ", options.grid_step,
                                  " exceeds 1 nat"));
  }
  if (!(options.tail_mass_bound > 0.0 &&
        options.tail_mass_bound <= kMaxTailMassBound)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "tail_mass_bound must lie in (0, 1e-6]");
  }
  if (options.max_atoms < 1) {
    return MakeError(ErrorKind::kInvalidArgument, "max_atoms must be >= 1");
  }
  if (const auto* d = std::get_if<DiscretePair>(&pair)) {
    return DiscretizeDiscrete(*d, rounding, order, options);
  }
  // Each end of the outcome range omits half the tail budget.
  const double z = -NormalQuantile(0.5 * options.tail_mass_bound);
  if (const auto* g = std::get_if<GaussianPair>(&pair)) {
    return DiscretizeContinuous(ModelFor(*g, z), rounding, options);
  }
  return DiscretizeContinuous(
      ModelFor(std::get<SubsampledGaussianPair>(pair), order, z), rounding,
      options);
}

PrivacyLossDistribution CapLosses(const PrivacyLossDistribution& pld,
                                  double cap) {
  std::vector<double> masses = pld.masses();
  int64_t lowest = pld.lowest_index();
  double infinity_mass = pld.infinity_mass();
  ApplyCap(masses, lowest, infinity_mass, CapIndex(cap, pld.grid_step()),
           pld.rounding());
  return PldAccess::Make(pld.grid_step(), lowest, std::move(masses),
                         std::min(1.0, infinity_mass), pld.rounding());
}

absl::StatusOr<PrivacyLossDistribution> Compose(
    const PrivacyLossDistribution& a, const PrivacyLossDistribution& b,
    const CompositionOptions& options) {
  ABLQ_RETURN_IF_ERROR(CheckComposition(options));
  int64_t cap_index = std::numeric_limits<int64_t>::max();
  if (options.epsilon.has_value()) {
    cap_index = CapIndex(*options.epsilon + options.cap_margin, a.grid_step());
  }
  return ComposeWithCap(a, b, options, cap_index);
}

absl::StatusOr<PrivacyLossDistribution> SelfCompose(
    const PrivacyLossDistribution& pld, int64_t k,
    const CompositionOptions& options) {
  if (k < 1) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "composition count must be >= 1");
  }
  ABLQ_RETURN_IF_ERROR(CheckComposition(options));
  // A part holding j copies still gains at least (k - j) * lowest_loss from
  // the remaining copies, so its losses above this cap stay above
  // epsilon + margin in the final result.
  const double lowest_loss = std::min(0.0, pld.grid_origin());
  auto cap_for = [&](int64_t copies) {
    if (!options.epsilon.has_value()) return std::numeric_limits<int64_t>::max();
    const double cap = *options.epsilon + options.cap_margin -
                       static_cast<double>(k - copies) * lowest_loss;
    return CapIndex(cap, pld.grid_step());
  };

  PrivacyLossDistribution base = pld;
  if (options.epsilon.has_value()) {
    std::vector<double> masses = base.masses();
    int64_t lowest = base.lowest_index();
    double infinity_mass = base.infinity_mass();
    ApplyCap(masses, lowest, infinity_mass, cap_for(1), base.rounding());
    base = PldAccess::Make(base.grid_step(), lowest, std::move(masses),
                           std::min(1.0, infinity_mass), base.rounding());
  }
  int64_t base_copies = 1;
  std::optional<PrivacyLossDistribution> result;
  int64_t result_copies = 0;
  int64_t remaining = k;
  while (remaining > 0) {
    if (remaining & 1) {
      if (result.has_value()) {
        result_copies += base_copies;
        ABLQ_ASSIGN_OR_RETURN(
            result,
            ComposeWithCap(*result, base, options, cap_for(result_copies)));
      } else {
        result = base;
        result_copies = base_copies;
      }
    }
    remaining >>= 1;
    if (remaining > 0) {
      base_copies *= 2;
      ABLQ_ASSIGN_OR_RETURN(
          base, ComposeWithCap(base, base, options, cap_for(base_copies)));
    }
  }
  return *std::move(result);
}

absl::StatusOr<PairDeltaResult> PairDelta(const DominatingPairSpec& pair,
                                          int64_t k, double epsilon,
                                          Rounding rounding,
                                          const PldOptions& options) {
  if (k < 1) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "composition count must be >= 1");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "epsilon must be finite and >= 0");
  }
  DiscretizationOptions discretization;
  discretization.grid_step = options.grid_step;
  discretization.tail_mass_bound = options.tail_mass_bound;
  discretization.max_atoms = options.max_atoms;
  CompositionOptions composition;
  composition.tail_mass_bound = options.tail_mass_bound;
  composition.max_atoms = options.max_atoms;
  composition.epsilon = epsilon;
  composition.cap_margin = options.cap_margin;

  PairDeltaResult result;
  result.rounding = rounding;
  for (PairOrder order : {PairOrder::kPQ, PairOrder::kQP}) {
    ABLQ_ASSIGN_OR_RETURN(PrivacyLossDistribution single,
                          Discretize(pair, rounding, discretization, order));
    ABLQ_ASSIGN_OR_RETURN(PrivacyLossDistribution composed,
                          SelfCompose(single, k, composition));
    const double delta = composed.HockeyStick(epsilon);
    (order == PairOrder::kPQ ? result.delta_pq : result.delta_qp) = delta;
  }
  result.delta = std::max(result.delta_pq, result.delta_qp);
  return result;
}

}  // namespace ablq
