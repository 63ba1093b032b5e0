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

#include "ablq/dominating_pair.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "ablq/errors.h"
#include "ablq/numerics.h"

namespace ablq {
namespace {

constexpr double kMassSumTolerance = 1e-12;

absl::Status CheckLogMasses(const std::vector<double>& log_mass,
                            absl::string_view name) {
  CompensatedSum total;
  for (double lm : log_mass) {
    if (std::isnan(lm) || lm > 1e-15) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat(name, " contains an invalid mass"));
    }
    total.Add(std::exp(lm));
  }
  if (std::fabs(total.Result() - 1.0) > kMassSumTolerance) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat(name, " sums to ", total.Result(),
                                  ", expected 1"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<DiscretePair> DiscretePair::Create(
    std::span<const double> p_mass, std::span<const double> q_mass) {
  std::vector<double> log_p;
  std::vector<double> log_q;
  log_p.reserve(p_mass.size());
  log_q.reserve(q_mass.size());
  for (double p : p_mass) {
    if (!(p >= 0.0)) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "p_mass entries must be non-negative");
    }
    log_p.push_back(std::log(p));
  }
  for (double q : q_mass) {
    if (!(q >= 0.0)) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "q_mass entries must be non-negative");
    }
    log_q.push_back(std::log(q));
  }
  return CreateFromLogMasses(std::move(log_p), std::move(log_q));
}

absl::StatusOr<DiscretePair> DiscretePair::CreateFromLogMasses(
    std::vector<double> log_p, std::vector<double> log_q) {
  if (log_p.size() != log_q.size() || log_p.empty()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "p and q mass lists must be non-empty and equally long");
  }
  for (double lq : log_q) {
    if (lq == -kInfinity) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "every q_mass entry must be positive");
    }
  }
  if (absl::Status s = CheckLogMasses(log_p, "p_mass"); !s.ok()) return s;
  if (absl::Status s = CheckLogMasses(log_q, "q_mass"); !s.ok()) return s;
  return DiscretePair(std::move(log_p), std::move(log_q));
}

std::vector<double> DiscretePair::p_mass() const {
  std::vector<double> out(log_p_.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::exp(log_p_[i]);
  return out;
}

std::vector<double> DiscretePair::q_mass() const {
  std::vector<double> out(log_q_.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::exp(log_q_[i]);
  return out;
}

double PrivacyLossAt(const GaussianPair& pair, double x) {
  return pair.mu * (x - 0.5 * pair.mu) / (pair.sigma * pair.sigma);
}

double PrivacyLossAt(const SubsampledGaussianPair& pair, double x) {
  if (pair.q <= 0.0) return 0.0;
  const double exponent = (2.0 * x - 1.0) / (2.0 * pair.sigma * pair.sigma);
  double loss;
  if (pair.q >= 1.0) {
    loss = exponent;
  } else if (exponent < 700.0) {
    loss = std::log1p(pair.q * std::expm1(exponent));
  } else {
    loss = LogAddExp(std::log1p(-pair.q), std::log(pair.q) + exponent);
  }
  return pair.direction == SubsamplingDirection::kRemove ? loss : -loss;
}

absl::StatusOr<double> PrivacyLossAt(const DominatingPairSpec& pair, double x) {
  if (const auto* g = std::get_if<GaussianPair>(&pair)) {
    return PrivacyLossAt(*g, x);
  }
  if (const auto* s = std::get_if<SubsampledGaussianPair>(&pair)) {
    return PrivacyLossAt(*s, x);
  }
  return MakeError(ErrorKind::kInvalidArgument,
                   "privacy loss at an outcome point needs a continuous pair");
}

absl::Status ValidatePair(const DominatingPairSpec& pair) {
  if (const auto* g = std::get_if<GaussianPair>(&pair)) {
    if (!(g->sigma > 0.0) || !std::isfinite(g->mu)) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "GaussianPair needs finite mu and sigma > 0");
    }
  } else if (const auto* s = std::get_if<SubsampledGaussianPair>(&pair)) {
    if (!(s->sigma > 0.0)) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "SubsampledGaussianPair needs sigma > 0");
    }
    if (!(s->q >= 0.0 && s->q <= 1.0)) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "SubsampledGaussianPair needs q in [0, 1]");
    }
  }
  return absl::OkStatus();
}

}  // namespace ablq
