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

// Symbolic descriptions of dominating pairs (P, Q) whose hockey-stick
// divergences bound a mechanism's privacy curve.

#ifndef ABLQ_DOMINATING_PAIR_H_
#define ABLQ_DOMINATING_PAIR_H_

#include <span>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"

namespace ablq {

// (N(mu, sigma^2), N(0, sigma^2)).
struct GaussianPair {
  double mu = 1.0;
  double sigma = 1.0;
};

enum class SubsamplingDirection {
  // P = (1-q) N(0, s^2) + q N(1, s^2), Q = N(0, s^2).
  kRemove,
  // The same two distributions in the opposite order.
  kAdd,
};

struct SubsampledGaussianPair {
  double q = 1.0;
  double sigma = 1.0;
  SubsamplingDirection direction = SubsamplingDirection::kRemove;
};

// A pair of distributions over the same finite set of atoms. Masses are held
// in log space so atoms whose probability underflows a double keep a finite
// privacy loss.
class DiscretePair {
 public:
  // Both lists must have equal length, non-negative entries summing to 1
  // within 1e-12, and every q entry must be positive.
  static absl::StatusOr<DiscretePair> Create(std::span<const double> p_mass,
                                             std::span<const double> q_mass);
  static absl::StatusOr<DiscretePair> CreateFromLogMasses(
      std::vector<double> log_p, std::vector<double> log_q);

  size_t atom_count() const { return log_p_.size(); }
  const std::vector<double>& log_p() const { return log_p_; }
  const std::vector<double>& log_q() const { return log_q_; }
  std::vector<double> p_mass() const;
  std::vector<double> q_mass() const;

 private:
  DiscretePair(std::vector<double> log_p, std::vector<double> log_q)
      : log_p_(std::move(log_p)), log_q_(std::move(log_q)) {}

  std::vector<double> log_p_;
  std::vector<double> log_q_;
};

using DominatingPairSpec =
    std::variant<GaussianPair, SubsampledGaussianPair, DiscretePair>;

// ln(dP/dQ)(x) for the continuous variants.
double PrivacyLossAt(const GaussianPair& pair, double x);
double PrivacyLossAt(const SubsampledGaussianPair& pair, double x);
// Fails with kInvalidArgument for DiscretePair, which has no real outcome axis.
absl::StatusOr<double> PrivacyLossAt(const DominatingPairSpec& pair, double x);

absl::Status ValidatePair(const DominatingPairSpec& pair);

}  // namespace ablq

#endif  // ABLQ_DOMINATING_PAIR_H_
