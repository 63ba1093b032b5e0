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

// Privacy loss distributions on a uniform grid, their discretization from
// dominating pairs, self-composition and hockey-stick evaluation.

#ifndef ABLQ_PRIVACY_LOSS_DISTRIBUTION_H_
#define ABLQ_PRIVACY_LOSS_DISTRIBUTION_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "ablq/dominating_pair.h"

namespace ablq {

// Direction in which a true loss is snapped to the grid. Pessimistic rounding
// yields upper bounds on delta, optimistic rounding lower bounds.
enum class Rounding { kPessimistic, kOptimistic };

const char* RoundingName(Rounding rounding);

// Which divergence of the pair is represented: D(P||Q) or D(Q||P).
enum class PairOrder { kPQ, kQP };

// Loss values are lowest_index * grid_step, (lowest_index + 1) * grid_step,
// ...; masses[i] is the probability of loss (lowest_index + i) * grid_step.
class PrivacyLossDistribution {
 public:
  static absl::StatusOr<PrivacyLossDistribution> Create(
      double grid_step, int64_t lowest_index, std::vector<double> masses,
      double infinity_mass, Rounding rounding);

  double grid_step() const { return grid_step_; }
  int64_t lowest_index() const { return lowest_index_; }
  double grid_origin() const {
    return static_cast<double>(lowest_index_) * grid_step_;
  }
  const std::vector<double>& masses() const { return masses_; }
  double infinity_mass() const { return infinity_mass_; }
  Rounding rounding() const { return rounding_; }
  size_t size() const { return masses_.size(); }

  double LossAt(size_t i) const {
    return static_cast<double>(lowest_index_ + static_cast<int64_t>(i)) *
           grid_step_;
  }
  // Total mass on finite losses.
  double FiniteMass() const;

  // infinity_mass + sum_i masses[i] * max(0, 1 - e^(epsilon - loss_i)),
  // accumulated from the largest loss down with compensated summation.
  double HockeyStick(double epsilon) const;

 private:
  friend struct PldAccess;
  PrivacyLossDistribution(double grid_step, int64_t lowest_index,
                          std::vector<double> masses, double infinity_mass,
                          Rounding rounding)
      : grid_step_(grid_step),
        lowest_index_(lowest_index),
        masses_(std::move(masses)),
        infinity_mass_(infinity_mass),
        rounding_(rounding) {}

  double grid_step_;
  int64_t lowest_index_;
  std::vector<double> masses_;
  double infinity_mass_;
  Rounding rounding_;
};

inline constexpr int64_t kDefaultMaxAtoms = int64_t{1} << 26;

struct DiscretizationOptions {
  double grid_step = 1e-4;
  // P-mass of the outcome range left out of a continuous pair.
  double tail_mass_bound = 1e-12;
  // Losses above the cap go to infinity (pessimistic) or down to the cap
  // (optimistic).
  double loss_cap = std::numeric_limits<double>::infinity();
  int64_t max_atoms = kDefaultMaxAtoms;
};

// Fails with kGridTooCoarse when grid_step > 1 nat, kInvalidArgument for a
// tail bound outside (0, 1e-6], and kOverflow when the grid would need more
// than max_atoms points.
absl::StatusOr<PrivacyLossDistribution> Discretize(
    const DominatingPairSpec& pair, Rounding rounding,
    const DiscretizationOptions& options = {},
    PairOrder order = PairOrder::kPQ);

struct CompositionOptions {
  // Mass trimmed from each end after every convolution. Trimmed upper mass
  // goes to infinity and trimmed lower mass moves up (pessimistic), or is
  // dropped (optimistic).
  double tail_mass_bound = 1e-12;
  int64_t max_atoms = kDefaultMaxAtoms;
  // When set, losses that cannot fall below epsilon + cap_margin in the final
  // composition are lumped (see DiscretizationOptions::loss_cap).
  std::optional<double> epsilon;
  double cap_margin = 40.0;
};

absl::StatusOr<PrivacyLossDistribution> Compose(
    const PrivacyLossDistribution& a, const PrivacyLossDistribution& b,
    const CompositionOptions& options = {});

// k-fold composition by repeated squaring. kOverflow if an intermediate
// support exceeds options.max_atoms.
absl::StatusOr<PrivacyLossDistribution> SelfCompose(
    const PrivacyLossDistribution& pld, int64_t k,
    const CompositionOptions& options = {});

// Moves mass at losses above `cap` per the PLD's rounding direction.
PrivacyLossDistribution CapLosses(const PrivacyLossDistribution& pld,
                                  double cap);

double HockeyStick(const PrivacyLossDistribution& pld, double epsilon);

struct PldOptions {
  double grid_step = 1e-4;
  double tail_mass_bound = 1e-12;
  int64_t max_atoms = kDefaultMaxAtoms;
  double cap_margin = 40.0;
};

struct PairDeltaResult {
  double delta = 0.0;          // max of the two orders
  double delta_pq = 0.0;
  double delta_qp = 0.0;
  Rounding rounding = Rounding::kPessimistic;
};

// max{D_{e^eps}(P^k || Q^k), D_{e^eps}(Q^k || P^k)} via discretize, compose
// and hockey stick.
absl::StatusOr<PairDeltaResult> PairDelta(const DominatingPairSpec& pair,
                                          int64_t k, double epsilon,
                                          Rounding rounding,
                                          const PldOptions& options = {});

}  // namespace ablq

#endif  // ABLQ_PRIVACY_LOSS_DISTRIBUTION_H_
