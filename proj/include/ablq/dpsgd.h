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

// Desk-scale DP-SGD on synthetic logistic regression, driven by batch
// manifests.

#ifndef ABLQ_DPSGD_H_
#define ABLQ_DPSGD_H_

#include <cstdint>
#include <ostream>
#include <vector>

#include "absl/status/statusor.h"
#include "ablq/batch_sampler.h"

namespace ablq {

struct Example {
  std::vector<double> features;
  int label = 0;  // 0 or 1
};

struct Dataset {
  int dimension = 0;
  std::vector<Example> examples;
};

struct SyntheticOptions {
  int64_t size = 1000;
  int dimension = 20;
  // Distance between the two class means.
  double separation = 4.0;
  uint64_t seed = 0;
};

// Two Gaussian clusters N(+-separation/2 * u, I) with balanced labels and a
// seed-dependent unit direction u.
absl::StatusOr<Dataset> MakeSyntheticDataset(const SyntheticOptions& options);

// Model is (weights, bias): size dimension + 1.
double LogisticLoss(const std::vector<double>& w, const Example& x);
std::vector<double> LogisticGradient(const std::vector<double>& w,
                                     const Example& x);

// g * min(1, C / ||g||).
std::vector<double> Clip(const std::vector<double>& g, double clip_norm);

struct TrainConfig {
  double clip_norm = 1.0;
  double sigma = 1.0;
  double learning_rate = 0.5;
  bool cosine_decay = false;
  int64_t target_batch_size = 1;
  int64_t steps = 1;
  uint64_t seed = 0;
  // Verifies every clipped gradient norm.
  bool debug_checks = false;
};

struct WeightedExample {
  const Example* example = nullptr;
  double weight = 1.0;
};

// One update w - lr * (noise + sum_i weight_i [grad_i]_C) / b, with noise
// N(0, sigma^2 C^2 I) drawn from the stream keyed by (seed, step).
absl::StatusOr<std::vector<double>> DpsgdStep(
    const std::vector<double>& w, const std::vector<WeightedExample>& batch,
    const TrainConfig& config, int64_t step);

struct TrainResult {
  std::vector<double> weights;
  // Weighted batch loss / b at the start of each step.
  std::vector<double> loss_trace;
  double final_accuracy = 0.0;
};

absl::StatusOr<TrainResult> Train(const Dataset& dataset,
                                  const BatchManifest& manifest,
                                  const TrainConfig& config);

double Accuracy(const Dataset& dataset, const std::vector<double>& w);

void WriteRunReport(const TrainConfig& config, const ManifestHeader& header,
                    const TrainResult& result, std::ostream& out);

}  // namespace ablq

#endif  // ABLQ_DPSGD_H_
