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

#include "ablq/dpsgd.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "absl/strings/str_cat.h"
#include "ablq/errors.h"
#include "ablq/philox.h"
#include "nlohmann/json.hpp"

namespace ablq {
namespace {

constexpr uint64_t kDirectionStream = std::numeric_limits<uint64_t>::max();

// Standard normals by Box-Muller, two per pair of uniforms.
std::vector<double> Normals(PhiloxStream& stream, size_t count) {
  std::vector<double> out;
  out.reserve(count + 1);
  while (out.size() < count) {
    const double r = std::sqrt(-2.0 * std::log(stream.NextUniform()));
    const double angle = 2.0 * std::numbers::pi * stream.NextUniform();
    out.push_back(r * std::cos(angle));
    out.push_back(r * std::sin(angle));
  }
  out.resize(count);
  return out;
}

double Margin(const std::vector<double>& w, const Example& x) {
  double dot = w.back();
  for (size_t i = 0; i < x.features.size(); ++i) dot += w[i] * x.features[i];
  return x.label == 1 ? dot : -dot;
}

double Norm(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

}  // namespace

absl::StatusOr<Dataset> MakeSyntheticDataset(const SyntheticOptions& options) {
  if (options.size < 1 || options.dimension < 1) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "dataset size and dimension must be >= 1");
  }
  const size_t d = static_cast<size_t>(options.dimension);
  PhiloxStream direction_stream(options.seed, StreamDomain::kData,
                                kDirectionStream);
  std::vector<double> direction = Normals(direction_stream, d);
  const double norm = Norm(direction);
  for (double& u : direction) u /= norm;

  Dataset data;
  data.dimension = options.dimension;
  data.examples.reserve(static_cast<size_t>(options.size));
  for (int64_t i = 0; i < options.size; ++i) {
    PhiloxStream stream(options.seed, StreamDomain::kData,
                        static_cast<uint64_t>(i));
    Example x;
    x.label = static_cast<int>(stream.NextU32() & 1u);
    const double sign = x.label == 1 ? 0.5 : -0.5;
    x.features = Normals(stream, d);
    for (size_t j = 0; j < d; ++j) {
      x.features[j] += sign * options.separation * direction[j];
    }
    data.examples.push_back(std::move(x));
  }
  return data;
}

double LogisticLoss(const std::vector<double>& w, const Example& x) {
  const double m = Margin(w, x);
  return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

std::vector<double> LogisticGradient(const std::vector<double>& w,
                                     const Example& x) {
  const double m = Margin(w, x);
  // d/dw log(1 + e^-m) = -sigmoid(-m) * dm/dw.
  const double coeff =
      -(x.label == 1 ? 1.0 : -1.0) / (1.0 + std::exp(m));
  std::vector<double> g(w.size());
  for (size_t i = 0; i < x.features.size(); ++i) g[i] = coeff * x.features[i];
  g.back() = coeff;
  return g;
}

std::vector<double> Clip(const std::vector<double>& g, double clip_norm) {
  const double norm = Norm(g);
  if (norm <= clip_norm) return g;
  std::vector<double> out(g);
  const double scale = clip_norm / norm;
  for (double& v : out) v *= scale;
  return out;
}

absl::StatusOr<std::vector<double>> DpsgdStep(
    const std::vector<double>& w, const std::vector<WeightedExample>& batch,
    const TrainConfig& config, int64_t step) {
  if (!(config.clip_norm > 0.0) || config.target_batch_size < 1 ||
      !(config.sigma >= 0.0)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "need C > 0, sigma >= 0 and target batch size >= 1");
  }
  const size_t dim = w.size();
  std::vector<double> sum(dim, 0.0);
  for (const WeightedExample& item : batch) {
    // Padding carries weight 0 and never touches the update.
    if (item.weight == 0.0) continue;
    if (item.example == nullptr || item.example->features.size() + 1 != dim) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "example dimension does not match the model");
    }
    const std::vector<double> g =
        Clip(LogisticGradient(w, *item.example), config.clip_norm);
    if (config.debug_checks && Norm(g) > config.clip_norm * (1.0 + 1e-12)) {
      return MakeError(ErrorKind::kNumericalCancellation,
                       absl::StrCat("clipped gradient norm ", Norm(g),
                                    " exceeds C at step ", step));
    }
    for (size_t i = 0; i < dim; ++i) sum[i] += item.weight * g[i];
  }
  if (config.sigma > 0.0) {
    PhiloxStream stream(config.seed, StreamDomain::kNoise,
                        static_cast<uint64_t>(step));
    const std::vector<double> z = Normals(stream, dim);
    const double scale = config.sigma * config.clip_norm;
    for (size_t i = 0; i < dim; ++i) sum[i] += scale * z[i];
  }
  double lr = config.learning_rate;
  if (config.cosine_decay && config.steps > 0) {
    lr *= 0.5 * (1.0 + std::cos(std::numbers::pi *
                                static_cast<double>(step - 1) /
                                static_cast<double>(config.steps)));
  }
  const double b = static_cast<double>(config.target_batch_size);
  std::vector<double> next(w);
  for (size_t i = 0; i < dim; ++i) next[i] -= lr * (sum[i] / b);
  return next;
}

absl::StatusOr<TrainResult> Train(const Dataset& dataset,
                                  const BatchManifest& manifest,
                                  const TrainConfig& config) {
  if (static_cast<int64_t>(manifest.batches.size()) != config.steps) {
    return MakeError(ErrorKind::kManifestMismatch,
                     absl::StrCat("manifest has ", manifest.batches.size(),
                                  " batches, training expects ",
                                  config.steps));
  }
  const int64_t n = static_cast<int64_t>(dataset.examples.size());
  TrainResult result;
  result.weights.assign(static_cast<size_t>(dataset.dimension) + 1, 0.0);
  result.loss_trace.reserve(static_cast<size_t>(config.steps));
  const double b = static_cast<double>(config.target_batch_size);
  for (int64_t t = 1; t <= config.steps; ++t) {
    const auto& entries = manifest.batches[static_cast<size_t>(t - 1)];
    std::vector<WeightedExample> batch;
    batch.reserve(entries.size());
    double loss = 0.0;
    for (const WeightedEntry& e : entries) {
      if (e.record_id < 0 || e.record_id >= n) {
        return MakeError(ErrorKind::kManifestMismatch,
                         absl::StrCat("record ", e.record_id,
                                      " is outside the dataset of size ", n));
      }
      const Example& x = dataset.examples[static_cast<size_t>(e.record_id)];
      batch.push_back({&x, e.weight});
      if (e.weight != 0.0) loss += e.weight * LogisticLoss(result.weights, x);
    }
    result.loss_trace.push_back(loss / b);
    auto next = DpsgdStep(result.weights, batch, config, t);
    if (!next.ok()) return next.status();
    result.weights = *std::move(next);
  }
  result.final_accuracy = Accuracy(dataset, result.weights);
  return result;
}

double Accuracy(const Dataset& dataset, const std::vector<double>& w) {
  if (dataset.examples.empty()) return 0.0;
  int64_t correct = 0;
  for (const Example& x : dataset.examples) {
    if (Margin(w, x) > 0.0) ++correct;
  }
  return static_cast<double>(correct) /
         static_cast<double>(dataset.examples.size());
}

void WriteRunReport(const TrainConfig& config, const ManifestHeader& header,
                    const TrainResult& result, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["tool"] = "ablq-accounting";
  doc["sampler"] = std::string(SamplerKindName(header.kind));
  doc["n"] = header.dataset_size;
  doc["b"] = header.batch_size;
  doc["B"] = header.max_batch_size;
  doc["steps"] = header.steps;
  doc["sampler_seed"] = header.seed;
  doc["clip_norm"] = config.clip_norm;
  doc["sigma"] = config.sigma;
  doc["learning_rate"] = config.learning_rate;
  doc["cosine_decay"] = config.cosine_decay;
  doc["train_seed"] = config.seed;
  doc["loss"] = result.loss_trace;
  doc["final_accuracy"] = result.final_accuracy;
  doc["weights"] = result.weights;
  out << doc.dump(2) << "\n";
}

}  // namespace ablq
