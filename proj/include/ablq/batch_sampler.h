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

// Batch generation for the samplers: truncated Poisson through a
// map / group / reduce pipeline over record shards, and permutation-based
// deterministic, persistent-shuffle and dynamic-shuffle batching.

#ifndef ABLQ_BATCH_SAMPLER_H_
#define ABLQ_BATCH_SAMPLER_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ablq/sampler_config.h"

namespace ablq {

struct WeightedEntry {
  int64_t record_id = 0;
  double weight = 1.0;  // 0 marks padding

  bool operator==(const WeightedEntry& other) const = default;
};

// Describes a manifest. For permutation samplers max_batch_size equals b.
struct ManifestHeader {
  SamplerKind kind = SamplerKind::kTruncatedPoisson;
  int64_t dataset_size = 0;
  int64_t batch_size = 0;
  int64_t max_batch_size = 0;
  int64_t steps = 0;
  uint64_t seed = 0;
};

struct BatchManifest {
  ManifestHeader header;
  // batches[t] is batch t + 1.
  std::vector<std::vector<WeightedEntry>> batches;
  // Member counts before truncation (truncated Poisson only; not persisted).
  std::vector<int64_t> pre_truncation_sizes;
};

struct SamplerOptions {
  int shards = 1;
  // Threads for the map and reduce phases; 0 uses hardware concurrency.
  int threads = 0;
  // Uniforms drawn per refill when generating geometric gaps.
  int block_size = 1024;
};

// 1-based indices of the batches among 1..steps that contain the record.
// Consecutive indices differ by Geometric(q) gaps drawn from the stream
// keyed by (seed, record_id).
std::vector<int64_t> MembershipBatches(int64_t record_id, uint64_t seed,
                                       double q, int64_t steps,
                                       int block_size = 1024);

using BatchSink = std::function<absl::Status(
    int64_t batch_id, const std::vector<WeightedEntry>& entries)>;

// Runs the pipeline and hands batches 1..T to `sink` in order. Returns the
// pre-truncation member count of every batch.
absl::StatusOr<std::vector<int64_t>> StreamTruncatedPoisson(
    int64_t n, int64_t b, int64_t max_batch_size, int64_t steps,
    uint64_t seed, const SamplerOptions& options, const BatchSink& sink);

absl::StatusOr<BatchManifest> GenerateTruncatedPoisson(
    int64_t n, int64_t b, int64_t max_batch_size, int64_t steps,
    uint64_t seed, const SamplerOptions& options = {});

// Deterministic: identity order every epoch. Persistent: one permutation
// reused by all epochs. Dynamic: a fresh permutation per epoch.
absl::StatusOr<BatchManifest> GeneratePermutation(SamplerKind kind, int64_t n,
                                                  int64_t b, int64_t steps,
                                                  uint64_t seed);

struct SamplerStats {
  std::vector<int64_t> appearances;  // weight-1 occurrences per record
  double never_sampled_fraction = 0.0;
  int64_t truncation_events = 0;  // batches whose members exceeded B
  std::vector<int64_t> padding;   // weight-0 entries per batch
};

SamplerStats ComputeSamplerStats(const BatchManifest& manifest);

// Text format: a `tps v1 ...` header line, then `batch_id;id:w,id:w,...`
// per batch with weights written as 1 or 0.
std::string ManifestHeaderLine(const ManifestHeader& header);
std::string ManifestBatchLine(int64_t batch_id,
                              const std::vector<WeightedEntry>& entries);
absl::Status WriteManifest(const BatchManifest& manifest, std::ostream& out);
absl::StatusOr<BatchManifest> ReadManifest(std::istream& in);

}  // namespace ablq

#endif  // ABLQ_BATCH_SAMPLER_H_
