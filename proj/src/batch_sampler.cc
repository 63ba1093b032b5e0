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

#include "ablq/batch_sampler.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>
#include <utility>

#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "ablq/errors.h"
#include "ablq/philox.h"
#include "ablq/status_macros.h"

namespace ablq {
namespace {

constexpr int64_t kReduceChunk = 4096;

int ThreadCount(int requested, size_t work_items) {
  int threads = requested > 0
                    ? requested
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(threads, 1);
  return static_cast<int>(
      std::min<size_t>(static_cast<size_t>(threads), std::max<size_t>(1, work_items)));
}

// Runs fn(i) for i in [0, count) on up to `threads` threads.
template <typename F>
void ParallelFor(size_t count, int threads, F fn) {
  if (threads <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

// Uniform without-replacement subsample of `size` members, sorted by id.
void Truncate(std::vector<int64_t>& members, int64_t size, uint64_t seed,
              int64_t batch_id) {
  PhiloxStream stream(seed, StreamDomain::kTruncation,
                      static_cast<uint64_t>(batch_id));
  const uint64_t k = members.size();
  for (uint64_t i = 0; i < static_cast<uint64_t>(size); ++i) {
    const uint64_t j = i + stream.NextBelow(k - i);
    std::swap(members[i], members[j]);
  }
  members.resize(static_cast<size_t>(size));
  std::sort(members.begin(), members.end());
}

std::vector<WeightedEntry> PadBatch(const std::vector<int64_t>& members,
                                    int64_t size) {
  std::vector<WeightedEntry> entries;
  entries.reserve(static_cast<size_t>(size));
  for (int64_t id : members) entries.push_back({id, 1.0});
  const int64_t pad_id = members.empty() ? 0 : members.front();
  while (static_cast<int64_t>(entries.size()) < size) {
    entries.push_back({pad_id, 0.0});
  }
  return entries;
}

void ShufflePrefix(std::vector<int64_t>& items, PhiloxStream& stream) {
  for (size_t i = items.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(stream.NextBelow(i));
    std::swap(items[i - 1], items[j]);
  }
}

absl::Status ParseError(absl::string_view message) {
  return MakeError(ErrorKind::kParseError, message);
}

template <typename T>
absl::Status ParseField(absl::string_view token, absl::string_view name,
                        T* out) {
  const std::string prefix = absl::StrCat(name, "=");
  if (!absl::StartsWith(token, prefix) ||
      !absl::SimpleAtoi(token.substr(prefix.size()), out)) {
    return ParseError(absl::StrCat("bad header field '", token,
                                   "', expected ", name, "=<integer>"));
  }
  return absl::OkStatus();
}

}  // namespace

std::vector<int64_t> MembershipBatches(int64_t record_id, uint64_t seed,
                                       double q, int64_t steps,
                                       int block_size) {
  std::vector<int64_t> out;
  if (!(q > 0.0) || steps < 1) return out;
  if (q >= 1.0) {
    out.resize(static_cast<size_t>(steps));
    std::iota(out.begin(), out.end(), int64_t{1});
    return out;
  }
  PhiloxStream stream(seed, StreamDomain::kMembership,
                      static_cast<uint64_t>(record_id));
  const double log1m_q = std::log1p(-q);
  const size_t block = static_cast<size_t>(std::max(block_size, 1));
  std::vector<double> uniforms;
  uniforms.reserve(block);
  size_t used = 0;
  int64_t position = 0;
  while (true) {
    if (used == uniforms.size()) {
      uniforms.clear();
      for (size_t i = 0; i < block; ++i) uniforms.push_back(stream.NextUniform());
      used = 0;
    }
    const double gap = 1.0 + std::floor(std::log(uniforms[used++]) / log1m_q);
    if (gap > static_cast<double>(steps - position)) break;
    position += static_cast<int64_t>(gap);
    out.push_back(position);
  }
  return out;
}

absl::StatusOr<std::vector<int64_t>> StreamTruncatedPoisson(
    int64_t n, int64_t b, int64_t max_batch_size, int64_t steps,
    uint64_t seed, const SamplerOptions& options, const BatchSink& sink) {
  ABLQ_RETURN_IF_ERROR(ValidateConfig(
      SamplerConfig::TruncatedPoisson(n, b, max_batch_size, steps)));
  if (options.shards < 1) {
    return MakeError(ErrorKind::kInvalidArgument, "shards must be >= 1");
  }
  const double q = static_cast<double>(b) / static_cast<double>(n);
  const size_t shard_count = static_cast<size_t>(options.shards);

  // Map: per shard, (batch, record) memberships in record order.
  std::vector<std::vector<std::pair<int64_t, int64_t>>> shard_hits(
      shard_count);
  ParallelFor(shard_count, ThreadCount(options.threads, shard_count),
              [&](size_t s) {
                const int64_t begin =
                    static_cast<int64_t>((static_cast<unsigned __int128>(n) * s) /
                                         shard_count);
                const int64_t end = static_cast<int64_t>(
                    (static_cast<unsigned __int128>(n) * (s + 1)) / shard_count);
                auto& hits = shard_hits[s];
                for (int64_t r = begin; r < end; ++r) {
                  for (int64_t t : MembershipBatches(r, seed, q, steps,
                                                     options.block_size)) {
                    hits.emplace_back(t, r);
                  }
                }
              });

  // Group: merge shard outputs per batch, then sort by record id.
  std::vector<std::vector<int64_t>> members(static_cast<size_t>(steps));
  {
    std::vector<size_t> counts(static_cast<size_t>(steps), 0);
    for (const auto& hits : shard_hits) {
      for (const auto& [t, r] : hits) ++counts[static_cast<size_t>(t - 1)];
    }
    for (size_t t = 0; t < counts.size(); ++t) members[t].reserve(counts[t]);
    for (auto& hits : shard_hits) {
      for (const auto& [t, r] : hits) {
        members[static_cast<size_t>(t - 1)].push_back(r);
      }
      std::vector<std::pair<int64_t, int64_t>>().swap(hits);
    }
  }
  std::vector<int64_t> sizes(static_cast<size_t>(steps));
  for (size_t t = 0; t < members.size(); ++t) {
    sizes[t] = static_cast<int64_t>(members[t].size());
  }

  // Reduce: truncate and pad chunk by chunk, emitting batches in order.
  for (int64_t start = 0; start < steps; start += kReduceChunk) {
    const int64_t stop = std::min(steps, start + kReduceChunk);
    const size_t chunk = static_cast<size_t>(stop - start);
    std::vector<std::vector<WeightedEntry>> ready(chunk);
    ParallelFor(chunk, ThreadCount(options.threads, chunk), [&](size_t i) {
      const int64_t batch_id = start + static_cast<int64_t>(i) + 1;
      std::vector<int64_t>& m = members[static_cast<size_t>(batch_id - 1)];
      std::sort(m.begin(), m.end());
      if (static_cast<int64_t>(m.size()) > max_batch_size) {
        Truncate(m, max_batch_size, seed, batch_id);
      }
      ready[i] = PadBatch(m, max_batch_size);
      std::vector<int64_t>().swap(m);
    });
    for (size_t i = 0; i < chunk; ++i) {
      ABLQ_RETURN_IF_ERROR(sink(start + static_cast<int64_t>(i) + 1, ready[i]));
    }
  }
  return sizes;
}

absl::StatusOr<BatchManifest> GenerateTruncatedPoisson(
    int64_t n, int64_t b, int64_t max_batch_size, int64_t steps,
    uint64_t seed, const SamplerOptions& options) {
  BatchManifest manifest;
  manifest.header = {SamplerKind::kTruncatedPoisson, n, b, max_batch_size,
                     steps, seed};
  manifest.batches.reserve(static_cast<size_t>(std::max<int64_t>(steps, 0)));
  ABLQ_ASSIGN_OR_RETURN(
      manifest.pre_truncation_sizes,
      StreamTruncatedPoisson(
          n, b, max_batch_size, steps, seed, options,
          [&](int64_t, const std::vector<WeightedEntry>& entries) {
            manifest.batches.push_back(entries);
            return absl::OkStatus();
          }));
  return manifest;
}

absl::StatusOr<BatchManifest> GeneratePermutation(SamplerKind kind, int64_t n,
                                                  int64_t b, int64_t steps,
                                                  uint64_t seed) {
  if (kind == SamplerKind::kTruncatedPoisson) {
    return MakeError(ErrorKind::kInvalidConfig,
                     "permutation batching needs a permutation sampler");
  }
  SamplerConfig config{kind, n, b, std::nullopt, steps};
  ABLQ_RETURN_IF_ERROR(ValidateConfig(config));
  const int64_t per_epoch = IntegerStepsPerEpoch(config);
  const int64_t epochs = IntegerEpochs(config);

  BatchManifest manifest;
  manifest.header = {kind, n, b, b, steps, seed};
  manifest.batches.reserve(static_cast<size_t>(steps));
  std::vector<int64_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), int64_t{0});
  if (kind == SamplerKind::kPersistentShuffle) {
    PhiloxStream stream(seed, StreamDomain::kPermutation, 0);
    ShufflePrefix(order, stream);
  }
  for (int64_t e = 1; e <= epochs; ++e) {
    if (kind == SamplerKind::kDynamicShuffle) {
      std::iota(order.begin(), order.end(), int64_t{0});
      PhiloxStream stream(seed, StreamDomain::kPermutation,
                          static_cast<uint64_t>(e));
      ShufflePrefix(order, stream);
    }
    for (int64_t s = 0; s < per_epoch; ++s) {
      std::vector<WeightedEntry> batch;
      batch.reserve(static_cast<size_t>(b));
      for (int64_t i = s * b; i < (s + 1) * b; ++i) {
        batch.push_back({order[static_cast<size_t>(i)], 1.0});
      }
      manifest.batches.push_back(std::move(batch));
    }
  }
  return manifest;
}

SamplerStats ComputeSamplerStats(const BatchManifest& manifest) {
  SamplerStats stats;
  const int64_t n = std::max<int64_t>(manifest.header.dataset_size, 0);
  stats.appearances.assign(static_cast<size_t>(n), 0);
  stats.padding.reserve(manifest.batches.size());
  for (const auto& batch : manifest.batches) {
    int64_t pads = 0;
    for (const WeightedEntry& e : batch) {
      if (e.weight == 0.0) {
        ++pads;
      } else if (e.record_id >= 0 && e.record_id < n) {
        ++stats.appearances[static_cast<size_t>(e.record_id)];
      }
    }
    stats.padding.push_back(pads);
  }
  if (n > 0) {
    const auto never = std::count(stats.appearances.begin(),
                                  stats.appearances.end(), int64_t{0});
    stats.never_sampled_fraction =
        static_cast<double>(never) / static_cast<double>(n);
  }
  for (int64_t size : manifest.pre_truncation_sizes) {
    if (size > manifest.header.max_batch_size) ++stats.truncation_events;
  }
  return stats;
}

std::string ManifestHeaderLine(const ManifestHeader& h) {
  return absl::StrCat("tps v1 n=", h.dataset_size, " b=", h.batch_size,
                      " B=", h.max_batch_size, " T=", h.steps,
                      " seed=", h.seed, " kind=", SamplerKindName(h.kind));
}

std::string ManifestBatchLine(int64_t batch_id,
                              const std::vector<WeightedEntry>& entries) {
  std::string line = absl::StrCat(batch_id, ";");
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i > 0) line.push_back(',');
    absl::StrAppend(&line, entries[i].record_id, ":",
                    entries[i].weight == 0.0 ? "0" : "1");
  }
  return line;
}

absl::Status WriteManifest(const BatchManifest& manifest, std::ostream& out) {
  out << ManifestHeaderLine(manifest.header) << '\n';
  for (size_t t = 0; t < manifest.batches.size(); ++t) {
    out << ManifestBatchLine(static_cast<int64_t>(t + 1), manifest.batches[t])
        << '\n';
  }
  if (!out) return MakeError(ErrorKind::kInvalidArgument, "write failed");
  return absl::OkStatus();
}

absl::StatusOr<BatchManifest> ReadManifest(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return ParseError("empty manifest");
  std::vector<absl::string_view> tokens =
      absl::StrSplit(line, ' ', absl::SkipEmpty());
  if (tokens.size() != 8 || tokens[0] != "tps" || tokens[1] != "v1") {
    return ParseError("manifest header must start with 'tps v1'");
  }
  BatchManifest manifest;
  ManifestHeader& h = manifest.header;
  ABLQ_RETURN_IF_ERROR(ParseField(tokens[2], "n", &h.dataset_size));
  ABLQ_RETURN_IF_ERROR(ParseField(tokens[3], "b", &h.batch_size));
  ABLQ_RETURN_IF_ERROR(ParseField(tokens[4], "B", &h.max_batch_size));
  ABLQ_RETURN_IF_ERROR(ParseField(tokens[5], "T", &h.steps));
  ABLQ_RETURN_IF_ERROR(ParseField(tokens[6], "seed", &h.seed));
  if (!absl::StartsWith(tokens[7], "kind=")) {
    return ParseError("manifest header lacks kind=");
  }
  auto kind = ParseSamplerKind(tokens[7].substr(5));
  if (!kind.ok()) return ParseError(kind.status().message());
  h.kind = *kind;

  int64_t expected_id = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const size_t semi = line.find(';');
    int64_t batch_id = 0;
    if (semi == std::string::npos ||
        !absl::SimpleAtoi(absl::string_view(line).substr(0, semi), &batch_id) ||
        batch_id != expected_id) {
      return ParseError(absl::StrCat("bad batch line ", expected_id));
    }
    std::vector<WeightedEntry> batch;
    const absl::string_view body = absl::string_view(line).substr(semi + 1);
    if (!body.empty()) {
      for (absl::string_view item : absl::StrSplit(body, ',')) {
        const size_t colon = item.find(':');
        WeightedEntry entry;
        int weight = 0;
        if (colon == absl::string_view::npos ||
            !absl::SimpleAtoi(item.substr(0, colon), &entry.record_id) ||
            !absl::SimpleAtoi(item.substr(colon + 1), &weight) ||
            (weight != 0 && weight != 1)) {
          return ParseError(absl::StrCat("bad entry '", item, "' in batch ",
                                         batch_id));
        }
        entry.weight = weight;
        batch.push_back(entry);
      }
    }
    manifest.batches.push_back(std::move(batch));
    ++expected_id;
  }
  if (static_cast<int64_t>(manifest.batches.size()) != h.steps) {
    return ParseError(absl::StrCat("manifest has ", manifest.batches.size(),
                                   " batches, header says T=", h.steps));
  }
  return manifest;
}

}  // namespace ablq
