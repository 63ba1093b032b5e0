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

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Each
// (key, counter) pair maps to four independent 32-bit words, so a stream can
// be addressed by id without any sequential state shared between shards.

#ifndef ABLQ_PHILOX_H_
#define ABLQ_PHILOX_H_

#include <array>
#include <cstdint>

namespace ablq {

using PhiloxCounter = std::array<uint32_t, 4>;
using PhiloxKey = std::array<uint32_t, 2>;

inline PhiloxCounter Philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  constexpr uint32_t kM0 = 0xD2511F53u;
  constexpr uint32_t kM1 = 0xCD9E8D57u;
  constexpr uint32_t kW0 = 0x9E3779B9u;
  constexpr uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = static_cast<uint64_t>(kM0) * ctr[0];
    const uint64_t p1 = static_cast<uint64_t>(kM1) * ctr[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    const uint32_t lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

// Stream domains keep membership, truncation, permutation and noise draws
// for the same (seed, id) independent.
enum class StreamDomain : uint32_t {
  kMembership = 1,
  kTruncation = 2,
  kPermutation = 3,
  kNoise = 4,
  kData = 5,
};

// Sequential reader over the stream (seed, domain, id).
class PhiloxStream {
 public:
  PhiloxStream(uint64_t seed, StreamDomain domain, uint64_t id)
      : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
        domain_(static_cast<uint32_t>(domain)),
        id_(id) {}

  uint32_t NextU32() {
    if (used_ == 4) Refill();
    return block_[used_++];
  }

  uint64_t NextU64() {
    const uint64_t hi = NextU32();
    return (hi << 32) | NextU32();
  }

  // Uniform on the open interval (0, 1) with 53 random bits.
  double NextUniform() {
    return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by multiply-shift; bias below 2^-64 * bound.
  uint64_t NextBelow(uint64_t bound) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(NextU64()) * bound) >> 64);
  }

 private:
  void Refill() {
    block_ = Philox4x32({block_index_, domain_, static_cast<uint32_t>(id_),
                         static_cast<uint32_t>(id_ >> 32)},
                        key_);
    ++block_index_;
    used_ = 0;
  }

  PhiloxKey key_;
  uint32_t domain_;
  uint64_t id_;
  uint32_t block_index_ = 0;
  PhiloxCounter block_{};
  int used_ = 4;
};

}  // namespace ablq

#endif  // ABLQ_PHILOX_H_
