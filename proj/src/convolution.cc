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

#include "convolution.h"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstring>
#include <memory>
#include <mutex>

namespace ablq::internal {
namespace {

constexpr size_t kDirectMaxShort = 48;
constexpr size_t kDirectMaxProduct = size_t{1} << 20;

// FFTW's planner is not re-entrant; fftw_execute on distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> Allocate(size_t count) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * count)));
}

class Plan {
 public:
  explicit Plan(fftw_plan plan) : plan_(plan) {}
  ~Plan() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void Execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

// Smallest 2^a 3^b 5^c >= n.
size_t FastFftSize(size_t n) {
  size_t best = size_t{1};
  while (best < n) best <<= 1;
  for (size_t p5 = 1; p5 < best; p5 *= 5) {
    for (size_t p35 = p5; p35 < best; p35 *= 3) {
      size_t candidate = p35;
      while (candidate < n) candidate <<= 1;
      best = std::min(best, candidate);
    }
  }
  return best;
}

void ForwardTransform(std::span<const double> input, size_t size,
                      fftw_complex* out) {
  FftwBuffer<double> real = Allocate<double>(size);
  std::fill(real.get(), real.get() + size, 0.0);
  std::copy(input.begin(), input.end(), real.get());
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(
        static_cast<int>(size), real.get(), out, FFTW_ESTIMATE));
  }
  plan->Execute();
}

}  // namespace

std::vector<double> ConvolveDirect(std::span<const double> a,
                                   std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    double* row = out.data() + i;
    for (size_t j = 0; j < b.size(); ++j) row[j] += ai * b[j];
  }
  return out;
}

std::vector<double> ConvolveFft(std::span<const double> a,
                                std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const size_t out_size = a.size() + b.size() - 1;
  const size_t size = FastFftSize(out_size);
  const size_t spectrum = size / 2 + 1;
  const bool self = a.data() == b.data() && a.size() == b.size();

  FftwBuffer<fftw_complex> fa = Allocate<fftw_complex>(spectrum);
  ForwardTransform(a, size, fa.get());
  if (self) {
    for (size_t i = 0; i < spectrum; ++i) {
      const std::complex<double> z(fa[i][0], fa[i][1]);
      const std::complex<double> sq = z * z;
      fa[i][0] = sq.real();
      fa[i][1] = sq.imag();
    }
  } else {
    FftwBuffer<fftw_complex> fb = Allocate<fftw_complex>(spectrum);
    ForwardTransform(b, size, fb.get());
    for (size_t i = 0; i < spectrum; ++i) {
      const std::complex<double> za(fa[i][0], fa[i][1]);
      const std::complex<double> zb(fb[i][0], fb[i][1]);
      const std::complex<double> prod = za * zb;
      fa[i][0] = prod.real();
      fa[i][1] = prod.imag();
    }
  }

  FftwBuffer<double> real = Allocate<double>(size);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_c2r_1d(
        static_cast<int>(size), fa.get(), real.get(), FFTW_ESTIMATE));
  }
  plan->Execute();

  const double scale = 1.0 / static_cast<double>(size);
  std::vector<double> out(out_size);
  for (size_t i = 0; i < out_size; ++i) {
    out[i] = std::max(0.0, real[i] * scale);
  }
  return out;
}

std::vector<double> Convolve(std::span<const double> a,
                             std::span<const double> b) {
  const size_t shorter = std::min(a.size(), b.size());
  if (shorter <= kDirectMaxShort || a.size() * b.size() <= kDirectMaxProduct) {
    return ConvolveDirect(a, b);
  }
  return ConvolveFft(a, b);
}

}  // namespace ablq::internal
