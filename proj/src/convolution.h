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

#ifndef ABLQ_SRC_CONVOLUTION_H_
#define ABLQ_SRC_CONVOLUTION_H_

#include <span>
#include <vector>

namespace ablq::internal {

// Linear convolution of two non-negative sequences. Small inputs are summed
// directly; larger ones go through a real FFT. Tiny negative values produced
// by FFT round-off are clamped to zero.
std::vector<double> Convolve(std::span<const double> a,
                             std::span<const double> b);

std::vector<double> ConvolveDirect(std::span<const double> a,
                                   std::span<const double> b);
std::vector<double> ConvolveFft(std::span<const double> a,
                                std::span<const double> b);

}  // namespace ablq::internal

#endif  // ABLQ_SRC_CONVOLUTION_H_
