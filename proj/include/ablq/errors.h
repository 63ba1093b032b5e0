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

#ifndef ABLQ_ERRORS_H_
#define ABLQ_ERRORS_H_

#include <string>

#include "absl/status/status.h"
#include "absl/strings/string_view.h"

namespace ablq {

// Named failure modes surfaced by the accounting, sampling and simulation
// layers. The name travels with the absl::Status as a payload so callers (the
// CLI in particular) can report it without parsing messages.
enum class ErrorKind {
  kInvalidConfig,
  kInvalidArgument,
  kGridTooCoarse,
  kOverflow,
  kInfeasible,
  kNoConvergence,
  kBracketFailure,
  kNumericalCancellation,
  kDegenerateRange,
  kManifestMismatch,
  kParseError,
};

absl::string_view ErrorKindName(ErrorKind kind);

absl::Status MakeError(ErrorKind kind, absl::string_view message);

// Returns the ErrorKind name attached to `status`, or the canonical absl code
// name when the status did not originate from MakeError. Empty for OK.
std::string ErrorName(const absl::Status& status);

bool IsError(const absl::Status& status, ErrorKind kind);

}  // namespace ablq

#endif  // ABLQ_ERRORS_H_
