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

#include "ablq/errors.h"

#include <optional>

#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"

namespace ablq {
namespace {

constexpr char kErrorKindUrl[] = "ablq/error-kind";

absl::StatusCode CodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidConfig:
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kGridTooCoarse:
    case ErrorKind::kParseError:
      return absl::StatusCode::kInvalidArgument;
    case ErrorKind::kOverflow:
      return absl::StatusCode::kResourceExhausted;
    case ErrorKind::kInfeasible:
    case ErrorKind::kDegenerateRange:
    case ErrorKind::kManifestMismatch:
      return absl::StatusCode::kFailedPrecondition;
    case ErrorKind::kNoConvergence:
    case ErrorKind::kBracketFailure:
      return absl::StatusCode::kOutOfRange;
    case ErrorKind::kNumericalCancellation:
      return absl::StatusCode::kInternal;
  }
  return absl::StatusCode::kUnknown;
}

}  // namespace

absl::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidConfig:
      return "InvalidConfig";
    case ErrorKind::kInvalidArgument:
      return "InvalidArgument";
    case ErrorKind::kGridTooCoarse:
      return "GridTooCoarse";
    case ErrorKind::kOverflow:
      return "Overflow";
    case ErrorKind::kInfeasible:
      return "Infeasible";
    case ErrorKind::kNoConvergence:
      return "NoConvergence";
    case ErrorKind::kBracketFailure:
      return "BracketFailure";
    case ErrorKind::kNumericalCancellation:
      return "NumericalCancellation";
    case ErrorKind::kDegenerateRange:
      return "DegenerateRange";
    case ErrorKind::kManifestMismatch:
      return "ManifestMismatch";
    case ErrorKind::kParseError:
      return "ParseError";
  }
  return "Unknown";
}

absl::Status MakeError(ErrorKind kind, absl::string_view message) {
  absl::Status status(CodeFor(kind), message);
  status.SetPayload(kErrorKindUrl, absl::Cord(ErrorKindName(kind)));
  return status;
}

std::string ErrorName(const absl::Status& status) {
  if (status.ok()) return "";
  absl::optional<absl::Cord> payload = status.GetPayload(kErrorKindUrl);
  if (payload.has_value()) return std::string(*payload);
  return absl::StatusCodeToString(status.code());
}

bool IsError(const absl::Status& status, ErrorKind kind) {
  return ErrorName(status) == ErrorKindName(kind);
}

}  // namespace ablq
