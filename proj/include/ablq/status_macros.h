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

#ifndef ABLQ_STATUS_MACROS_H_
#define ABLQ_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define ABLQ_STATUS_CONCAT_INNER_(a, b) a##b
#define ABLQ_STATUS_CONCAT_(a, b) ABLQ_STATUS_CONCAT_INNER_(a, b)

#define ABLQ_RETURN_IF_ERROR(expr)            \
  do {                                        \
    const absl::Status _ablq_status = (expr); \
    if (!_ablq_status.ok()) {                 \
      return _ablq_status;                    \
    }                                         \
  } while (0)

#define ABLQ_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                \
  if (!statusor.ok()) {                                   \
    return statusor.status();                             \
  }                                                       \
  lhs = std::move(statusor).value()

#define ABLQ_ASSIGN_OR_RETURN(lhs, rexpr) \
  ABLQ_ASSIGN_OR_RETURN_IMPL_(            \
      ABLQ_STATUS_CONCAT_(_ablq_statusor_, __LINE__), lhs, rexpr)

#endif  // ABLQ_STATUS_MACROS_H_
