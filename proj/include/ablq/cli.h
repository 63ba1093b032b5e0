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

// Command-line front end: delta, epsilon, calibrate-sigma, choose-max-batch,
// sweep, sample and simulate.

#ifndef ABLQ_CLI_H_
#define ABLQ_CLI_H_

#include <ostream>

namespace ablq {

// Returns 0 on success, 2 on flag or configuration errors (with a usage
// hint) and 1 on numerical failures, which are reported as
// "error: <ErrorName>: <message>".
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace ablq

#endif  // ABLQ_CLI_H_
