/*
 * Copyright 2026 The Fairbound Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FAIRBOUND_CLI_COMMANDS_H_
#define FAIRBOUND_CLI_COMMANDS_H_

#include <ostream>
#include <string>
#include <vector>

namespace fairbound::cli {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // check FAIL, eval containment FAIL
inline constexpr int kExitError = 2;        // usage, I/O and library errors
inline constexpr int kExitInfeasible = 3;   // training did not reach feasibility

// Runs one command line (without the program name). Reports go to `out`,
// diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace fairbound::cli

#endif  // FAIRBOUND_CLI_COMMANDS_H_
