/* Copyright 2026 The sgmod Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Command-line front end. Exit status: 0 success, 1 input error,
// 2 internal invariant failure, 3 losscheck tolerance failure.

#ifndef SGMOD_TOOLS_CLI_H_
#define SGMOD_TOOLS_CLI_H_

#include <ostream>

namespace sgmod {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInvariantError = 2;
inline constexpr int kExitToleranceFailure = 3;

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace sgmod

#endif  // SGMOD_TOOLS_CLI_H_
