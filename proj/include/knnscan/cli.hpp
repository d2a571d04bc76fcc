// Copyright 2026 The knnscan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace knnscan {

// Process exit codes of the `knnscan` tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     // unexpected internal error
  kExitUsage = 2,       // bad or missing command-line arguments
  kExitIo = 3,          // unreadable input or unwritable output
  kExitValidation = 4,  // malformed input data or invalid parameter values
  kExitNumerical = 5,   // non-finite intermediate results
  kExitFamily = 6,      // no admissible neighborhood of the requested size
};

// Runs the tool on `args` (without the program name). Results go to `out`,
// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace knnscan
