// Copyright 2026 The vgrounding Authors
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

#ifndef VGROUNDING_CLI_HPP_
#define VGROUNDING_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace vgrounding {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitBadFlags = 2,
  kExitDataset = 3,
  kExitNumeric = 4,
};

/// Entry point of the `vground` tool. `args` excludes the program name.
/// Machine-readable output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace vgrounding

#endif  // VGROUNDING_CLI_HPP_
