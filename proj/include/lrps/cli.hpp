// Copyright 2026 The lrps Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LRPS_CLI_HPP
#define LRPS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace lrps {

/// Exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitConfigError = 2;

/// Entry point of the `lrps` tool. `args` excludes the program name.
/// Subcommands: bandit, loadunload, bounds, evaluate, archive, run.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lrps

#endif  // LRPS_CLI_HPP
