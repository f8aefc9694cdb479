// Copyright 2026 The nnUZoo Authors
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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nnuzoo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;    // bad arguments, unknown names, malformed data
inline constexpr int kExitUndefined = 3;  // statistical test undefined

/// Name of the run manifest written into every output directory.
inline constexpr const char* kRunManifest = "run.json";

std::string version();

/// Runs one subcommand. argv excludes the program name.
int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int run_command(int argc, const char* const* argv);

}  // namespace nnuzoo::cli
