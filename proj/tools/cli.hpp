// Copyright 2026 The weakbell Authors
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

/**
 * @file
 * The `weakbell` command-line front end.
 *
 * Exit codes: 0 on success, 2 for usage or validation errors, 1 for internal
 * errors; the reason goes to the error stream.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace weakbell::cli {

/// Environment variable naming the default output directory.
inline constexpr const char *kOutputDirEnv = "WEAKBELL_OUTPUT_DIR";

/// Runs one command. Results without --out (and without the output-directory
/// variable) go to `out`.
int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err);
int run_cli(int argc, const char *const *argv, std::ostream &out,
            std::ostream &err);

/// Parses "start:stop:step" (inclusive within half a step), "a,b,c" or a
/// single number. Throws InvalidParameter.
std::vector<double> parse_range(std::string_view text);

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomically(const std::string &path, const std::string &content);

} // namespace weakbell::cli
