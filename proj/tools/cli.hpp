// Copyright 2026 The qitsim Authors
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

#include <ostream>
#include <string>
#include <vector>

#include "qitsim/serialize.hpp"

namespace qitsim::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kRuntimeError = 3;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "QITSIM_OUT_DIR";

/// Runs one command line (args excludes the program name). Primary outputs
/// go to the output directory; a metadata.json sidecar holds the timestamp.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The RunSpec schema every resolved configuration is validated against.
const io::Json& run_spec_schema();

/// Executes an already-resolved RunSpec. Returns the exit code.
int execute(const io::Json& spec, std::ostream& out, std::ostream& err);

/// "0.5", "-0.5i", "0.5+0.5i", "i" (j also accepted).
Complex parse_complex(const std::string& token);
std::vector<Complex> parse_complex_list(const std::string& text);

}  // namespace qitsim::cli
