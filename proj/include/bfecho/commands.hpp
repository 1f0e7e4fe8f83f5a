// Copyright 2026 The bfecho Authors
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

#ifndef BFECHO_COMMANDS_HPP
#define BFECHO_COMMANDS_HPP

#include "bfecho/config.hpp"

#include <filesystem>
#include <vector>

namespace bfecho::cli {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Probe state named by config.state for a system of config.n particles.
Ket make_probe(const RunConfig& config);

/// Runs one subcommand and returns the data files it wrote (sidecars are
/// written next to each as <file>.meta.json). Creates out_dir if needed.
std::vector<std::filesystem::path> run_command(Command command, const RunConfig& config);

} // namespace bfecho::cli

#endif
