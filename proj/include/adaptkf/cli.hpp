// Copyright 2026 The adaptkf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
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

#include "adaptkf/eval.hpp"

namespace adaptkf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Parses `default,fixed:<v>[,<v>...],myopic,optimal,adaptive:<path>`.
/// Bare numbers extend the preceding fixed list. Throws
/// Error(InvalidArgument) on unknown entries and Error(CheckpointMismatch)
/// when a checkpoint does not fit the model or filter.
std::vector<NamedPolicy> parse_baselines(const std::string& spec, const StateSpaceModel& model,
                                         FilterKind kind, const ActionSet& actions,
                                         const CostSpec& cost);

/// Entry point behind the `adaptkf` executable. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace adaptkf::cli
