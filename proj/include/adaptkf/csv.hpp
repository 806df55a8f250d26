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

#include <string>
#include <vector>

#include "adaptkf/eval.hpp"
#include "adaptkf/models.hpp"
#include "adaptkf/rl.hpp"

namespace adaptkf::csv {

/// Round-trip decimal form (%.17g).
std::string format_double(double v);

/// k, x1..xn, z1..zm
std::string trajectory(const Trajectory& traj);
/// episode, cumulative_cost, mean_entropy, mean_abs_delta, steps, aborted
std::string training_log(const std::vector<EpisodeLog>& log);
/// policy, k, rmse, anees, mean_cost
std::string eval_steps(const EvalReport& report);
/// policy, time_avg_rmse, time_avg_anees, time_avg_cost, divergence_count, runs
std::string eval_summary(const EvalReport& report);
/// policy, time_avg_rmse, time_avg_anees
std::string eval_tradeoff(const EvalReport& report);

/// Throws Error(Io) on failure.
void write_file(const std::string& path, const std::string& contents);

}  // namespace adaptkf::csv
