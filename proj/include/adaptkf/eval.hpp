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

#include <cstdint>
#include <string>
#include <vector>

#include "adaptkf/policy.hpp"

namespace adaptkf {

/// errors[run][step]; every run must have the same number of steps.
/// RMSE_k = sqrt(mean over runs of |e|^2).
std::vector<double> rmse_series(const std::vector<std::vector<Vector>>& errors);

struct AneesResult {
  std::vector<double> series;
  std::vector<std::size_t> excluded_runs;  // a covariance could not be factored
};

/// ANEES_k = mean over runs of e' P^-1 e. Runs with a singular covariance at
/// any step are dropped from every step.
AneesResult anees_series(const std::vector<std::vector<Vector>>& errors,
                         const std::vector<std::vector<Matrix>>& covs);

struct NamedPolicy {
  std::string name;
  ParamPolicy policy;
};

struct EvalConfig {
  int n_runs = 500;
  std::uint64_t master_seed = 0;
  std::vector<NamedPolicy> policies;
  CostSpec cost;
  int workers = 1;
  /// Leading steps left out of the time averages.
  int time_avg_warmup = 0;
  /// Report ANEES / n_x instead of raw ANEES.
  bool normalize_anees = false;

  void validate() const;
};

struct PolicyReport {
  std::string name;
  std::vector<double> rmse;
  std::vector<double> anees;
  std::vector<double> mean_cost;
  double time_avg_rmse = 0.0;
  double time_avg_anees = 0.0;
  double time_avg_cost = 0.0;
  int divergence_count = 0;
  /// Distinct parameter values chosen, ascending, and how often each was
  /// chosen at each step (param_counts[k-1][j] for param_values[j]).
  std::vector<double> param_values;
  std::vector<std::vector<long>> param_counts;
  /// Hash over the trajectories this policy was run on, in run order.
  std::uint64_t trajectory_digest = 0;
};

struct EvalReport {
  std::string model;
  FilterKind filter = FilterKind::Unscented;
  int horizon = 0;
  int n_runs = 0;
  std::vector<std::uint64_t> trajectory_hashes;
  std::vector<PolicyReport> policies;

  const PolicyReport& policy(const std::string& name) const;
};

/// Simulates n_runs trajectories and runs every policy on each of them.
/// Results do not depend on the worker count.
EvalReport evaluate(const StateSpaceModel& model, FilterKind kind, const EvalConfig& cfg);

}  // namespace adaptkf
