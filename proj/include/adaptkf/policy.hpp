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
#include <memory>
#include <string>
#include <vector>

#include "adaptkf/features.hpp"
#include "adaptkf/filters.hpp"
#include "adaptkf/models.hpp"
#include "adaptkf/nn.hpp"
#include "adaptkf/rl.hpp"

namespace adaptkf {

/// Everything needed to deploy a trained actor.
struct PolicyCheckpoint {
  static constexpr const char* kVersion = "adaptkf-policy/1";

  std::string version = kVersion;
  std::string model;
  FilterKind filter = FilterKind::Unscented;
  CostSpec cost;
  double gamma = 0.5;
  std::uint64_t seed = 0;
  ActionSet action_set;
  FeatureNormalization normalization;
  nn::Mlp actor;

  /// Throws CheckpointMismatch when the pieces do not fit together.
  void validate() const;
};

/// JSON document; doubles are written in shortest round-trip form.
std::string checkpoint_to_json(const PolicyCheckpoint& ckpt);
PolicyCheckpoint checkpoint_from_json(const std::string& text);
void save_checkpoint(const PolicyCheckpoint& ckpt, const std::string& path);
PolicyCheckpoint load_checkpoint(const std::string& path);

enum class PolicyKind { AdaptiveGreedy, Fixed, Default, Myopic, MaxLikelihood };

/// A rule for choosing the update parameter at every step of a run.
struct ParamPolicy {
  PolicyKind kind = PolicyKind::Default;
  TransformParams fixed;                            // Fixed
  ActionSet candidates;                             // Myopic, MaxLikelihood
  CostSpec cost;                                    // Myopic
  std::shared_ptr<const PolicyCheckpoint> adaptive; // AdaptiveGreedy

  static ParamPolicy fixed_value(const TransformParams& params);
  static ParamPolicy default_value();
  static ParamPolicy myopic(ActionSet candidates, CostSpec cost);
  static ParamPolicy max_likelihood(ActionSet candidates);
  static ParamPolicy adaptive_greedy(std::shared_ptr<const PolicyCheckpoint> checkpoint);

  /// Throws InvalidArgument when the policy cannot drive a filter of `kind`.
  void validate(const StateSpaceModel& model, FilterKind kind) const;
};

/// argmax of the actor's distribution; lowest index on ties.
std::size_t select_adaptive_index(const nn::Mlp& actor, const FeatureNormalization& norm,
                                  const GaussianBelief& pred, const Vector& z,
                                  const Vector& nominal_innov);
TransformParams select_adaptive(const nn::Mlp& actor, const FeatureNormalization& norm,
                                const ActionSet& actions, const GaussianBelief& pred,
                                const Vector& z, const Vector& nominal_innov);

/// kappa = max(0, 3 - n_x) or n_iter = 10.
TransformParams select_default(const StateSpaceModel& model, FilterKind kind);

/// Winning candidate of a per-step search, with its update so the caller
/// does not have to recompute it.
struct Selection {
  std::size_t index = 0;
  TransformParams params;
  UpdateResult update;
  double score = 0.0;  // cost for myopic, log-likelihood for max-likelihood
};

/// Per-step argmin of step_cost over the candidates (compute penalty
/// included). Candidates whose update fails are skipped; throws
/// AllActionsFailed if none succeeds. Lowest index wins ties.
Selection select_myopic(const GaussianBelief& pred, const StateSpaceModel& model, const Vector& z,
                        int k, const ActionSet& actions, const CostSpec& cost,
                        const FilterStreams& streams);

/// -1/2 [ln det(2 pi Pzz) + nis]
double measurement_log_likelihood(const UpdateResult& update);

/// Per-step argmax of the measurement log-likelihood; unscented only.
Selection select_max_likelihood(const GaussianBelief& pred, const StateSpaceModel& model,
                                const Vector& z, int k, const ActionSet& actions,
                                const FilterStreams& streams);

struct StepRecord {
  int k = 0;
  TransformParams params;
  double cost = 0.0;
  UpdateResult update;  // update.posterior is the filtering belief at k
};

struct FilterRun {
  std::vector<StepRecord> steps;
  bool diverged = false;
  std::string failure;
};

/// Runs the filter over a trajectory, choosing each update parameter with
/// `policy` and recording `cost` for every step. Randomness comes from
/// `streams`, so identical inputs give identical runs. A filter breakdown
/// stops the run and marks it diverged.
FilterRun run_filter(const StateSpaceModel& model, FilterKind kind, const ParamPolicy& policy,
                     const Trajectory& traj, const FilterStreams& streams, const CostSpec& cost);

}  // namespace adaptkf
