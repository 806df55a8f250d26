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
#include <optional>
#include <string>
#include <vector>

#include "adaptkf/features.hpp"
#include "adaptkf/filters.hpp"
#include "adaptkf/models.hpp"
#include "adaptkf/nn.hpp"

namespace adaptkf {

// ---------------------------------------------------------------------------
// Costs

enum class CostKind { Nis, LogMaxNis, StateInnov };

const char* to_string(CostKind kind);
/// Accepts "nis", "logmaxnis", "stateinnov".
CostKind cost_kind_from_string(const std::string& name);

struct CostSpec {
  CostKind kind = CostKind::Nis;
  /// Penalty per stochastic-integration iteration. Must be 0 for unscented
  /// action sets, where every kappa costs the same to evaluate.
  double compute_weight = 0.0;

  friend bool operator==(const CostSpec&, const CostSpec&) = default;
};

/// Instantaneous cost of an update made with `action`:
///   Nis        (nis - n_z)^2
///   LogMaxNis  ln(1 + max(0, nis - n_z))
///   StateInnov ||K * innovation||_2
/// plus compute_weight * n_iter for stochastic-integration actions.
double step_cost(const CostSpec& spec, const UpdateResult& update, const TransformParams& action,
                 int n_z);

/// delta = cost + gamma * v_next_target - v_now
double td_error(double cost, double gamma, double v_next_target, double v_now);

// ---------------------------------------------------------------------------
// Actions

/// Discrete parameter set the policy chooses from.
struct ActionSet {
  std::vector<TransformParams> values;

  std::size_t size() const { return values.size(); }
  const TransformParams& operator[](std::size_t i) const { return values[i]; }
  FilterKind kind() const { return values.front().kind; }
  std::optional<std::size_t> index_of(const TransformParams& params) const;
  /// Index of the entry whose value is closest to params (lowest on ties).
  std::size_t nearest(const TransformParams& params) const;
  /// Throws InvalidArgument if empty, mixed-kind or invalid in dimension n.
  void validate(int state_dim) const;

  /// kappa in {0, 0.5, 1, 2, 3, 5} or n_iter in {1, 2, 5, 10, 20, 50}.
  static ActionSet defaults(FilterKind kind);
  static ActionSet from_values(FilterKind kind, const std::vector<double>& values);

  friend bool operator==(const ActionSet&, const ActionSet&) = default;
};

struct ActionSample {
  std::size_t index = 0;
  std::vector<double> probs;
};

/// Index drawn with probability probs[i] (one uniform draw).
std::size_t sample_categorical(std::span<const double> probs, RandomStream& rng);

/// Categorical draw from softmax(actor(features)).
ActionSample sample_action(const nn::Mlp& actor, const Vector& features, RandomStream& rng);

/// d(-ln pi_selected)/d logits = pi - onehot(selected).
std::vector<double> neg_log_prob_gradient(std::span<const double> probs, std::size_t selected);

/// Gradient w.r.t. the logits of delta * ln pi_selected - entropy_coeff * H(pi).
/// Minimizing it lowers the probability of actions whose cost exceeded the
/// critic's estimate (delta > 0) and keeps the policy from collapsing early.
std::vector<double> actor_logit_gradient(std::span<const double> probs, std::size_t selected,
                                         double delta, double entropy_coeff);

// ---------------------------------------------------------------------------
// Environments

struct Transition {
  double cost = 0.0;
  Vector next_features;  // raw (unnormalized) features of the next decision
  bool done = false;     // true after the last transition of the episode
};

/// Episodic decision process seen by the trainer. Features are returned
/// unnormalized; the trainer owns the normalization.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int feature_dim() const = 0;
  virtual std::size_t num_actions() const = 0;
  /// Action used while collecting normalization statistics.
  virtual std::size_t default_action() const = 0;
  /// Starts an episode and returns the raw features of its first decision.
  virtual Vector reset(std::uint64_t episode_seed) = 0;
  /// Throws adaptkf::Error when the underlying filter breaks down.
  virtual Transition step(std::size_t action) = 0;
};

/// Gaussian-assumed filter driven through simulated trajectories: each
/// decision picks the measurement-update parameter for time k = 1..T-1.
class FilterEnvironment final : public Environment {
 public:
  FilterEnvironment(StateSpaceModel model, ActionSet actions, CostSpec cost);

  int feature_dim() const override;
  std::size_t num_actions() const override { return actions_.size(); }
  std::size_t default_action() const override;
  Vector reset(std::uint64_t episode_seed) override;
  Transition step(std::size_t action) override;

  int time_index() const { return k_; }
  const GaussianBelief& predictive() const { return pred_; }

 private:
  Vector features_at(int k);

  StateSpaceModel model_;
  ActionSet actions_;
  CostSpec cost_;
  TransformParams predict_params_;
  Trajectory traj_;
  std::optional<FilterStreams> streams_;
  GaussianBelief pred_;
  int k_ = 1;
};

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  double gamma = 0.5;
  int n_episodes = 1000;
  double tau = 0.01;
  double actor_lr = 1e-4;
  double critic_lr = 5e-4;
  double entropy_coeff = 1e-3;
  CostSpec cost;
  ActionSet action_set = ActionSet::defaults(FilterKind::Unscented);
  std::uint64_t master_seed = 0;
  int normalization_warmup_episodes = 50;
  std::vector<int> hidden_layers = {64, 64};

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct EpisodeLog {
  int episode = 0;
  double cumulative_cost = 0.0;
  double mean_entropy = 0.0;
  double mean_abs_delta = 0.0;
  int steps = 0;
  bool aborted = false;  // the filter broke down before the horizon
};

/// Counts of every write to each parameter set during training.
struct ParameterProvenance {
  long actor_gradient_steps = 0;
  long critic_gradient_steps = 0;
  long target_gradient_steps = 0;  // stays 0: the target is never fed gradients
  long target_polyak_updates = 0;
};

struct TrainResult {
  nn::Mlp actor;
  nn::Mlp critic;
  nn::Mlp target_critic;
  FeatureNormalization normalization;
  std::vector<EpisodeLog> log;
  ParameterProvenance provenance;
};

/// Fresh actor/critic pair as initialized from master_seed.
TrainResult initial_networks(int feature_dim, std::size_t num_actions, const TrainConfig& cfg);

/// On-policy actor-critic TD(0) with a Polyak-averaged target critic and
/// entropy regularization, one gradient step per transition.
/// Throws Error(TrainingDiverged) if a parameter becomes non-finite.
TrainResult train(Environment& env, const TrainConfig& cfg);

TrainResult train(const StateSpaceModel& model, FilterKind kind, const TrainConfig& cfg);

}  // namespace adaptkf
