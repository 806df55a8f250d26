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

#include "adaptkf/rl.hpp"

#include <algorithm>
#include <cmath>

namespace adaptkf {

const char* to_string(CostKind kind) {
  switch (kind) {
    case CostKind::Nis: return "nis";
    case CostKind::LogMaxNis: return "logmaxnis";
    case CostKind::StateInnov: return "stateinnov";
  }
  return "unknown";
}

CostKind cost_kind_from_string(const std::string& name) {
  if (name == "nis") return CostKind::Nis;
  if (name == "logmaxnis") return CostKind::LogMaxNis;
  if (name == "stateinnov") return CostKind::StateInnov;
  throw Error(ErrorCode::InvalidArgument, "unknown cost '" + name + "'");
}

double step_cost(const CostSpec& spec, const UpdateResult& update, const TransformParams& action,
                 int n_z) {
  double cost = 0.0;
  switch (spec.kind) {
    case CostKind::Nis: {
      const double excess = update.nis - n_z;
      cost = excess * excess;
      break;
    }
    case CostKind::LogMaxNis:
      cost = std::log1p(std::max(0.0, update.nis - n_z));
      break;
    case CostKind::StateInnov:
      cost = (update.gain * update.innovation).norm();
      break;
  }
  if (action.kind == FilterKind::StochasticIntegration) {
    cost += spec.compute_weight * action.n_iter;
  }
  return cost;
}

double td_error(double cost, double gamma, double v_next_target, double v_now) {
  return cost + gamma * v_next_target - v_now;
}

std::optional<std::size_t> ActionSet::index_of(const TransformParams& params) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == params) return i;
  }
  return std::nullopt;
}

std::size_t ActionSet::nearest(const TransformParams& params) const {
  std::size_t best = 0;
  double best_gap = std::abs(values.front().value() - params.value());
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double gap = std::abs(values[i].value() - params.value());
    if (gap < best_gap) {
      best = i;
      best_gap = gap;
    }
  }
  return best;
}

void ActionSet::validate(int state_dim) const {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "action set is empty");
  for (const auto& v : values) {
    if (v.kind != values.front().kind) {
      throw Error(ErrorCode::InvalidArgument, "action set mixes filter kinds");
    }
    v.validate(state_dim);
  }
}

ActionSet ActionSet::defaults(FilterKind kind) {
  if (kind == FilterKind::Unscented) return from_values(kind, {0, 0.5, 1, 2, 3, 5});
  return from_values(kind, {1, 2, 5, 10, 20, 50});
}

ActionSet ActionSet::from_values(FilterKind kind, const std::vector<double>& values) {
  ActionSet set;
  for (double v : values) {
    if (kind == FilterKind::Unscented) {
      set.values.push_back(TransformParams::unscented(v));
    } else {
      if (v != std::floor(v) || v < 1) {
        throw Error(ErrorCode::InvalidArgument, "iteration counts must be positive integers");
      }
      set.values.push_back(TransformParams::stochastic(static_cast<int>(v)));
    }
  }
  return set;
}

std::size_t sample_categorical(std::span<const double> probs, RandomStream& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return probs.size() - 1;
}

ActionSample sample_action(const nn::Mlp& actor, const Vector& features, RandomStream& rng) {
  const auto logits = nn::evaluate(actor, {features.data(), static_cast<std::size_t>(features.size())});
  ActionSample out;
  out.probs = nn::softmax(logits);
  out.index = sample_categorical(out.probs, rng);
  return out;
}

std::vector<double> neg_log_prob_gradient(std::span<const double> probs, std::size_t selected) {
  std::vector<double> g(probs.begin(), probs.end());
  g[selected] -= 1.0;
  return g;
}

std::vector<double> actor_logit_gradient(std::span<const double> probs, std::size_t selected,
                                         double delta, double entropy_coeff) {
  const double h = nn::entropy(probs);
  std::vector<double> g(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    // d(delta * ln p_sel)/dz_i
    g[i] = delta * ((i == selected ? 1.0 : 0.0) - p);
    // d(-c * H)/dz_i = c * p_i * (ln p_i + H)
    if (p > 0.0) g[i] += entropy_coeff * p * (std::log(p) + h);
  }
  return g;
}

// ---------------------------------------------------------------------------

FilterEnvironment::FilterEnvironment(StateSpaceModel model, ActionSet actions, CostSpec cost)
    : model_(std::move(model)), actions_(std::move(actions)), cost_(cost) {
  actions_.validate(model_.state_dim);
  predict_params_ = default_transform_params(model_.state_dim, actions_.kind());
  if (model_.horizon < 2) {
    throw Error(ErrorCode::InvalidArgument, "training needs a horizon of at least 2 steps");
  }
}

int FilterEnvironment::feature_dim() const { return adaptkf::feature_dim(model_); }

std::size_t FilterEnvironment::default_action() const {
  return actions_.nearest(default_transform_params(model_.state_dim, actions_.kind()));
}

Vector FilterEnvironment::features_at(int k) {
  const Vector& z = traj_.measurements[k - 1];
  RandomStream rng = streams_->nominal(k);
  const Vector innov = nominal_innovation(pred_, model_, z, k, actions_.kind(), rng);
  return raw_info_state(pred_, z, innov);
}

Vector FilterEnvironment::reset(std::uint64_t episode_seed) {
  traj_ = simulate(model_, episode_seed);
  streams_.emplace(episode_seed);
  // The prior describes x_1 directly, so it is the first predictive belief.
  pred_ = {model_.init_mean, model_.init_cov};
  k_ = 1;
  return features_at(k_);
}

Transition FilterEnvironment::step(std::size_t action) {
  const TransformParams& params = actions_[action];
  RandomStream update_rng = streams_->update(k_, params);
  const UpdateResult upd =
      gaf_update(pred_, model_, traj_.measurements[k_ - 1], k_, params, update_rng);

  Transition tr;
  tr.cost = step_cost(cost_, upd, params, model_.meas_dim);

  RandomStream predict_rng = streams_->predict(k_);
  pred_ = gaf_predict(upd.posterior, model_, k_, predict_params_, predict_rng);
  ++k_;
  tr.next_features = features_at(k_);
  tr.done = k_ >= model_.horizon;
  return tr;
}

// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma must lie in [0, 1]");
  if (n_episodes < 0) throw Error(ErrorCode::InvalidArgument, "n_episodes must be >= 0");
  if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorCode::InvalidArgument, "tau must lie in (0, 1]");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "learning rates must be positive");
  }
  if (!(entropy_coeff >= 0.0)) throw Error(ErrorCode::InvalidArgument, "entropy_coeff must be >= 0");
  if (!(cost.compute_weight >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "compute_weight must be >= 0");
  }
  if (action_set.values.empty()) throw Error(ErrorCode::InvalidArgument, "action set is empty");
  if (action_set.kind() == FilterKind::Unscented && cost.compute_weight != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "compute_weight must be 0 for unscented actions");
  }
  if (normalization_warmup_episodes < 0) {
    throw Error(ErrorCode::InvalidArgument, "warmup episodes must be >= 0");
  }
}

TrainResult initial_networks(int feature_dim, std::size_t num_actions, const TrainConfig& cfg) {
  const RandomStream init = RandomStream(cfg.master_seed).child(stream_tag::kInit);
  std::vector<int> actor_dims{feature_dim};
  actor_dims.insert(actor_dims.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
  std::vector<int> critic_dims = actor_dims;
  actor_dims.push_back(static_cast<int>(num_actions));
  critic_dims.push_back(1);

  RandomStream actor_rng = init.child(0);
  RandomStream critic_rng = init.child(1);
  TrainResult out;
  out.actor = nn::Mlp::initialized(actor_dims, actor_rng);
  out.critic = nn::Mlp::initialized(critic_dims, critic_rng);
  out.target_critic = out.critic;
  out.normalization = FeatureNormalization::identity(feature_dim);
  return out;
}

namespace {

FeatureNormalization collect_normalization(Environment& env, const TrainConfig& cfg) {
  FeatureStatistics stats(env.feature_dim());
  const RandomStream warm = RandomStream(cfg.master_seed).child(stream_tag::kWarmup);
  for (int e = 0; e < cfg.normalization_warmup_episodes; ++e) {
    try {
      stats.add(env.reset(warm.child(static_cast<std::uint64_t>(e)).key()));
      for (;;) {
        const Transition tr = env.step(env.default_action());
        stats.add(tr.next_features);
        if (tr.done) break;
      }
    } catch (const Error&) {
      // keep the statistics gathered before the breakdown
    }
  }
  return stats.freeze();
}

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void check_finite(const TrainResult& r, int episode) {
  if (!r.actor.all_finite() || !r.critic.all_finite() || !r.target_critic.all_finite()) {
    throw Error(ErrorCode::TrainingDiverged,
                "non-finite network parameter in episode " + std::to_string(episode));
  }
}

}  // namespace

TrainResult train(Environment& env, const TrainConfig& cfg) {
  cfg.validate();
  if (env.num_actions() != cfg.action_set.size()) {
    throw Error(ErrorCode::InvalidArgument, "environment and action set sizes differ");
  }
  TrainResult out = initial_networks(env.feature_dim(), env.num_actions(), cfg);
  out.normalization = collect_normalization(env, cfg);

  auto actor_opt = nn::make_adam(out.actor, cfg.actor_lr);
  auto critic_opt = nn::make_adam(out.critic, cfg.critic_lr);
  RandomStream actor_rng = RandomStream(cfg.master_seed).child(stream_tag::kActor);
  const RandomStream episodes = RandomStream(cfg.master_seed).child(stream_tag::kTrain);

  for (int e = 0; e < cfg.n_episodes; ++e) {
    EpisodeLog log;
    log.episode = e + 1;
    double entropy_sum = 0.0;
    double abs_delta_sum = 0.0;
    try {
      Vector s = out.normalization.apply(env.reset(episodes.child(static_cast<std::uint64_t>(e)).key()));
      for (;;) {
        if (!s.allFinite()) {
          log.aborted = true;
          break;
        }
        nn::ForwardPass actor_pass = nn::forward(out.actor, as_span(s));
        const std::vector<double> probs = nn::softmax(actor_pass.output);
        const std::size_t action = sample_categorical(probs, actor_rng);

        const Transition tr = env.step(action);
        const Vector s_next = out.normalization.apply(tr.next_features);
        if (!std::isfinite(tr.cost) || !s_next.allFinite()) {
          log.aborted = true;
          break;
        }

        nn::ForwardPass critic_pass = nn::forward(out.critic, as_span(s));
        const double v_now = critic_pass.output[0];
        const double v_next = nn::evaluate(out.target_critic, as_span(s_next))[0];
        const double delta = td_error(tr.cost, cfg.gamma, v_next, v_now);

        // critic: minimize delta^2 with the bootstrap target held fixed
        const double critic_grad_out[1] = {-2.0 * delta};
        const auto critic_grads = nn::backward(out.critic, critic_pass.cache, critic_grad_out);
        nn::adam_step(out.critic, critic_grads.params, critic_opt);
        ++out.provenance.critic_gradient_steps;

        const auto logit_grad = actor_logit_gradient(probs, action, delta, cfg.entropy_coeff);
        const auto actor_grads = nn::backward(out.actor, actor_pass.cache, logit_grad);
        nn::adam_step(out.actor, actor_grads.params, actor_opt);
        ++out.provenance.actor_gradient_steps;

        nn::polyak_update(out.target_critic, out.critic, cfg.tau);
        ++out.provenance.target_polyak_updates;
        check_finite(out, e + 1);

        log.cumulative_cost += tr.cost;
        entropy_sum += nn::entropy(probs);
        abs_delta_sum += std::abs(delta);
        ++log.steps;
        s = s_next;
        if (tr.done) break;
      }
    } catch (const Error& err) {
      if (err.code() == ErrorCode::TrainingDiverged) throw;
      log.aborted = true;
    }
    if (log.steps > 0) {
      log.mean_entropy = entropy_sum / log.steps;
      log.mean_abs_delta = abs_delta_sum / log.steps;
    }
    out.log.push_back(log);
  }
  return out;
}

TrainResult train(const StateSpaceModel& model, FilterKind kind, const TrainConfig& cfg) {
  if (cfg.action_set.values.empty() || cfg.action_set.kind() != kind) {
    throw Error(ErrorCode::InvalidArgument, "action set kind does not match the filter");
  }
  FilterEnvironment env(model, cfg.action_set, cfg.cost);
  return train(env, cfg);
}

}  // namespace adaptkf
