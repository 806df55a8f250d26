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

#include "adaptkf/policy.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace adaptkf {

ParamPolicy ParamPolicy::fixed_value(const TransformParams& params) {
  ParamPolicy p;
  p.kind = PolicyKind::Fixed;
  p.fixed = params;
  return p;
}

ParamPolicy ParamPolicy::default_value() { return ParamPolicy{}; }

ParamPolicy ParamPolicy::myopic(ActionSet candidates, CostSpec cost) {
  ParamPolicy p;
  p.kind = PolicyKind::Myopic;
  p.candidates = std::move(candidates);
  p.cost = cost;
  return p;
}

ParamPolicy ParamPolicy::max_likelihood(ActionSet candidates) {
  ParamPolicy p;
  p.kind = PolicyKind::MaxLikelihood;
  p.candidates = std::move(candidates);
  return p;
}

ParamPolicy ParamPolicy::adaptive_greedy(std::shared_ptr<const PolicyCheckpoint> checkpoint) {
  ParamPolicy p;
  p.kind = PolicyKind::AdaptiveGreedy;
  p.adaptive = std::move(checkpoint);
  return p;
}

void ParamPolicy::validate(const StateSpaceModel& model, FilterKind kind) const {
  switch (this->kind) {
    case PolicyKind::Default:
      return;
    case PolicyKind::Fixed:
      if (fixed.kind != kind) throw Error(ErrorCode::InvalidArgument, "fixed parameter kind mismatch");
      fixed.validate(model.state_dim);
      return;
    case PolicyKind::Myopic:
    case PolicyKind::MaxLikelihood:
      candidates.validate(model.state_dim);
      if (candidates.kind() != kind) {
        throw Error(ErrorCode::InvalidArgument, "candidate kind does not match the filter");
      }
      if (this->kind == PolicyKind::MaxLikelihood && kind != FilterKind::Unscented) {
        throw Error(ErrorCode::InvalidArgument, "the likelihood-optimal policy applies only to ukf");
      }
      return;
    case PolicyKind::AdaptiveGreedy:
      if (!adaptive) throw Error(ErrorCode::InvalidArgument, "adaptive policy without checkpoint");
      adaptive->validate();
      if (adaptive->filter != kind || adaptive->action_set.kind() != kind) {
        throw Error(ErrorCode::CheckpointMismatch, "checkpoint was trained for another filter");
      }
      if (adaptive->normalization.dim() != feature_dim(model)) {
        throw Error(ErrorCode::CheckpointMismatch, "checkpoint feature width does not match the model");
      }
      return;
  }
}

std::size_t select_adaptive_index(const nn::Mlp& actor, const FeatureNormalization& norm,
                                  const GaussianBelief& pred, const Vector& z,
                                  const Vector& nominal_innov) {
  const Vector s = build_info_state(pred, z, nominal_innov, norm);
  const auto logits = nn::evaluate(actor, {s.data(), static_cast<std::size_t>(s.size())});
  const auto probs = nn::softmax(logits);
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return best;
}

TransformParams select_adaptive(const nn::Mlp& actor, const FeatureNormalization& norm,
                                const ActionSet& actions, const GaussianBelief& pred,
                                const Vector& z, const Vector& nominal_innov) {
  return actions[select_adaptive_index(actor, norm, pred, z, nominal_innov)];
}

TransformParams select_default(const StateSpaceModel& model, FilterKind kind) {
  return default_transform_params(model.state_dim, kind);
}

namespace {

template <typename Score, typename Better>
Selection search(const GaussianBelief& pred, const StateSpaceModel& model, const Vector& z, int k,
                 const ActionSet& actions, const FilterStreams& streams, Score score,
                 Better better) {
  Selection best;
  bool found = false;
  std::string last_failure;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    try {
      RandomStream rng = streams.update(k, actions[i]);
      UpdateResult upd = gaf_update(pred, model, z, k, actions[i], rng);
      const double value = score(upd, actions[i]);
      if (std::isnan(value)) continue;
      if (!found || better(value, best.score)) {
        best.index = i;
        best.params = actions[i];
        best.update = std::move(upd);
        best.score = value;
        found = true;
      }
    } catch (const Error& err) {
      last_failure = err.what();
    }
  }
  if (!found) {
    throw Error(ErrorCode::AllActionsFailed, "no candidate update succeeded: " + last_failure);
  }
  return best;
}

}  // namespace

Selection select_myopic(const GaussianBelief& pred, const StateSpaceModel& model, const Vector& z,
                        int k, const ActionSet& actions, const CostSpec& cost,
                        const FilterStreams& streams) {
  return search(
      pred, model, z, k, actions, streams,
      [&](const UpdateResult& upd, const TransformParams& p) {
        return step_cost(cost, upd, p, model.meas_dim);
      },
      [](double a, double b) { return a < b; });
}

double measurement_log_likelihood(const UpdateResult& update) {
  const double n = static_cast<double>(update.innovation.size());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det_psd(update.innov_cov) + update.nis);
}

Selection select_max_likelihood(const GaussianBelief& pred, const StateSpaceModel& model,
                                const Vector& z, int k, const ActionSet& actions,
                                const FilterStreams& streams) {
  if (actions.kind() != FilterKind::Unscented) {
    throw Error(ErrorCode::InvalidArgument, "the likelihood-optimal policy applies only to ukf");
  }
  return search(
      pred, model, z, k, actions, streams,
      [](const UpdateResult& upd, const TransformParams&) {
        return measurement_log_likelihood(upd);
      },
      [](double a, double b) { return a > b; });
}

FilterRun run_filter(const StateSpaceModel& model, FilterKind kind, const ParamPolicy& policy,
                     const Trajectory& traj, const FilterStreams& streams, const CostSpec& cost) {
  policy.validate(model, kind);
  const TransformParams predict_params = default_transform_params(model.state_dim, kind);
  const TransformParams default_params = select_default(model, kind);

  FilterRun run;
  run.steps.reserve(traj.measurements.size());
  // The prior describes x_1 directly, so it is the first predictive belief.
  GaussianBelief pred{model.init_mean, model.init_cov};
  const int horizon = static_cast<int>(traj.measurements.size());
  try {
    for (int k = 1; k <= horizon; ++k) {
      const Vector& z = traj.measurements[k - 1];
      StepRecord rec;
      rec.k = k;
      switch (policy.kind) {
        case PolicyKind::Fixed:
        case PolicyKind::Default:
        case PolicyKind::AdaptiveGreedy: {
          if (policy.kind == PolicyKind::Fixed) {
            rec.params = policy.fixed;
          } else if (policy.kind == PolicyKind::Default) {
            rec.params = default_params;
          } else {
            RandomStream nominal_rng = streams.nominal(k);
            const Vector innov = nominal_innovation(pred, model, z, k, kind, nominal_rng);
            const auto& ckpt = *policy.adaptive;
            rec.params = select_adaptive(ckpt.actor, ckpt.normalization, ckpt.action_set, pred, z,
                                         innov);
          }
          RandomStream rng = streams.update(k, rec.params);
          rec.update = gaf_update(pred, model, z, k, rec.params, rng);
          break;
        }
        case PolicyKind::Myopic:
        case PolicyKind::MaxLikelihood: {
          Selection sel = policy.kind == PolicyKind::Myopic
                              ? select_myopic(pred, model, z, k, policy.candidates, policy.cost, streams)
                              : select_max_likelihood(pred, model, z, k, policy.candidates, streams);
          rec.params = sel.params;
          rec.update = std::move(sel.update);
          break;
        }
      }
      rec.cost = step_cost(cost, rec.update, rec.params, model.meas_dim);
      if (k < horizon) {
        RandomStream rng = streams.predict(k);
        pred = gaf_predict(rec.update.posterior, model, k, predict_params, rng);
      }
      run.steps.push_back(std::move(rec));
    }
  } catch (const Error& err) {
    run.diverged = true;
    run.failure = err.what();
  }
  return run;
}

}  // namespace adaptkf
