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

// Stub environment where each action has a fixed cost.

#pragma once

#include <vector>

#include "adaptkf/rl.hpp"

namespace adaptkf::testing {

class BanditEnvironment final : public Environment {
 public:
  BanditEnvironment(std::vector<double> costs, int steps, int feature_dim = 3)
      : costs_(std::move(costs)), steps_(steps), dim_(feature_dim) {}

  int feature_dim() const override { return dim_; }
  std::size_t num_actions() const override { return costs_.size(); }
  std::size_t default_action() const override { return 0; }

  Vector reset(std::uint64_t seed) override {
    rng_ = RandomStream(seed);
    t_ = 0;
    return draw();
  }

  Transition step(std::size_t action) override {
    ++t_;
    return {costs_.at(action), draw(), t_ >= steps_};
  }

  /// Feature vector of the kind the environment emits.
  Vector draw() { return rng_.normal_vector(dim_); }

 private:
  std::vector<double> costs_;
  int steps_;
  int dim_;
  int t_ = 0;
  RandomStream rng_;
};

inline TrainConfig bandit_config(std::size_t actions, int episodes) {
  TrainConfig cfg;
  cfg.gamma = 0.0;
  cfg.n_episodes = episodes;
  cfg.normalization_warmup_episodes = 5;
  std::vector<double> values;
  for (std::size_t i = 0; i < actions; ++i) values.push_back(static_cast<double>(i));
  cfg.action_set = ActionSet::from_values(FilterKind::Unscented, values);
  cfg.master_seed = 3;
  return cfg;
}

/// Mean probability the actor puts on `action` over random feature draws.
inline double mean_mass(const TrainResult& r, std::size_t action, int dim, int samples = 200) {
  RandomStream rng(12345);
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vector s = r.normalization.apply(rng.normal_vector(dim));
    const auto p = nn::softmax(nn::evaluate(r.actor, {s.data(), static_cast<std::size_t>(s.size())}));
    acc += p[action];
  }
  return acc / samples;
}

}  // namespace adaptkf::testing
