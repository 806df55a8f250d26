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

#include <cmath>

#include <gtest/gtest.h>

#include "adaptkf/rl.hpp"
#include "bandit.hpp"

namespace adaptkf {
namespace {

using testing::BanditEnvironment;

UpdateResult with_nis(double nis) {
  UpdateResult u;
  u.nis = nis;
  u.gain = Matrix::Zero(1, 1);
  u.innovation = Vector::Zero(1);
  return u;
}

TEST(StepCost, Examples) {
  const auto ukf = TransformParams::unscented(1);
  EXPECT_EQ(step_cost({CostKind::Nis, 0}, with_nis(1), ukf, 1), 0.0);
  EXPECT_EQ(step_cost({CostKind::Nis, 0}, with_nis(4), ukf, 1), 9.0);
  EXPECT_EQ(step_cost({CostKind::LogMaxNis, 0}, with_nis(0.5), ukf, 1), 0.0);
  EXPECT_DOUBLE_EQ(step_cost({CostKind::LogMaxNis, 0}, with_nis(3), ukf, 1), std::log(3.0));
  UpdateResult u = with_nis(0);
  u.gain = Matrix::Identity(2, 2) * 2.0;
  u.innovation = Vector::Constant(2, 1.5);
  EXPECT_DOUBLE_EQ(step_cost({CostKind::StateInnov, 0}, u, ukf, 2), 3.0 * std::sqrt(2.0));
}

TEST(StepCost, ComputePenaltyOnlyForIterations) {
  const CostSpec spec{CostKind::Nis, 1.0 / 50};
  EXPECT_DOUBLE_EQ(step_cost(spec, with_nis(1), TransformParams::stochastic(10), 1), 0.2);
  EXPECT_EQ(step_cost(spec, with_nis(1), TransformParams::unscented(2), 1), 0.0);
}

TEST(CostKind, Names) {
  for (auto k : {CostKind::Nis, CostKind::LogMaxNis, CostKind::StateInnov}) {
    EXPECT_EQ(cost_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(cost_kind_from_string("mse"), Error);
}

TEST(TdError, Examples) {
  EXPECT_DOUBLE_EQ(td_error(1, 0.5, 2, 1.5), 0.5);
  EXPECT_DOUBLE_EQ(td_error(3, 0, 100, 1), 2);
  EXPECT_DOUBLE_EQ(td_error(1, 0.5, 2, 1 + 0.5 * 2), 0);
}

TEST(ActionSet, DefaultsAndLookup) {
  const auto u = ActionSet::defaults(FilterKind::Unscented);
  ASSERT_EQ(u.size(), 6u);
  EXPECT_EQ(u[3].kappa, 2.0);
  const auto s = ActionSet::defaults(FilterKind::StochasticIntegration);
  EXPECT_EQ(s[5].n_iter, 50);
  EXPECT_EQ(u.index_of(TransformParams::unscented(0.5)), 1u);
  EXPECT_FALSE(u.index_of(TransformParams::unscented(4)).has_value());
  EXPECT_EQ(u.nearest(TransformParams::unscented(4)), 4u);  // tie 3 vs 5 -> lower index
  EXPECT_EQ(s.nearest(TransformParams::stochastic(10)), 3u);
  EXPECT_THROW(ActionSet{}.validate(1), Error);
  EXPECT_THROW(ActionSet::from_values(FilterKind::StochasticIntegration, {1.5}), Error);
  ActionSet mixed = u;
  mixed.values.push_back(TransformParams::stochastic(1));
  EXPECT_THROW(mixed.validate(1), Error);
}

TEST(SampleAction, UniformFrequencies) {
  nn::Mlp actor({2, 4});  // zero network gives uniform logits
  RandomStream rng(1);
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[sample_action(actor, Vector::Zero(2), rng).index];
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.25, 0.01);
}

TEST(SampleAction, DominantLogitAndDeterminism) {
  nn::Mlp actor({1, 3});
  actor.biases(0)[2] = 1000;
  RandomStream rng(2);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) hits += sample_action(actor, Vector::Zero(1), rng).index == 2;
  EXPECT_GT(hits, 9990);
  RandomStream a(9), b(9);
  nn::Mlp flat({1, 5});
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_action(flat, Vector::Zero(1), a).index, sample_action(flat, Vector::Zero(1), b).index);
  }
}

TEST(ActorGradient, NegLogProbIsPiMinusOneHot) {
  const std::vector<double> logits{0.3, -1.2, 2.0, 0.0};
  const auto p = nn::softmax(logits);
  const auto g = neg_log_prob_gradient(p, 2);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_NEAR(g[i], p[i] - (i == 2 ? 1.0 : 0.0), 1e-10);
  }
}

TEST(ActorGradient, MatchesFiniteDifferenceOfObjective) {
  RandomStream rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> z(2 + rng.below(5));
    for (double& v : z) v = rng.normal();
    const std::size_t sel = rng.below(z.size());
    const double delta = 3 * rng.normal();
    const double c = 0.1 * rng.uniform();
    const auto objective = [&](const std::vector<double>& logits) {
      const auto p = nn::softmax(logits);
      return delta * std::log(p[sel]) - c * nn::entropy(p);
    };
    const auto g = actor_logit_gradient(nn::softmax(z), sel, delta, c);
    for (std::size_t i = 0; i < z.size(); ++i) {
      auto up = z, down = z;
      up[i] += 1e-6;
      down[i] -= 1e-6;
      const double fd = (objective(up) - objective(down)) / 2e-6;
      EXPECT_NEAR(g[i], fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(TrainConfig, Validation) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.gamma, 0.5);
  EXPECT_EQ(cfg.n_episodes, 1000);
  EXPECT_EQ(cfg.tau, 0.01);
  EXPECT_EQ(cfg.actor_lr, 1e-4);
  EXPECT_EQ(cfg.critic_lr, 5e-4);
  EXPECT_EQ(cfg.entropy_coeff, 1e-3);
  auto bad = cfg;
  bad.tau = 0;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.gamma = 1.5;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.cost.compute_weight = 0.02;  // unscented actions carry no compute penalty
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Train, ZeroEpisodesReturnsInitialNetworks) {
  BanditEnvironment env({0, 1}, 10);
  auto cfg = testing::bandit_config(2, 0);
  const auto r = train(env, cfg);
  const auto init = initial_networks(3, 2, cfg);
  EXPECT_EQ(r.actor, init.actor);
  EXPECT_EQ(r.critic, init.critic);
  EXPECT_EQ(r.target_critic, init.critic);
  EXPECT_TRUE(r.log.empty());
}

TEST(Train, BanditConcentratesOnCheapAction) {
  BanditEnvironment env({0, 1}, 50);
  const auto r = train(env, testing::bandit_config(2, 200));
  EXPECT_GE(testing::mean_mass(r, 0, 3), 0.95);
}

TEST(Train, BanditFindsCheapActionInTheMiddle) {
  BanditEnvironment env({1, 0.2, 0, 0.7}, 50);
  const auto r = train(env, testing::bandit_config(4, 200));
  EXPECT_GE(testing::mean_mass(r, 2, 3), 0.5);
}

TEST(Train, LargeEntropyKeepsPolicySpread) {
  BanditEnvironment env({0, 1, 0.5}, 50);
  auto cfg = testing::bandit_config(3, 100);
  cfg.entropy_coeff = 10;
  const auto r = train(env, cfg);
  RandomStream rng(4);
  for (int i = 0; i < 50; ++i) {
    const Vector s = r.normalization.apply(rng.normal_vector(3));
    const auto p = nn::softmax(nn::evaluate(r.actor, {s.data(), 3}));
    EXPECT_LT(*std::max_element(p.begin(), p.end()), 0.5);
  }
}

TEST(Train, ReproducibleAndTargetOnlyPolyak) {
  BanditEnvironment e1({0.3, 1}, 20), e2({0.3, 1}, 20);
  const auto cfg = testing::bandit_config(2, 30);
  const auto a = train(e1, cfg);
  const auto b = train(e2, cfg);
  EXPECT_EQ(a.actor, b.actor);
  EXPECT_EQ(a.critic, b.critic);
  EXPECT_EQ(a.target_critic, b.target_critic);
  EXPECT_EQ(a.provenance.target_gradient_steps, 0);
  EXPECT_EQ(a.provenance.target_polyak_updates, 30 * 20);
  EXPECT_EQ(a.provenance.critic_gradient_steps, 30 * 20);
  EXPECT_EQ(a.provenance.actor_gradient_steps, 30 * 20);
  ASSERT_EQ(a.log.size(), 30u);
  EXPECT_EQ(a.log[0].steps, 20);
}

TEST(Train, CriticStepMovesValueTowardTarget) {
  // One gamma=0 step: the critic target is the cost itself.
  for (double cost : {5.0, -5.0}) {
    BanditEnvironment env({cost}, 1);
    auto cfg = testing::bandit_config(1, 0);
    cfg.normalization_warmup_episodes = 0;
    const auto before = train(env, cfg);
    cfg.n_episodes = 1;
    const auto after = train(env, cfg);
    BanditEnvironment replay({cost}, 1);
    const Vector s = replay.reset(RandomStream(cfg.master_seed).child(stream_tag::kTrain).child(0).key());
    const double v0 = nn::evaluate(before.critic, {s.data(), 3})[0];
    const double v1 = nn::evaluate(after.critic, {s.data(), 3})[0];
    if (cost > v0) EXPECT_GT(v1, v0);
    else EXPECT_LT(v1, v0);
  }
}

TEST(Train, NormalizationIsFrozenFromWarmup) {
  BanditEnvironment env({0, 1}, 10, 3);
  auto cfg = testing::bandit_config(2, 5);
  cfg.normalization_warmup_episodes = 20;
  const auto with_training = train(env, cfg);
  cfg.n_episodes = 0;
  const auto warmup_only = train(env, cfg);
  EXPECT_EQ(with_training.normalization.shift, warmup_only.normalization.shift);
  EXPECT_EQ(with_training.normalization.scale, warmup_only.normalization.scale);
  EXPECT_NE(with_training.normalization.scale, Vector::Ones(3));
}

TEST(FilterEnvironment, EpisodeHasHorizonMinusOneDecisions) {
  FilterEnvironment env(ungm(20), ActionSet::defaults(FilterKind::Unscented), {});
  Vector s = env.reset(5);
  EXPECT_EQ(s.size(), 5);
  int steps = 0;
  for (;;) {
    const auto tr = env.step(env.default_action());
    ++steps;
    EXPECT_TRUE(std::isfinite(tr.cost));
    EXPECT_EQ(tr.next_features.size(), 5);
    if (tr.done) break;
  }
  EXPECT_EQ(steps, 19);
  EXPECT_EQ(env.default_action(), 3u);
}

TEST(Train, ShortUngmRunIsFiniteAndDeterministic) {
  TrainConfig cfg;
  cfg.n_episodes = 3;
  cfg.normalization_warmup_episodes = 2;
  cfg.master_seed = 11;
  const auto a = train(ungm(40), FilterKind::Unscented, cfg);
  const auto b = train(ungm(40), FilterKind::Unscented, cfg);
  EXPECT_TRUE(a.actor.all_finite());
  EXPECT_EQ(a.actor, b.actor);
  EXPECT_EQ(a.log.size(), 3u);
}

TEST(Train, SifCtmRunsWithComputePenalty) {
  TrainConfig cfg;
  cfg.n_episodes = 2;
  cfg.normalization_warmup_episodes = 1;
  cfg.action_set = ActionSet::defaults(FilterKind::StochasticIntegration);
  cfg.cost = {CostKind::StateInnov, 1.0 / 50};
  const auto r = train(ctm({0.5, 1.0, 1.0, 0.04, 30}), FilterKind::StochasticIntegration, cfg);
  EXPECT_EQ(r.actor.output_dim(), 6);
  EXPECT_EQ(r.actor.input_dim(), 8);
  EXPECT_EQ(r.log.size(), 2u);
}

}  // namespace
}  // namespace adaptkf
