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
#include <numbers>

#include <gtest/gtest.h>

#include "adaptkf/filters.hpp"
#include "adaptkf/rl.hpp"
#include "oracles.hpp"

namespace adaptkf {
namespace {

GaussianBelief scalar(double mean, double var) {
  return {Vector::Constant(1, mean), Matrix::Constant(1, 1, var)};
}

Vector v1(double x) { return Vector::Constant(1, x); }

StateSpaceModel identity_model(int n, double q, double r) {
  return linear_gaussian(Matrix::Identity(n, n), Matrix::Identity(n, n),
                         q * Matrix::Identity(n, n), r * Matrix::Identity(n, n), Vector::Zero(n),
                         Matrix::Identity(n, n), 10, "identity");
}

GaussianBelief random_belief(int n, RandomStream& rng) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return {rng.normal_vector(n), symmetrize(a * a.transpose() + 0.5 * Matrix::Identity(n, n))};
}

TEST(TransformParams, ValidateAndLabel) {
  EXPECT_NO_THROW(TransformParams::unscented(0).validate(1));
  EXPECT_THROW(TransformParams::unscented(-1).validate(1), Error);
  EXPECT_THROW(TransformParams::stochastic(0).validate(2), Error);
  EXPECT_EQ(TransformParams::unscented(0.5).value(), 0.5);
  EXPECT_EQ(TransformParams::stochastic(20).value(), 20.0);
  EXPECT_EQ(filter_kind_from_string("ukf"), FilterKind::Unscented);
  EXPECT_EQ(filter_kind_from_string("sif"), FilterKind::StochasticIntegration);
  EXPECT_THROW(filter_kind_from_string("ekf"), Error);
}

TEST(DefaultParams, Formula) {
  EXPECT_EQ(default_transform_params(1, FilterKind::Unscented).kappa, 2.0);
  EXPECT_EQ(default_transform_params(4, FilterKind::Unscented).kappa, 0.0);
  EXPECT_EQ(default_transform_params(3, FilterKind::StochasticIntegration).n_iter, 10);
}

TEST(Unscented, AffineExactness) {
  RandomStream rng(1);
  for (int n = 1; n <= 4; ++n) {
    const auto belief = random_belief(n, rng);
    Matrix a(3, n);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    const Vector b = rng.normal_vector(3);
    const auto g = [&](const Vector& x) -> Vector { return a * x + b; };
    for (double kappa : {0.0, 0.5, 1.0, 2.0, 3.0, 5.0}) {
      const auto est = unscented_transform(belief, g, kappa);
      EXPECT_LT((est.mean - (a * belief.mean + b)).norm(), 1e-10);
      EXPECT_LT((est.cov - a * belief.cov * a.transpose()).norm(), 1e-10);
      EXPECT_LT((est.cross_cov - belief.cov * a.transpose()).norm(), 1e-10);
    }
  }
}

TEST(Unscented, SquareWithKappaTwo) {
  const auto est = unscented_transform(scalar(0, 1), [](const Vector& x) -> Vector {
    return x.cwiseProduct(x);
  }, 2.0);
  EXPECT_NEAR(est.mean(0), 1.0, 1e-12);
  EXPECT_NEAR(est.cov(0, 0), 2.0, 1e-12);
}

TEST(Unscented, SquareWithKappaZero) {
  const auto est = unscented_transform(scalar(0, 1), [](const Vector& x) -> Vector {
    return x.cwiseProduct(x);
  }, 0.0);
  EXPECT_NEAR(est.mean(0), 1.0, 1e-12);
  EXPECT_NEAR(est.cov(0, 0), 0.0, 1e-12);
}

TEST(Unscented, CentralWeightIsZeroForKappaZero) {
  // With w0 = 0 the centre point cannot affect the result.
  const auto g = [](const Vector& x) -> Vector {
    return v1(std::abs(x(0)) < 1e-12 ? 1e6 : x(0) * x(0));
  };
  const auto est = unscented_transform(scalar(0, 1), g, 0.0);
  EXPECT_NEAR(est.mean(0), 1.0, 1e-12);
}

TEST(Unscented, CircularMeanAcrossBranchCut) {
  // Outputs cluster around pi; a plain mean would land near 0.
  const auto g = [](const Vector& x) -> Vector { return v1(wrap_angle(std::numbers::pi + x(0))); };
  const std::vector<int> angular{0};
  const auto est = unscented_transform(scalar(0, 0.01), g, 2.0, angular);
  EXPECT_NEAR(std::abs(est.mean(0)), std::numbers::pi, 1e-9);
  EXPECT_NEAR(est.cov(0, 0), 0.01, 1e-9);
}

TEST(StochasticIntegration, AffineExactness) {
  RandomStream rng(2);
  for (int n = 1; n <= 4; ++n) {
    const auto belief = random_belief(n, rng);
    Matrix a(2, n);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    const Vector b = rng.normal_vector(2);
    const auto g = [&](const Vector& x) -> Vector { return a * x + b; };
    for (int it : {1, 2, 5, 10, 20, 50}) {
      RandomStream s(static_cast<std::uint64_t>(it));
      const auto est = stochastic_integration_transform(belief, g, it, s);
      EXPECT_LT((est.mean - (a * belief.mean + b)).norm(), 1e-10);
      EXPECT_LT((est.cov - a * belief.cov * a.transpose()).norm(), 1e-10);
      EXPECT_LT((est.cross_cov - belief.cov * a.transpose()).norm(), 1e-10);
    }
  }
}

TEST(StochasticIntegration, OneDimensionIsRotationFree) {
  const auto g = [](const Vector& x) -> Vector { return v1(std::sin(x(0)) + x(0) * x(0)); };
  RandomStream a(1), b(2);
  const auto one = stochastic_integration_transform(scalar(0.3, 2.0), g, 1, a);
  const auto many = stochastic_integration_transform(scalar(0.3, 2.0), g, 37, b);
  EXPECT_EQ(one.mean, many.mean);
  EXPECT_EQ(one.cov, many.cov);
  EXPECT_EQ(one.cross_cov, many.cross_cov);
}

TEST(StochasticIntegration, SquaredNormMean) {
  const GaussianBelief b{Vector::Zero(2), Matrix::Identity(2, 2)};
  const auto g = [](const Vector& x) -> Vector { return v1(x.squaredNorm()); };
  RandomStream rng(5);
  const auto est = stochastic_integration_transform(b, g, 200, rng);
  EXPECT_NEAR(est.mean(0), 2.0, 0.2);
}

TEST(StochasticIntegration, ReproducibleFromSeed) {
  const GaussianBelief b{Vector::Constant(3, 0.5), 2.0 * Matrix::Identity(3, 3)};
  const auto g = [](const Vector& x) -> Vector { return x.array().sin().matrix(); };
  RandomStream r1(77), r2(77);
  const auto e1 = stochastic_integration_transform(b, g, 10, r1);
  const auto e2 = stochastic_integration_transform(b, g, 10, r2);
  EXPECT_EQ(e1.mean, e2.mean);
  EXPECT_EQ(e1.cov, e2.cov);
  EXPECT_EQ(e1.cross_cov, e2.cross_cov);
}

TEST(Predict, IdentityDynamics) {
  RandomStream rng(0);
  const GaussianBelief b{Vector::Constant(2, 1.0), Matrix::Identity(2, 2) * 3.0};
  const auto no_noise = identity_model(2, 0.0, 1.0);
  const auto out = gaf_predict(b, no_noise, 1, TransformParams::unscented(1), rng);
  EXPECT_LT((out.mean - b.mean).norm(), 1e-10);
  EXPECT_LT((out.cov - b.cov).norm(), 1e-10);
  const auto unit_noise = identity_model(2, 1.0, 1.0);
  const auto out2 = gaf_predict(b, unit_noise, 1, TransformParams::unscented(1), rng);
  EXPECT_LT((out2.cov - b.cov - Matrix::Identity(2, 2)).norm(), 1e-10);
}

TEST(Predict, CtmMatchesLinearPrediction) {
  const auto m = ctm();
  RandomStream rng(3);
  const auto b = random_belief(4, rng);
  const Matrix& f = *m.transition;
  for (const auto& p : ActionSet::defaults(FilterKind::Unscented).values) {
    const auto out = gaf_predict(b, m, 1, p, rng);
    EXPECT_LT((out.mean - f * b.mean).norm(), 1e-9);
    EXPECT_LT((out.cov - (f * b.cov * f.transpose() + m.process_cov)).norm(), 1e-9);
  }
  for (const auto& p : ActionSet::defaults(FilterKind::StochasticIntegration).values) {
    const auto out = gaf_predict(b, m, 1, p, rng);
    EXPECT_LT((out.mean - f * b.mean).norm(), 1e-9);
    EXPECT_LT((out.cov - (f * b.cov * f.transpose() + m.process_cov)).norm(), 1e-9);
  }
}

TEST(Update, ExactMeasurementOfPriorMean) {
  const auto m = identity_model(2, 0.0, 0.0);
  const GaussianBelief pred{Vector::Constant(2, 0.7), Matrix::Identity(2, 2)};
  RandomStream rng(0);
  const auto u = gaf_update(pred, m, pred.mean, 1, TransformParams::unscented(1), rng);
  EXPECT_LT((u.posterior.mean - pred.mean).norm(), 1e-12);
  EXPECT_LT(u.posterior.cov.norm(), 1e-12);
  EXPECT_NEAR(u.nis, 0.0, 1e-15);
}

TEST(Update, ScalarHandArithmetic) {
  const auto m = identity_model(1, 0.0, 1.0);
  RandomStream rng(0);
  for (const auto& p : {TransformParams::unscented(2), TransformParams::stochastic(3)}) {
    const auto u = gaf_update(scalar(0, 1), m, v1(2.0), 1, p, rng);
    EXPECT_NEAR(u.gain(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(u.posterior.mean(0), 1.0, 1e-12);
    EXPECT_NEAR(u.posterior.cov(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(u.nis, 2.0, 1e-12);
  }
}

TEST(Update, LinearCtmSizedMatchesKalman) {
  Matrix h(2, 4);
  h << 1, 0, 0, 0, 0, 0, 1, 0;
  const Matrix r = 0.3 * Matrix::Identity(2, 2);
  const auto m = linear_gaussian(*ctm().transition, h, ctm().process_cov, r, Vector::Zero(4),
                                 Matrix::Identity(4, 4), 10, "linear4");
  RandomStream rng(4);
  const auto pred = random_belief(4, rng);
  const Vector z = rng.normal_vector(2);
  const Matrix s = h * pred.cov * h.transpose() + r;
  const Matrix k = pred.cov * h.transpose() * s.inverse();
  const Vector mean = pred.mean + k * (z - h * pred.mean);
  const Matrix cov = pred.cov - k * s * k.transpose();
  for (const auto& p : {TransformParams::unscented(0), TransformParams::unscented(5),
                        TransformParams::stochastic(1), TransformParams::stochastic(50)}) {
    const auto u = gaf_update(pred, m, z, 1, p, rng);
    EXPECT_LT((u.posterior.mean - mean).norm(), 1e-9);
    EXPECT_LT((u.posterior.cov - cov).norm(), 1e-9);
  }
}

TEST(Update, BearingInnovationIsWrapped) {
  const auto m = ctm();
  GaussianBelief pred{Vector(4), Matrix::Identity(4, 4)};
  pred.mean << -100, 0, 1, 0;  // bearing just under pi
  RandomStream rng(0);
  const double z = -std::numbers::pi + 0.01;
  const auto u = gaf_update(pred, m, v1(z), 1, TransformParams::unscented(0), rng);
  EXPECT_LT(std::abs(u.innovation(0)), 0.1);
}

TEST(Update, NonFiniteMeasurementIsRejected) {
  const auto m = identity_model(1, 0.0, 1.0);
  RandomStream rng(0);
  try {
    gaf_update(scalar(0, 1), m, v1(std::nan("")), 1, TransformParams::unscented(2), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InnovationNotFinite);
  }
}

TEST(Update, ContractionAndNonNegativeNis) {
  const auto m = ungm();
  RandomStream rng(6);
  for (int i = 0; i < 500; ++i) {
    const auto pred = scalar(rng.normal() * 10, 0.1 + std::abs(rng.normal()) * 20);
    const Vector z = v1(rng.normal() * 10);
    for (const auto& p : ActionSet::defaults(FilterKind::Unscented).values) {
      const auto u = gaf_update(pred, m, z, 1, p, rng);
      EXPECT_GE(u.nis, 0.0);
      EXPECT_LE(u.posterior.cov.trace(), pred.cov.trace() + 1e-9);
    }
  }
}

TEST(FilterStreams, SubStreamsAreKeyedByStepAndParameter) {
  const FilterStreams s(10);
  const auto k1 = s.update(1, TransformParams::stochastic(5)).key();
  EXPECT_EQ(k1, FilterStreams(10).update(1, TransformParams::stochastic(5)).key());
  EXPECT_NE(k1, s.update(2, TransformParams::stochastic(5)).key());
  EXPECT_NE(k1, s.update(1, TransformParams::stochastic(10)).key());
  EXPECT_NE(s.predict(1).key(), s.nominal(1).key());
}

TEST(GaussianFilter, LinearModelMatchesKalmanForEveryParameter) {
  const auto m = oracle::linear_two_state(100);
  const auto traj = simulate(m, 21);
  const auto ref = oracle::kalman_filter(*m.transition, *m.meas_matrix, m.process_cov, m.meas_cov,
                                         m.init_mean, m.init_cov, traj.measurements);
  std::vector<TransformParams> all = ActionSet::defaults(FilterKind::Unscented).values;
  for (const auto& p : ActionSet::defaults(FilterKind::StochasticIntegration).values) all.push_back(p);
  for (const auto& p : all) {
    const FilterStreams streams(traj.seed);
    GaussianBelief pred{m.init_mean, m.init_cov};
    for (int k = 1; k <= m.horizon; ++k) {
      RandomStream ur = streams.update(k, p);
      const auto u = gaf_update(pred, m, traj.measurements[k - 1], k, p, ur);
      ASSERT_LT((u.posterior.mean - ref[k - 1].mean).cwiseAbs().maxCoeff(), 1e-9) << p.label();
      ASSERT_LT((u.posterior.cov - ref[k - 1].cov).cwiseAbs().maxCoeff(), 1e-9) << p.label();
      RandomStream pr = streams.predict(k);
      pred = gaf_predict(u.posterior, m, k, p, pr);
    }
  }
}

}  // namespace
}  // namespace adaptkf
