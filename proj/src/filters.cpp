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

#include "adaptkf/filters.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

namespace adaptkf {

namespace {

bool contains(std::span<const int> dims, Eigen::Index d) {
  return std::find(dims.begin(), dims.end(), static_cast<int>(d)) != dims.end();
}

// Weighted moments of g over the point set (one point per column).
MomentEstimate accumulate(const Matrix& points, std::span<const double> weights,
                          const Vector& center, const VectorFunction& g,
                          std::span<const int> angular_dims) {
  const Eigen::Index count = points.cols();
  std::vector<Vector> mapped;
  mapped.reserve(count);
  for (Eigen::Index i = 0; i < count; ++i) mapped.push_back(g(points.col(i)));

  const Eigen::Index m = mapped.front().size();
  MomentEstimate est;
  est.mean = Vector::Zero(m);
  for (Eigen::Index i = 0; i < count; ++i) est.mean += weights[i] * mapped[i];
  for (Eigen::Index d = 0; d < m; ++d) {
    if (!contains(angular_dims, d)) continue;
    double s = 0.0;
    double c = 0.0;
    for (Eigen::Index i = 0; i < count; ++i) {
      s += weights[i] * std::sin(mapped[i](d));
      c += weights[i] * std::cos(mapped[i](d));
    }
    est.mean(d) = std::atan2(s, c);
  }

  est.cov = Matrix::Zero(m, m);
  est.cross_cov = Matrix::Zero(center.size(), m);
  for (Eigen::Index i = 0; i < count; ++i) {
    Vector r = mapped[i] - est.mean;
    for (int d : angular_dims) r(d) = wrap_angle(r(d));
    est.cov.noalias() += weights[i] * r * r.transpose();
    est.cross_cov.noalias() += weights[i] * (points.col(i) - center) * r.transpose();
  }
  est.cov = symmetrize(est.cov);
  return est;
}

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
// signs of R's diagonal folded into Q.
Matrix random_rotation(Eigen::Index n, RandomStream& rng) {
  Matrix gauss(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) gauss(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace

const char* to_string(FilterKind kind) {
  return kind == FilterKind::Unscented ? "ukf" : "sif";
}

FilterKind filter_kind_from_string(const std::string& name) {
  if (name == "ukf") return FilterKind::Unscented;
  if (name == "sif") return FilterKind::StochasticIntegration;
  throw Error(ErrorCode::InvalidArgument, "unknown filter '" + name + "'");
}

std::string TransformParams::label() const {
  char buf[64];
  if (kind == FilterKind::Unscented) {
    std::snprintf(buf, sizeof buf, "kappa=%g", kappa);
  } else {
    std::snprintf(buf, sizeof buf, "n_iter=%d", n_iter);
  }
  return buf;
}

void TransformParams::validate(int n) const {
  if (kind == FilterKind::Unscented) {
    if (!(n + kappa > 0.0) || !std::isfinite(kappa)) {
      throw Error(ErrorCode::InvalidArgument, "unscented transform needs n + kappa > 0");
    }
  } else if (n_iter < 1) {
    throw Error(ErrorCode::InvalidArgument, "stochastic integration needs n_iter >= 1");
  }
}

MomentEstimate unscented_transform(const GaussianBelief& belief, const VectorFunction& g,
                                   double kappa, std::span<const int> angular_dims) {
  const Eigen::Index n = belief.mean.size();
  TransformParams::unscented(kappa).validate(static_cast<int>(n));
  const double spread = static_cast<double>(n) + kappa;

  const Matrix offsets = std::sqrt(spread) * cholesky_psd(belief.cov).lower;
  Matrix points(n, 2 * n + 1);
  std::vector<double> weights(2 * n + 1, 1.0 / (2.0 * spread));
  points.col(0) = belief.mean;
  weights[0] = kappa / spread;
  for (Eigen::Index i = 0; i < n; ++i) {
    points.col(1 + i) = belief.mean + offsets.col(i);
    points.col(1 + n + i) = belief.mean - offsets.col(i);
  }
  return accumulate(points, weights, belief.mean, g, angular_dims);
}

MomentEstimate stochastic_integration_transform(const GaussianBelief& belief,
                                                const VectorFunction& g, int n_iter,
                                                RandomStream& rng,
                                                std::span<const int> angular_dims) {
  const Eigen::Index n = belief.mean.size();
  TransformParams::stochastic(n_iter).validate(static_cast<int>(n));

  const Matrix sqrt_cov = std::sqrt(static_cast<double>(n)) * cholesky_psd(belief.cov).lower;
  const std::vector<double> weights(2 * n, 1.0 / (2.0 * static_cast<double>(n)));
  Matrix points(n, 2 * n);

  MomentEstimate avg;
  for (int j = 1; j <= n_iter; ++j) {
    const Matrix offsets = sqrt_cov * random_rotation(n, rng);
    for (Eigen::Index i = 0; i < n; ++i) {
      points.col(i) = belief.mean + offsets.col(i);
      points.col(n + i) = belief.mean - offsets.col(i);
    }
    MomentEstimate est = accumulate(points, weights, belief.mean, g, angular_dims);
    if (j == 1) {
      avg = std::move(est);
      continue;
    }
    // Running means keep identical iterations bit-identical to one iteration.
    const double inv = 1.0 / j;
    Vector step = est.mean - avg.mean;
    for (int d : angular_dims) step(d) = wrap_angle(step(d));
    avg.mean += inv * step;
    for (int d : angular_dims) avg.mean(d) = wrap_angle(avg.mean(d));
    avg.cov += inv * (est.cov - avg.cov);
    avg.cross_cov += inv * (est.cross_cov - avg.cross_cov);
  }
  avg.cov = symmetrize(avg.cov);
  return avg;
}

MomentEstimate moment_transform(const GaussianBelief& belief, const VectorFunction& g,
                                const TransformParams& params, RandomStream& rng,
                                std::span<const int> angular_dims) {
  if (params.kind == FilterKind::Unscented) {
    return unscented_transform(belief, g, params.kappa, angular_dims);
  }
  return stochastic_integration_transform(belief, g, params.n_iter, rng, angular_dims);
}

GaussianBelief gaf_predict(const GaussianBelief& belief, const StateSpaceModel& model, int k,
                           const TransformParams& params, RandomStream& rng) {
  const auto f = [&model, k](const Vector& x) { return model.dynamics(x, k); };
  MomentEstimate est = moment_transform(belief, f, params, rng);
  return {std::move(est.mean), symmetrize(est.cov + model.process_cov)};
}

TransformParams default_transform_params(int state_dim, FilterKind kind) {
  if (kind == FilterKind::Unscented) {
    return TransformParams::unscented(std::max(0.0, 3.0 - static_cast<double>(state_dim)));
  }
  return TransformParams::stochastic(10);
}

RandomStream FilterStreams::update(int k, const TransformParams& params) const {
  std::uint64_t tag = 0;
  if (params.kind == FilterKind::Unscented) {
    std::memcpy(&tag, &params.kappa, sizeof tag);
  } else {
    tag = static_cast<std::uint64_t>(params.n_iter);
  }
  return base_.child({stream_tag::kUpdate, static_cast<std::uint64_t>(k), tag});
}

RandomStream FilterStreams::predict(int k) const {
  return base_.child({stream_tag::kPredict, static_cast<std::uint64_t>(k)});
}

RandomStream FilterStreams::nominal(int k) const {
  return base_.child({stream_tag::kNominal, static_cast<std::uint64_t>(k)});
}

Vector innovation(const StateSpaceModel& model, const Vector& z, const Vector& zhat) {
  Vector out = z - zhat;
  for (int d : model.angular_meas_dims) out(d) = wrap_angle(out(d));
  return out;
}

UpdateResult gaf_update(const GaussianBelief& pred, const StateSpaceModel& model, const Vector& z,
                        int k, const TransformParams& params, RandomStream& rng) {
  const auto h = [&model, k](const Vector& x) { return model.measurement(x, k); };
  MomentEstimate est = moment_transform(pred, h, params, rng, model.angular_meas_dims);

  UpdateResult out;
  out.pred_meas = std::move(est.mean);
  out.innov_cov = symmetrize(est.cov + model.meas_cov);
  const auto chol = cholesky_psd(out.innov_cov);

  out.innovation = innovation(model, z, out.pred_meas);
  if (!all_finite(out.innovation)) {
    throw Error(ErrorCode::InnovationNotFinite, "innovation has non-finite entries");
  }

  out.gain = cholesky_solve(chol.lower, Matrix(est.cross_cov.transpose())).transpose();
  out.posterior.mean = pred.mean + out.gain * out.innovation;
  out.posterior.cov =
      symmetrize(pred.cov - out.gain * out.innov_cov * out.gain.transpose());
  out.nis = out.innovation.dot(cholesky_solve(chol.lower, out.innovation));
  if (!all_finite(out.posterior.mean) || !all_finite(out.posterior.cov)) {
    throw Error(ErrorCode::NotFactorizable, "posterior moments are not finite");
  }
  return out;
}

}  // namespace adaptkf
