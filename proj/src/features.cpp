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

#include "adaptkf/features.hpp"

#include <cmath>

namespace adaptkf {

FeatureNormalization FeatureNormalization::identity(int dim) {
  return {Vector::Zero(dim), Vector::Ones(dim)};
}

Vector FeatureNormalization::apply(const Vector& raw) const {
  if (raw.size() != shift.size()) {
    throw Error(ErrorCode::InvalidArgument, "feature width does not match the normalization");
  }
  return (raw - shift).cwiseQuotient(scale);
}

FeatureStatistics::FeatureStatistics(int dim) : mean_(Vector::Zero(dim)), m2_(Vector::Zero(dim)) {}

void FeatureStatistics::add(const Vector& raw) {
  if (!raw.allFinite()) return;
  ++count_;
  const Vector delta = raw - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta.cwiseProduct(raw - mean_);
}

FeatureNormalization FeatureStatistics::freeze() const {
  const int dim = static_cast<int>(mean_.size());
  FeatureNormalization norm = FeatureNormalization::identity(dim);
  if (count_ == 0) return norm;
  norm.shift = mean_;
  for (int i = 0; i < dim; ++i) {
    const double var = count_ > 1 ? m2_(i) / static_cast<double>(count_ - 1) : 0.0;
    const double sd = std::sqrt(var);
    norm.scale(i) = (std::isfinite(sd) && sd > 1e-12) ? sd : 1.0;
  }
  return norm;
}

int feature_dim(const StateSpaceModel& model) { return model.state_dim + 2 + 2 * model.meas_dim; }

Vector raw_info_state(const GaussianBelief& pred, const Vector& z, const Vector& nominal_innov) {
  const Eigen::Index nx = pred.mean.size();
  const Eigen::Index nz = z.size();
  Vector s(nx + 2 + 2 * nz);
  s.head(nx) = pred.mean;
  s(nx) = pred.cov.trace();
  s(nx + 1) = log_det_psd(pred.cov);
  s.segment(nx + 2, nz) = z;
  s.tail(nz) = nominal_innov;
  return s;
}

Vector build_info_state(const GaussianBelief& pred, const Vector& z, const Vector& nominal_innov,
                        const FeatureNormalization& norm) {
  return norm.apply(raw_info_state(pred, z, nominal_innov));
}

TransformParams nominal_params(int state_dim, FilterKind kind) {
  if (kind == FilterKind::Unscented) return default_transform_params(state_dim, kind);
  return TransformParams::stochastic(1);
}

Vector nominal_innovation(const GaussianBelief& pred, const StateSpaceModel& model, const Vector& z,
                          int k, FilterKind kind, RandomStream& rng) {
  const auto h = [&model, k](const Vector& x) { return model.measurement(x, k); };
  const MomentEstimate est = moment_transform(pred, h, nominal_params(model.state_dim, kind), rng,
                                              model.angular_meas_dims);
  return innovation(model, z, est.mean);
}

}  // namespace adaptkf
