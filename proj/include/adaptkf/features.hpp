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

#include "adaptkf/filters.hpp"
#include "adaptkf/models.hpp"
#include "adaptkf/numerics.hpp"

namespace adaptkf {

/// Frozen per-feature affine map (x - shift) / scale.
struct FeatureNormalization {
  Vector shift;
  Vector scale;

  static FeatureNormalization identity(int dim);
  Vector apply(const Vector& raw) const;
  int dim() const { return static_cast<int>(shift.size()); }
};

/// Running per-feature mean and variance (Welford).
class FeatureStatistics {
 public:
  explicit FeatureStatistics(int dim);

  void add(const Vector& raw);
  long count() const { return count_; }
  /// shift = mean, scale = std (1 where the std is degenerate).
  FeatureNormalization freeze() const;

 private:
  long count_ = 0;
  Vector mean_;
  Vector m2_;
};

/// Information-state width: n_x + 2 + 2 n_z.
int feature_dim(const StateSpaceModel& model);

/// Unnormalized layout:
/// [predictive mean; tr(P); log det(P); z_k; nominal innovation].
Vector raw_info_state(const GaussianBelief& pred, const Vector& z, const Vector& nominal_innov);

/// raw_info_state followed by the frozen normalization.
Vector build_info_state(const GaussianBelief& pred, const Vector& z, const Vector& nominal_innov,
                        const FeatureNormalization& norm);

/// Parameters of the side computation that supplies the innovation feature
/// before the actual parameter is chosen: the default kappa for the
/// unscented filter, a single iteration for stochastic integration.
TransformParams nominal_params(int state_dim, FilterKind kind);

/// Innovation of z against the measurement prediction made with
/// nominal_params; only the predicted mean is used.
Vector nominal_innovation(const GaussianBelief& pred, const StateSpaceModel& model, const Vector& z,
                          int k, FilterKind kind, RandomStream& rng);

}  // namespace adaptkf
