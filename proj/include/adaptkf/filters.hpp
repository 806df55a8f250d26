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

#include <functional>
#include <span>
#include <string>

#include "adaptkf/models.hpp"
#include "adaptkf/numerics.hpp"
#include "adaptkf/rng.hpp"

namespace adaptkf {

struct GaussianBelief {
  Vector mean;
  Matrix cov;
};

enum class FilterKind { Unscented, StochasticIntegration };

const char* to_string(FilterKind kind);
/// Accepts "ukf" / "sif".
FilterKind filter_kind_from_string(const std::string& name);

/// Numerical parameter of a moment transform: kappa for the unscented
/// transform, the iteration count for stochastic integration.
struct TransformParams {
  FilterKind kind = FilterKind::Unscented;
  double kappa = 0.0;
  int n_iter = 1;

  static TransformParams unscented(double kappa) { return {FilterKind::Unscented, kappa, 1}; }
  static TransformParams stochastic(int n_iter) {
    return {FilterKind::StochasticIntegration, 0.0, n_iter};
  }

  /// kappa or n_iter, whichever applies.
  double value() const { return kind == FilterKind::Unscented ? kappa : n_iter; }
  std::string label() const;
  /// Throws InvalidArgument unless the parameters are usable in dimension n.
  void validate(int n) const;

  friend bool operator==(const TransformParams&, const TransformParams&) = default;
};

/// Output moments of y = g(x), x ~ N(mean, cov), before noise is added.
struct MomentEstimate {
  Vector mean;
  Matrix cov;
  Matrix cross_cov;  // input-dim x output-dim
};

struct UpdateResult {
  GaussianBelief posterior;
  Vector innovation;
  Matrix innov_cov;
  Vector pred_meas;
  Matrix gain;
  double nis = 0.0;
};

using VectorFunction = std::function<Vector(const Vector&)>;

/// Classic (kappa-only) sigma-point rule with 2n+1 points.
MomentEstimate unscented_transform(const GaussianBelief& belief, const VectorFunction& g,
                                   double kappa, std::span<const int> angular_dims = {});

/// Randomly rotated degree-3 spherical-radial rule, averaged over n_iter
/// independent rotations drawn from rng.
MomentEstimate stochastic_integration_transform(const GaussianBelief& belief,
                                                const VectorFunction& g, int n_iter,
                                                RandomStream& rng,
                                                std::span<const int> angular_dims = {});

MomentEstimate moment_transform(const GaussianBelief& belief, const VectorFunction& g,
                                const TransformParams& params, RandomStream& rng,
                                std::span<const int> angular_dims = {});

/// Filtering belief at k -> predictive belief at k+1.
GaussianBelief gaf_predict(const GaussianBelief& belief, const StateSpaceModel& model, int k,
                           const TransformParams& params, RandomStream& rng);

/// Predictive belief at k plus measurement z_k -> filtering belief at k.
UpdateResult gaf_update(const GaussianBelief& pred, const StateSpaceModel& model, const Vector& z,
                        int k, const TransformParams& params, RandomStream& rng);

/// Parameters used when nothing adapts them: kappa = max(0, 3 - n_x) for the
/// unscented transform, 10 iterations for stochastic integration.
TransformParams default_transform_params(int state_dim, FilterKind kind);

/// Sub-streams of one filter run. Every consumer of randomness in a run gets
/// its own stream keyed by time step (and by candidate parameter for
/// updates), so two runs that evaluate the same parameter at the same step
/// see the same random rotations.
class FilterStreams {
 public:
  explicit FilterStreams(std::uint64_t run_seed)
      : base_(RandomStream(run_seed).child(stream_tag::kFilter)) {}

  RandomStream update(int k, const TransformParams& params) const;
  RandomStream predict(int k) const;
  RandomStream nominal(int k) const;

 private:
  RandomStream base_;
};

/// z - zhat with the model's angular components wrapped.
Vector innovation(const StateSpaceModel& model, const Vector& z, const Vector& zhat);

}  // namespace adaptkf
