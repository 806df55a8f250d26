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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adaptkf/numerics.hpp"

namespace adaptkf {

/// Time-indexed vector map. The integer argument is the 1-based time index k.
using ModelFunction = std::function<Vector(const Vector&, int)>;

/// x_{k+1} = f(x_k, k) + w_k,  z_k = h(x_k, k) + v_k,  w ~ N(0,Q), v ~ N(0,R).
struct StateSpaceModel {
  std::string name;
  int state_dim = 0;
  int meas_dim = 0;
  ModelFunction dynamics;
  ModelFunction measurement;
  Matrix process_cov;
  Matrix meas_cov;
  Vector init_mean;
  Matrix init_cov;
  std::vector<int> angular_meas_dims;
  int horizon = 0;
  /// Set when the dynamics are x -> F x; used by oracles and diagnostics.
  std::optional<Matrix> transition;
  /// Set when the measurement is x -> H x.
  std::optional<Matrix> meas_matrix;

  bool is_angular(int meas_index) const;
};

/// Ground-truth realization. Index i of each sequence holds time k = i + 1.
struct Trajectory {
  std::vector<Vector> states;
  std::vector<Vector> measurements;
  std::uint64_t seed = 0;

  int length() const { return static_cast<int>(states.size()); }
  /// FNV-1a over the raw bytes of states and measurements.
  std::uint64_t hash() const;
};

/// Univariate nonstationary growth model.
StateSpaceModel ungm(int horizon = 500);

struct CtmOptions {
  double turn_rate = 0.5;
  double dt = 1.0;
  double noise_intensity = 1.0;
  double bearing_var = 0.04;
  int horizon = 150;
};

Matrix ctm_transition(double turn_rate, double dt);
Matrix ctm_process_cov(double noise_intensity, double dt);

/// Coordinated-turn model, state [x, vx, y, vy], bearing-only measurement.
StateSpaceModel ctm(const CtmOptions& options = {});

/// Linear-Gaussian model x_{k+1} = F x_k + w, z_k = H x_k + v.
StateSpaceModel linear_gaussian(const Matrix& transition, const Matrix& meas_matrix,
                                const Matrix& process_cov, const Matrix& meas_cov,
                                const Vector& init_mean, const Matrix& init_cov, int horizon,
                                std::string name = "linear");

/// Looks up "ungm" or "ctm"; a horizon of 0 keeps the model default.
StateSpaceModel model_by_name(const std::string& name, int horizon = 0);

/// Per-trajectory seed for Monte Carlo run `index` under `master_seed`.
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

/// Draws x_1 ~ N(x0, P0), then propagates and measures through k = T.
/// Angular measurement components are wrapped to (-pi, pi].
Trajectory simulate(const StateSpaceModel& model, std::uint64_t seed);

}  // namespace adaptkf
