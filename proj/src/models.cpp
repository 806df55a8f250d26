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

#include "adaptkf/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "adaptkf/rng.hpp"

namespace adaptkf {

bool StateSpaceModel::is_angular(int meas_index) const {
  return std::find(angular_meas_dims.begin(), angular_meas_dims.end(), meas_index) !=
         angular_meas_dims.end();
}

std::uint64_t Trajectory::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      std::uint64_t bits;
      const double d = v(i);
      std::memcpy(&bits, &d, sizeof bits);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffu;
        h *= 0x100000001b3ull;
      }
    }
  };
  for (const auto& x : states) feed(x);
  for (const auto& z : measurements) feed(z);
  return h;
}

StateSpaceModel ungm(int horizon) {
  StateSpaceModel m;
  m.name = "ungm";
  m.state_dim = 1;
  m.meas_dim = 1;
  m.dynamics = [](const Vector& x, int k) {
    const double s = x(0);
    Vector out(1);
    out(0) = 0.5 * s + 25.0 * s / (1.0 + s * s) + 8.0 * std::cos(0.05 * k);
    return out;
  };
  m.measurement = [](const Vector& x, int) {
    Vector out(1);
    out(0) = x(0) * x(0) / 20.0;
    return out;
  };
  m.process_cov = Matrix::Constant(1, 1, 1.0);
  m.meas_cov = Matrix::Constant(1, 1, 0.1);
  m.init_mean = Vector::Zero(1);
  m.init_cov = Matrix::Constant(1, 1, 5.0);
  m.horizon = horizon;
  return m;
}

Matrix ctm_transition(double turn_rate, double dt) {
  const double wt = turn_rate * dt;
  const double s = std::sin(wt);
  const double c = std::cos(wt);
  const double w = turn_rate;
  Matrix f(4, 4);
  // clang-format off
  f << 1.0, s / w,           0.0, -(1.0 - c) / w,
       0.0, c,               0.0, -s,
       0.0, (1.0 - c) / w,   1.0, s / w,
       0.0, s,               0.0, c;
  // clang-format on
  return f;
}

Matrix ctm_process_cov(double noise_intensity, double dt) {
  Matrix block(2, 2);
  block << dt * dt * dt / 3.0, dt * dt / 2.0, dt * dt / 2.0, dt;
  Matrix q = Matrix::Zero(4, 4);
  q.block(0, 0, 2, 2) = block;
  q.block(2, 2, 2, 2) = block;
  return noise_intensity * q;
}

StateSpaceModel ctm(const CtmOptions& options) {
  StateSpaceModel m;
  m.name = "ctm";
  m.state_dim = 4;
  m.meas_dim = 1;
  const Matrix f = ctm_transition(options.turn_rate, options.dt);
  m.transition = f;
  m.dynamics = [f](const Vector& x, int) -> Vector { return f * x; };
  m.measurement = [](const Vector& x, int) {
    Vector out(1);
    out(0) = std::atan2(x(2), x(0));
    return out;
  };
  m.process_cov = ctm_process_cov(options.noise_intensity, options.dt);
  m.meas_cov = Matrix::Constant(1, 1, options.bearing_var);
  m.init_mean = Vector(4);
  m.init_mean << 80.0, 0.0, 0.0, 20.0;
  m.init_cov = Vector((Vector(4) << 1e3, 1e2, 1e3, 1e2).finished()).asDiagonal();
  m.angular_meas_dims = {0};
  m.horizon = options.horizon;
  return m;
}

StateSpaceModel linear_gaussian(const Matrix& transition, const Matrix& meas_matrix,
                                const Matrix& process_cov, const Matrix& meas_cov,
                                const Vector& init_mean, const Matrix& init_cov, int horizon,
                                std::string name) {
  StateSpaceModel m;
  m.name = std::move(name);
  m.state_dim = static_cast<int>(transition.rows());
  m.meas_dim = static_cast<int>(meas_matrix.rows());
  m.transition = transition;
  m.meas_matrix = meas_matrix;
  m.dynamics = [transition](const Vector& x, int) -> Vector { return transition * x; };
  m.measurement = [meas_matrix](const Vector& x, int) -> Vector { return meas_matrix * x; };
  m.process_cov = process_cov;
  m.meas_cov = meas_cov;
  m.init_mean = init_mean;
  m.init_cov = init_cov;
  m.horizon = horizon;
  return m;
}

StateSpaceModel model_by_name(const std::string& name, int horizon) {
  if (name == "ungm") return horizon > 0 ? ungm(horizon) : ungm();
  if (name == "ctm") {
    CtmOptions options;
    if (horizon > 0) options.horizon = horizon;
    return ctm(options);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model '" + name + "'");
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
  return RandomStream(master_seed).child({stream_tag::kTrajectory, index}).key();
}

Trajectory simulate(const StateSpaceModel& model, std::uint64_t seed) {
  RandomStream rng = RandomStream(seed).child(stream_tag::kTrajectory);
  Trajectory traj;
  traj.seed = seed;
  traj.states.reserve(model.horizon);
  traj.measurements.reserve(model.horizon);

  const Vector no_meas_noise = Vector::Zero(model.meas_dim);
  const Vector no_proc_noise = Vector::Zero(model.state_dim);

  Vector x = rng.gaussian(model.init_mean, model.init_cov);
  for (int k = 1; k <= model.horizon; ++k) {
    Vector z = model.measurement(x, k) + rng.gaussian(no_meas_noise, model.meas_cov);
    for (int d : model.angular_meas_dims) z(d) = wrap_angle(z(d));
    traj.states.push_back(x);
    traj.measurements.push_back(std::move(z));
    if (k < model.horizon) {
      x = model.dynamics(x, k) + rng.gaussian(no_proc_noise, model.process_cov);
    }
  }
  return traj;
}

}  // namespace adaptkf
