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

#include "adaptkf/numerics.hpp"

#include <cmath>
#include <numbers>

namespace adaptkf {

namespace {

constexpr double kSymmetryTolerance = 1e-9;
constexpr int kMaxJitterEscalations = 8;

bool try_factorize(const Matrix& m, Matrix& lower) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return false;
  lower = llt.matrixL();
  if (!all_finite(lower)) return false;
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    if (!(lower(i, i) > 0.0)) return false;
  }
  return true;
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotFactorizable: return "NotFactorizable";
    case ErrorCode::InnovationNotFinite: return "InnovationNotFinite";
    case ErrorCode::AllActionsFailed: return "AllActionsFailed";
    case ErrorCode::TrainingDiverged: return "TrainingDiverged";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CheckpointMismatch: return "CheckpointMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

CholeskyResult cholesky_psd(const Matrix& m, double jitter_start) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::NotSymmetric, "matrix is not square");
  }
  if (!all_finite(m)) {
    throw Error(ErrorCode::NotFactorizable, "matrix has non-finite entries");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw Error(ErrorCode::NotSymmetric, "asymmetry exceeds relative tolerance");
  }

  CholeskyResult out;
  if (try_factorize(m, out.lower)) return out;

  const auto identity = Matrix::Identity(m.rows(), m.cols());
  double eps = jitter_start;
  for (int step = 0; step <= kMaxJitterEscalations; ++step, eps *= 10.0) {
    if (try_factorize(m + eps * identity, out.lower)) {
      out.jitter = eps;
      return out;
    }
  }
  throw Error(ErrorCode::NotFactorizable, "jitter ladder exhausted");
}

double log_det_psd(const Matrix& m) {
  const auto chol = cholesky_psd(m);
  return 2.0 * chol.lower.diagonal().array().log().sum();
}

double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (a > -pi && a <= pi) return a;
  double r = std::fmod(a + pi, two_pi);
  if (r <= 0.0) r += two_pi;
  // r in (0, 2pi]; rounding of r - pi can still land on -pi
  const double out = r - pi;
  return out <= -pi ? pi : out;
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix cholesky_solve(const Matrix& lower, const Matrix& b) {
  Matrix y = lower.triangularView<Eigen::Lower>().solve(b);
  return lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Vector cholesky_solve(const Matrix& lower, const Vector& b) {
  Vector y = lower.triangularView<Eigen::Lower>().solve(b);
  return lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace adaptkf
