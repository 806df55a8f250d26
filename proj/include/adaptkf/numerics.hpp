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

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace adaptkf {

/// Dense row-major matrix. State dimensions in this library are small (<= 8).
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class ErrorCode {
  NotSymmetric,
  NotFactorizable,
  InnovationNotFinite,
  AllActionsFailed,
  TrainingDiverged,
  InvalidArgument,
  CheckpointMismatch,
  Io,
};

const char* to_string(ErrorCode code);

/// Base exception for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct CholeskyResult {
  Matrix lower;
  double jitter = 0.0;  // epsilon added to the diagonal before factorization
};

/// Factorizes m + eps*I = L*L^T. eps is 0 when m is positive definite,
/// otherwise the first value of jitter_start * 10^j (j = 0..8) that works.
/// Throws Error(NotSymmetric) or Error(NotFactorizable).
CholeskyResult cholesky_psd(const Matrix& m, double jitter_start = 1e-12);

/// log det(m) computed from the (possibly jittered) Cholesky factor.
double log_det_psd(const Matrix& m);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

Matrix symmetrize(const Matrix& m);

/// Solves (L L^T) X = B for X given the lower Cholesky factor.
Matrix cholesky_solve(const Matrix& lower, const Matrix& b);
Vector cholesky_solve(const Matrix& lower, const Vector& b);

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

}  // namespace adaptkf
