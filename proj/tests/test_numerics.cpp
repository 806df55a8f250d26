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

#include "adaptkf/numerics.hpp"
#include "adaptkf/rng.hpp"

namespace adaptkf {
namespace {

constexpr double kPi = std::numbers::pi;

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

TEST(Cholesky, IdentityNeedsNoJitter) {
  const auto res = cholesky_psd(Matrix::Identity(2, 2), 1e-12);
  EXPECT_TRUE(res.lower.isApprox(Matrix::Identity(2, 2)));
  EXPECT_EQ(res.jitter, 0.0);
}

TEST(Cholesky, DiagonalSquareRoots) {
  const auto res = cholesky_psd(mat({{4, 0}, {0, 9}}));
  EXPECT_DOUBLE_EQ(res.lower(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(res.lower(1, 1), 3.0);
  EXPECT_DOUBLE_EQ(res.lower(1, 0), 0.0);
  EXPECT_EQ(res.jitter, 0.0);
}

TEST(Cholesky, RankOneUsesJitterLadder) {
  const Matrix m = mat({{1, 1}, {1, 1}});
  const auto res = cholesky_psd(m, 1e-12);
  EXPECT_GT(res.jitter, 0.0);
  EXPECT_LE(res.jitter, 1e-8);
  const Matrix target = m + res.jitter * Matrix::Identity(2, 2);
  EXPECT_LT((res.lower * res.lower.transpose() - target).norm(), 1e-9);
}

TEST(Cholesky, RejectsAsymmetric) {
  try {
    cholesky_psd(mat({{1, 0.5}, {0, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSymmetric);
  }
}

TEST(Cholesky, ToleratesTinyAsymmetry) {
  EXPECT_NO_THROW(cholesky_psd(mat({{1, 1e-12}, {0, 1}})));
}

TEST(Cholesky, NegativeDefiniteExhaustsLadder) {
  try {
    cholesky_psd(mat({{-1, 0}, {0, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFactorizable);
  }
}

TEST(Cholesky, ReconstructionPropertyOnRandomPsd) {
  RandomStream rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(5));
    const int rank = 1 + static_cast<int>(rng.below(n));
    Matrix a(n, rank);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < rank; ++j) a(i, j) = rng.normal();
    const Matrix m = symmetrize(a * a.transpose());
    const auto res = cholesky_psd(m);
    const Matrix target = m + res.jitter * Matrix::Identity(n, n);
    EXPECT_LT((res.lower * res.lower.transpose() - target).norm() / std::max(1.0, m.norm()), 1e-9);
  }
}

TEST(LogDet, Examples) {
  EXPECT_NEAR(log_det_psd(Matrix::Identity(3, 3)), 0.0, 1e-15);
  EXPECT_NEAR(log_det_psd(mat({{std::exp(1.0), 0}, {0, std::exp(1.0)}})), 2.0, 1e-12);
  EXPECT_NEAR(log_det_psd(mat({{2, 1}, {1, 2}})), std::log(3.0), 1e-12);
}

TEST(LogDet, ScaledIdentity) {
  for (int n = 1; n <= 4; ++n) {
    for (double alpha : {0.1, 1.0, 10.0}) {
      EXPECT_NEAR(log_det_psd(alpha * Matrix::Identity(n, n)), n * std::log(alpha), 1e-10);
    }
  }
}

TEST(WrapAngle, Examples) {
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_EQ(wrap_angle(kPi), kPi);
  EXPECT_EQ(wrap_angle(-kPi), kPi);
  EXPECT_EQ(wrap_angle(0.0), 0.0);
}

TEST(WrapAngle, RangeIdempotenceAndPeriodicity) {
  RandomStream rng(5);
  for (int i = 0; i < 20000; ++i) {
    const double a = (rng.uniform() - 0.5) * 200.0;
    const double w = wrap_angle(a);
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
    EXPECT_EQ(wrap_angle(w), w);
    const double turns = std::round((a - w) / (2 * kPi));
    EXPECT_NEAR(a - w, turns * 2 * kPi, 1e-9);
  }
  for (int k = -1000; k <= 1000; k += 37) {
    const double a = 0.7;
    const double w = wrap_angle(a + 2 * kPi * k);
    EXPECT_NEAR(w, a, 1e-10) << k;
  }
}

TEST(Symmetrize, Examples) {
  EXPECT_EQ(symmetrize(mat({{1, 2}, {0, 1}})), mat({{1, 1}, {1, 1}}));
  const Matrix s = mat({{2, 0.5}, {0.5, 3}});
  EXPECT_EQ(symmetrize(s), s);
  EXPECT_EQ(symmetrize(Matrix::Zero(3, 3)), Matrix::Zero(3, 3));
}

TEST(CholeskySolve, MatchesDirectSolve) {
  const Matrix m = mat({{4, 1, 0.5}, {1, 3, 0.2}, {0.5, 0.2, 2}});
  const Vector b = Vector::LinSpaced(3, 1, 3);
  const auto chol = cholesky_psd(m);
  EXPECT_LT((m * cholesky_solve(chol.lower, b) - b).norm(), 1e-12);
  const Matrix bm = Matrix::Identity(3, 3);
  EXPECT_LT((m * cholesky_solve(chol.lower, bm) - bm).norm(), 1e-12);
}

}  // namespace
}  // namespace adaptkf
