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

#include "adaptkf/kernels.hpp"

namespace adaptkf::kernels {

namespace {

void affine(const double* w, const double* b, const double* x, double* y, std::size_t rows,
            std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = b[r] + acc;
  }
}

void affine_transpose(const double* w, const double* gy, double* gx, std::size_t rows,
                      std::size_t cols) {
  for (std::size_t c = 0; c < cols; ++c) gx[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    const double g = gy[r];
    for (std::size_t c = 0; c < cols; ++c) gx[c] += row[c] * g;
  }
}

void outer_accumulate(const double* gy, const double* x, double* gw, std::size_t rows,
                      std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = gw + r * cols;
    const double g = gy[r];
    for (std::size_t c = 0; c < cols; ++c) row[c] += g * x[c];
  }
}

void adam(double* params, const double* grads, double* m, double* v, std::size_t n,
          const AdamCoefficients& k) {
  const double one_minus_b1 = 1.0 - k.beta1;
  const double one_minus_b2 = 1.0 - k.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    m[i] = k.beta1 * m[i] + one_minus_b1 * g;
    v[i] = k.beta2 * v[i] + one_minus_b2 * (g * g);
    const double m_hat = m[i] / k.bias_correction1;
    const double v_hat = v[i] / k.bias_correction2;
    params[i] -= k.lr * m_hat / (std::sqrt(v_hat) + k.eps);
  }
}

void polyak(double* target, const double* online, std::size_t n, double tau) {
  const double keep = 1.0 - tau;
  for (std::size_t i = 0; i < n; ++i) target[i] = tau * online[i] + keep * target[i];
}

constexpr KernelTable kScalar{"scalar", affine, affine_transpose, outer_accumulate, adam, polyak};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace adaptkf::kernels
