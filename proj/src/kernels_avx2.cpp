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

// Compiled with -mavx2 -mfma. Only reached after the dispatcher has checked
// CPUID, so nothing here may be inlined into other translation units.

#include "adaptkf/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace adaptkf::kernels {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

void affine(const double* w, const double* b, const double* x, double* y, std::size_t rows,
            std::size_t cols) {
  const std::size_t vec_end = cols & ~std::size_t{7};
  const std::size_t quad_end = cols & ~std::size_t{3};
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c < vec_end; c += 8) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c + 4), _mm256_loadu_pd(x + c + 4), acc1);
    }
    for (; c < quad_end; c += 4) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; c < cols; ++c) acc += row[c] * x[c];
    y[r] = b[r] + acc;
  }
}

void affine_transpose(const double* w, const double* gy, double* gx, std::size_t rows,
                      std::size_t cols) {
  const std::size_t quad_end = cols & ~std::size_t{3};
  for (std::size_t c = 0; c < cols; ++c) gx[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    const __m256d g = _mm256_set1_pd(gy[r]);
    std::size_t c = 0;
    for (; c < quad_end; c += 4) {
      const __m256d acc = _mm256_loadu_pd(gx + c);
      _mm256_storeu_pd(gx + c, _mm256_fmadd_pd(_mm256_loadu_pd(row + c), g, acc));
    }
    for (; c < cols; ++c) gx[c] += row[c] * gy[r];
  }
}

void outer_accumulate(const double* gy, const double* x, double* gw, std::size_t rows,
                      std::size_t cols) {
  const std::size_t quad_end = cols & ~std::size_t{3};
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = gw + r * cols;
    const __m256d g = _mm256_set1_pd(gy[r]);
    std::size_t c = 0;
    for (; c < quad_end; c += 4) {
      const __m256d acc = _mm256_loadu_pd(row + c);
      _mm256_storeu_pd(row + c, _mm256_fmadd_pd(g, _mm256_loadu_pd(x + c), acc));
    }
    for (; c < cols; ++c) row[c] += gy[r] * x[c];
  }
}

void adam(double* params, const double* grads, double* m, double* v, std::size_t n,
          const AdamCoefficients& k) {
  const __m256d b1 = _mm256_set1_pd(k.beta1);
  const __m256d b2 = _mm256_set1_pd(k.beta2);
  const __m256d omb1 = _mm256_set1_pd(1.0 - k.beta1);
  const __m256d omb2 = _mm256_set1_pd(1.0 - k.beta2);
  const __m256d bc1 = _mm256_set1_pd(k.bias_correction1);
  const __m256d bc2 = _mm256_set1_pd(k.bias_correction2);
  const __m256d lr = _mm256_set1_pd(k.lr);
  const __m256d eps = _mm256_set1_pd(k.eps);
  const std::size_t quad_end = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < quad_end; i += 4) {
    const __m256d g = _mm256_loadu_pd(grads + i);
    const __m256d mi = _mm256_fmadd_pd(b1, _mm256_loadu_pd(m + i), _mm256_mul_pd(omb1, g));
    const __m256d vi =
        _mm256_fmadd_pd(b2, _mm256_loadu_pd(v + i), _mm256_mul_pd(omb2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d m_hat = _mm256_div_pd(mi, bc1);
    const __m256d v_hat = _mm256_div_pd(vi, bc2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(lr, m_hat), denom);
    _mm256_storeu_pd(params + i, _mm256_sub_pd(_mm256_loadu_pd(params + i), step));
  }
  for (; i < n; ++i) {
    const double g = grads[i];
    m[i] = k.beta1 * m[i] + (1.0 - k.beta1) * g;
    v[i] = k.beta2 * v[i] + (1.0 - k.beta2) * (g * g);
    const double m_hat = m[i] / k.bias_correction1;
    const double v_hat = v[i] / k.bias_correction2;
    params[i] -= k.lr * m_hat / (__builtin_sqrt(v_hat) + k.eps);
  }
}

void polyak(double* target, const double* online, std::size_t n, double tau) {
  const __m256d t = _mm256_set1_pd(tau);
  const __m256d keep = _mm256_set1_pd(1.0 - tau);
  const std::size_t quad_end = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < quad_end; i += 4) {
    const __m256d mixed =
        _mm256_fmadd_pd(t, _mm256_loadu_pd(online + i), _mm256_mul_pd(keep, _mm256_loadu_pd(target + i)));
    _mm256_storeu_pd(target + i, mixed);
  }
  for (; i < n; ++i) target[i] = tau * online[i] + (1.0 - tau) * target[i];
}

constexpr KernelTable kAvx2{"avx2", affine, affine_transpose, outer_accumulate, adam, polyak};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }

}  // namespace adaptkf::kernels

#else

namespace adaptkf::kernels {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace adaptkf::kernels

#endif
