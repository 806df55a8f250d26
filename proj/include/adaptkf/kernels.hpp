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

// Dense inner loops of the policy networks. Each kernel has a portable
// scalar reference and, on x86-64, an AVX2+FMA variant compiled in its own
// translation unit. The variant is chosen once at runtime from CPUID and can
// be forced with ADAPTKF_KERNELS=scalar|avx2.
//
// This header must stay free of heavy includes: it is the only project header
// seen by the AVX2 translation unit.

#pragma once

#include <cstddef>

namespace adaptkf::kernels {

struct AdamCoefficients {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
  const char* name;
  /// y[r] = b[r] + sum_c w[r*cols + c] * x[c]
  void (*affine)(const double* w, const double* b, const double* x, double* y, std::size_t rows,
                 std::size_t cols);
  /// gx[c] = sum_r w[r*cols + c] * gy[r]
  void (*affine_transpose)(const double* w, const double* gy, double* gx, std::size_t rows,
                           std::size_t cols);
  /// gw[r*cols + c] += gy[r] * x[c]
  void (*outer_accumulate)(const double* gy, const double* x, double* gw, std::size_t rows,
                           std::size_t cols);
  /// Bias-corrected Adam step over n parameters.
  void (*adam)(double* params, const double* grads, double* m, double* v, std::size_t n,
               const AdamCoefficients& c);
  /// target = tau * online + (1 - tau) * target
  void (*polyak)(double* target, const double* online, std::size_t n, double tau);
};

const KernelTable& scalar_kernels();
/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_kernels();
/// True when the CPU supports the AVX2 variant and it was compiled in.
bool avx2_available();

/// The table used by the network code.
const KernelTable& active();

enum class KernelChoice { Auto, Scalar, Avx2 };
/// Overrides the runtime choice (tests and benchmarking). Returns false if the
/// request cannot be honoured on this machine.
bool select(KernelChoice choice);

}  // namespace adaptkf::kernels
