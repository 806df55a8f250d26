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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "adaptkf/kernels.hpp"

namespace adaptkf::kernels {

namespace {

const KernelTable* initial_choice() {
  const char* env = std::getenv("ADAPTKF_KERNELS");
  const std::string_view request = env ? env : "auto";
  if (request == "scalar") return &scalar_kernels();
  if (avx2_available()) return avx2_kernels();
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{initial_choice()};
  return table;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") &&
                         __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

bool select(KernelChoice choice) {
  switch (choice) {
    case KernelChoice::Scalar:
      slot().store(&scalar_kernels());
      return true;
    case KernelChoice::Avx2:
      if (!avx2_available()) return false;
      slot().store(avx2_kernels());
      return true;
    case KernelChoice::Auto:
      slot().store(avx2_available() ? avx2_kernels() : &scalar_kernels());
      return true;
  }
  return false;
}

}  // namespace adaptkf::kernels
