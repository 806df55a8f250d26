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

#include "adaptkf/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace adaptkf {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

RandomStream RandomStream::child(std::uint64_t tag) const {
  return RandomStream(mix64(key_ ^ mix64(tag + kGolden)) + kGolden);
}

RandomStream RandomStream::child(std::initializer_list<std::uint64_t> tags) const {
  RandomStream s = *this;
  for (auto t : tags) s = s.child(t);
  return s;
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t c = ++counter_;
  const std::uint64_t z = mix64(key_ + c * kGolden);
  return mix64(z ^ std::rotl(key_, 29));
}

double RandomStream::uniform() {
  // 53 random bits, offset by half an ulp so 0 is never produced
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

Vector RandomStream::normal_vector(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Vector RandomStream::gaussian(const Vector& mean, const Matrix& cov) {
  if (cov.size() == 0 || cov.isZero(0.0)) return mean;
  const auto chol = cholesky_psd(cov);
  return mean + chol.lower * normal_vector(mean.size());
}

std::size_t RandomStream::below(std::size_t n) {
  // Lemire's multiply-shift; the bias for the small n used here is < 2^-50
  const unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * n;
  return static_cast<std::size_t>(wide >> 64);
}

}  // namespace adaptkf
