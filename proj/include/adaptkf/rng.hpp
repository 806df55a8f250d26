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
#include <initializer_list>
#include <limits>

#include "adaptkf/numerics.hpp"

namespace adaptkf {

/// Counter-based random stream: draw i is a pure function of (key, i), so a
/// stream can be re-derived anywhere from its key without shared state.
/// Child streams are keyed by hashing (parent key, tag...).
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t key = 0) : key_(key) {}

  RandomStream child(std::uint64_t tag) const;
  RandomStream child(std::initializer_list<std::uint64_t> tags) const;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64();
  result_type operator()() { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  Vector normal_vector(Eigen::Index n);
  /// Draws from N(mean, cov); cov must pass cholesky_psd.
  Vector gaussian(const Vector& mean, const Matrix& cov);
  /// Index in [0, n).
  std::size_t below(std::size_t n);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x);

/// Stream tags used across modules so that independent consumers never share
/// a sub-stream.
namespace stream_tag {
inline constexpr std::uint64_t kTrajectory = 0x7472616a;   // "traj"
inline constexpr std::uint64_t kFilter = 0x66696c74;       // "filt"
inline constexpr std::uint64_t kPredict = 0x70726564;      // "pred"
inline constexpr std::uint64_t kUpdate = 0x75706474;       // "updt"
inline constexpr std::uint64_t kNominal = 0x6e6f6d69;      // "nomi"
inline constexpr std::uint64_t kActor = 0x6163746f;        // "acto"
inline constexpr std::uint64_t kInit = 0x696e6974;         // "init"
inline constexpr std::uint64_t kWarmup = 0x7761726d;       // "warm"
inline constexpr std::uint64_t kTrain = 0x7472616e;        // "tran"
inline constexpr std::uint64_t kEval = 0x6576616c;         // "eval"
}  // namespace stream_tag

}  // namespace adaptkf
