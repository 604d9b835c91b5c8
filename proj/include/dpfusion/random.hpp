//
// Copyright 2026 The dpfusion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPFUSION_RANDOM_HPP_
#define DPFUSION_RANDOM_HPP_

#include <cstdint>
#include <limits>
#include <random>

#include "dpfusion/matrix_core.hpp"

namespace dpfusion {

// SplitMix64 finalizer. Used both to derive substream keys and to produce
// output words, so every stream is a pure function of (key, counter).
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based splittable random source. Output word n of a stream with key
// K is Mix64(K + n * golden), so a stream never shares state with its
// siblings and can be re-derived anywhere from its key alone.
//
// Satisfies UniformRandomBitGenerator. A stream is owned by one strand.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t key) : key_(key) {}

  // Child stream for `index`; children of distinct indices are independent.
  RandomStream Split(std::uint64_t index) const {
    return RandomStream(Mix64(Mix64(key_) ^ (index * kGolden + kSplitTag)));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return Mix64(key_ + kGolden * ++counter_); }

  double StandardNormal() { return normal_(*this); }

  std::uint64_t key() const { return key_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kSplitTag = 0x632be59bd9b4e019ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Draws from N(0, cov) for a symmetric non-negative definite cov, including
// singular ones, through a symmetric square-root factor.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Matrix& cov);

  Vector Draw(RandomStream& rng) const;
  int dim() const { return static_cast<int>(factor_.rows()); }
  bool is_zero() const { return zero_; }

 private:
  Matrix factor_;
  bool zero_ = false;
};

}  // namespace dpfusion

#endif  // DPFUSION_RANDOM_HPP_
