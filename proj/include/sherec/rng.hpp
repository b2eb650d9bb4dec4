// Copyright 2026 The sherec Authors
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

#ifndef SHEREC_RNG_HPP_
#define SHEREC_RNG_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "sherec/bigint.hpp"

namespace sherec {

// ChaCha20 keystream generator. Every draw consumes a fresh nonce, so the
// output is a pure function of (key, number of prior draws). fork() derives
// an independent child keyed on a stream id; parallel loops fork one child
// per work item, which keeps results independent of thread scheduling.
//
// Not thread-safe; give each thread or work item its own instance.
class Rng {
 public:
  static Rng from_seed(std::uint64_t seed);
  static Rng from_entropy();

  Rng fork(std::uint64_t stream_id) const;

  void fill(std::span<unsigned char> out);
  std::uint64_t next_u64();

  // Uniform in [0, bound).
  BigInt below(const BigInt& bound);
  // Uniform value with exactly `bits` bits (top bit set).
  BigInt exact_bits(std::size_t bits);
  // Uniform in Z*_n, resampling on gcd != 1.
  BigInt unit_mod(const BigInt& n);

 private:
  explicit Rng(const std::array<unsigned char, 32>& key) : key_(key) {}

  std::array<unsigned char, 32> key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sherec

#endif  // SHEREC_RNG_HPP_
