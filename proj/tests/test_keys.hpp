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

#ifndef SHEREC_TESTS_TEST_KEYS_HPP_
#define SHEREC_TESTS_TEST_KEYS_HPP_

#include "sherec/error.hpp"
#include "sherec/she_core.hpp"

namespace sherec::testing {

// p = 11, q = 13.
inline const KeyMaterial& tiny_keys() {
  static const KeyMaterial keys = [] {
    Rng rng = Rng::from_seed(143);
    return keygen_from_primes(BigInt(11), BigInt(13), rng);
  }();
  return keys;
}

// 16-bit primes, N near 2^32.
inline const KeyMaterial& small_keys() {
  static const KeyMaterial keys = keygen(KeyGenParams{16, 16});
  return keys;
}

// 1024-bit N.
inline const KeyMaterial& full_keys() {
  static const KeyMaterial keys = keygen(KeyGenParams{512, 1024});
  return keys;
}

inline std::uint64_t u(const BigInt& v) { return to_u64(v); }

}  // namespace sherec::testing

#endif  // SHEREC_TESTS_TEST_KEYS_HPP_
