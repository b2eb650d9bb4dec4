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

#include "sherec/rng.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>
#include <vector>

#include "sherec/error.hpp"

namespace sherec {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw Error(ErrorCode::kGeneration, "libsodium initialisation failed");
  });
}

void put_le64(unsigned char* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

}  // namespace

Rng Rng::from_seed(std::uint64_t seed) {
  ensure_sodium();
  unsigned char msg[16] = {'s', 'h', 'e', 'r', 'e', 'c', '/', 's'};
  put_le64(msg + 8, seed);
  std::array<unsigned char, 32> key;
  crypto_generichash(key.data(), key.size(), msg, sizeof msg, nullptr, 0);
  return Rng(key);
}

Rng Rng::from_entropy() {
  ensure_sodium();
  std::array<unsigned char, 32> key;
  randombytes_buf(key.data(), key.size());
  return Rng(key);
}

Rng Rng::fork(std::uint64_t stream_id) const {
  unsigned char msg[16] = {'s', 'h', 'e', 'r', 'e', 'c', '/', 'f'};
  put_le64(msg + 8, stream_id);
  std::array<unsigned char, 32> key;
  crypto_generichash(key.data(), key.size(), msg, sizeof msg, key_.data(), key_.size());
  return Rng(key);
}

void Rng::fill(std::span<unsigned char> out) {
  unsigned char nonce[crypto_stream_chacha20_ietf_NONCEBYTES] = {};
  put_le64(nonce, counter_++);
  crypto_stream_chacha20_ietf(out.data(), out.size(), nonce, key_.data());
}

std::uint64_t Rng::next_u64() {
  unsigned char buf[8];
  fill(buf);
  std::uint64_t v;
  std::memcpy(&v, buf, sizeof v);
  return v;
}

BigInt Rng::below(const BigInt& bound) {
  if (bound <= 0) throw Error(ErrorCode::kDomain, "sampling bound must be positive");
  if (bound == 1) return 0;
  BigInt max = bound - 1;
  std::size_t bits = bit_length(max);
  std::size_t bytes = (bits + 7) / 8;
  std::vector<unsigned char> buf(bytes);
  unsigned top_mask = bits % 8 == 0 ? 0xff : (1u << (bits % 8)) - 1;
  BigInt v;
  for (;;) {
    fill(buf);
    buf[0] &= static_cast<unsigned char>(top_mask);
    mpz_import(v.get_mpz_t(), bytes, 1, 1, 1, 0, buf.data());
    if (v < bound) return v;
  }
}

BigInt Rng::exact_bits(std::size_t bits) {
  if (bits == 0) throw Error(ErrorCode::kDomain, "bit length must be positive");
  BigInt top = 1;
  top <<= bits - 1;
  return below(top) + top;
}

BigInt Rng::unit_mod(const BigInt& n) {
  if (n < 2) throw Error(ErrorCode::kDomain, "modulus must be at least 2");
  for (;;) {
    BigInt v = below(n);
    if (v != 0 && is_unit(v, n)) return v;
  }
}

}  // namespace sherec
