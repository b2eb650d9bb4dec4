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

#ifndef SHEREC_BIGINT_HPP_
#define SHEREC_BIGINT_HPP_

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace sherec {

using BigInt = mpz_class;

// Lowercase hex with no leading zeros; "0" for zero. Negative values are
// rejected since nothing on the wire is signed.
std::string to_hex(const BigInt& v);

// Strict inverse of to_hex: rejects uppercase, leading zeros, signs and
// empty strings.
BigInt from_hex(std::string_view hex);

BigInt powm(const BigInt& base, const BigInt& exp, const BigInt& mod);

// Throws kDegenerateCiphertext when a is not a unit mod m.
BigInt invert(const BigInt& a, const BigInt& mod);

bool is_unit(const BigInt& a, const BigInt& mod);

inline BigInt mod_floor(const BigInt& a, const BigInt& m) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline std::size_t bit_length(const BigInt& v) {
  return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

inline BigInt from_u64(std::uint64_t v) {
  BigInt r;
  mpz_import(r.get_mpz_t(), 1, -1, sizeof v, 0, 0, &v);
  return r;
}

// Throws kDomain when v does not fit.
std::uint64_t to_u64(const BigInt& v);

}  // namespace sherec

#endif  // SHEREC_BIGINT_HPP_
