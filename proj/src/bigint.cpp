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

#include "sherec/bigint.hpp"

#include "sherec/error.hpp"

namespace sherec {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kZeroPlaintext: return "zero plaintext";
    case ErrorCode::kDegenerateCiphertext: return "degenerate ciphertext";
    case ErrorCode::kKeyIntegrity: return "key integrity error";
    case ErrorCode::kGeneration: return "generation error";
    case ErrorCode::kRetry: return "retry";
    case ErrorCode::kRetryExhausted: return "retries exhausted";
    case ErrorCode::kProtocolOrder: return "protocol order error";
    case ErrorCode::kProtocol: return "protocol error";
    case ErrorCode::kAborted: return "aborted";
    case ErrorCode::kTransport: return "transport error";
    case ErrorCode::kOracleMismatch: return "oracle mismatch";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

std::string to_hex(const BigInt& v) {
  if (v < 0) throw Error(ErrorCode::kDomain, "negative value has no wire encoding");
  return v.get_str(16);
}

BigInt from_hex(std::string_view hex) {
  if (hex.empty()) throw Error(ErrorCode::kProtocol, "empty hex string");
  if (hex.size() > 1 && hex.front() == '0') {
    throw Error(ErrorCode::kProtocol, "hex string has leading zeros");
  }
  for (char c : hex) {
    bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!ok) throw Error(ErrorCode::kProtocol, "invalid hex digit in '" + std::string(hex) + "'");
  }
  return BigInt(std::string(hex), 16);
}

BigInt powm(const BigInt& base, const BigInt& exp, const BigInt& mod) {
  BigInt r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return r;
}

BigInt invert(const BigInt& a, const BigInt& mod) {
  BigInt r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()) == 0) {
    throw Error(ErrorCode::kDegenerateCiphertext, "value is not invertible");
  }
  return r;
}

bool is_unit(const BigInt& a, const BigInt& mod) {
  BigInt g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t());
  return g == 1;
}

std::uint64_t to_u64(const BigInt& v) {
  if (v < 0 || bit_length(v) > 64) throw Error(ErrorCode::kDomain, "value exceeds 64 bits");
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof out, 0, 0, v.get_mpz_t());
  return out;
}

}  // namespace sherec
