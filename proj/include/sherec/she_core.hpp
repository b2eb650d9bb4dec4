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

#ifndef SHEREC_SHE_CORE_HPP_
#define SHEREC_SHE_CORE_HPP_

// Paillier (additive) and composite-modulus ElGamal (multiplicative) over a
// shared modulus N = p*q. All values are immutable after construction and
// every operation is a pure function of its arguments plus an explicit Rng.

#include <cstddef>
#include <cstdint>
#include <optional>

#include "sherec/bigint.hpp"
#include "sherec/rng.hpp"

namespace sherec {

inline constexpr std::size_t kMinSecurityBits = 16;
inline constexpr std::size_t kMaxSecurityBits = 4096;
inline constexpr unsigned kPrimalityRounds = 40;
inline constexpr unsigned long kGenerator = 16;

struct KeyGenParams {
  std::size_t security_bits = 512;  // bit length of each prime; |N| = 2 * bits
  std::optional<std::uint64_t> rng_seed;
};

// Cheap fingerprint of N carried by every ciphertext so that mixing material
// from different keys is caught.
using ModulusTag = std::uint64_t;
ModulusTag modulus_tag(const BigInt& n);

struct AddPublicKey {
  BigInt n;
  BigInt n_squared;

  static AddPublicKey from_modulus(const BigInt& n);
  ModulusTag tag() const { return modulus_tag(n); }
};

struct AddSecretKey {
  BigInt n;
  BigInt phi;
  BigInt p;
  BigInt q;
};

struct AddKeypair {
  AddPublicKey pk;
  AddSecretKey sk;
};

struct MulPublicKey {
  BigInt n;
  BigInt g;
  BigInt h;
};

struct MulSecretKey {
  BigInt n;
  BigInt g;
  BigInt x0;
  BigInt x1;

  BigInt x() const { return x0 * x1; }
};

struct MulKeypair {
  MulPublicKey pk;
  MulSecretKey sk;
};

// What one server holds. The additive share is always absent: nobody but the
// key owner can open a Paillier ciphertext.
struct RoleShare {
  std::optional<BigInt> add;
  BigInt mul;
};

struct KeyShares {
  RoleShare proxy;   // k0 = x0
  RoleShare server;  // k1 = x1
};

struct KeyMaterial {
  AddKeypair add;
  MulKeypair mul;
  KeyShares shares;
};

KeyMaterial keygen(const KeyGenParams& params);
KeyMaterial keygen(std::size_t security_bits, Rng& rng);
// Fixed primes, random shares. Used for the exhaustive small-modulus tier.
KeyMaterial keygen_from_primes(const BigInt& p, const BigInt& q, Rng& rng);
KeyMaterial keygen_from_parts(const BigInt& p, const BigInt& q, const BigInt& x0,
                              const BigInt& x1);

// Throws kKeyIntegrity on any violated invariant.
void validate_keys(const KeyMaterial& keys);

namespace detail {
struct Trusted {};
}  // namespace detail

class AddCiphertext {
 public:
  // Validates 0 <= value < N^2 and gcd(value, N^2) = 1.
  AddCiphertext(const AddPublicKey& pk, BigInt value);
  AddCiphertext(detail::Trusted, ModulusTag tag, BigInt value)
      : value_(std::move(value)), tag_(tag) {}

  const BigInt& value() const { return value_; }
  ModulusTag modulus_tag() const { return tag_; }

  bool operator==(const AddCiphertext&) const = default;

 private:
  BigInt value_;
  ModulusTag tag_;
};

class MulCiphertext {
 public:
  // Validates c1, c2 in [1, N).
  MulCiphertext(const MulPublicKey& pk, BigInt c1, BigInt c2);
  MulCiphertext(detail::Trusted, BigInt c1, BigInt c2) : c1_(std::move(c1)), c2_(std::move(c2)) {}

  const BigInt& c1() const { return c1_; }
  const BigInt& c2() const { return c2_; }

  bool operator==(const MulCiphertext&) const = default;

 private:
  BigInt c1_;
  BigInt c2_;
};

// ---- additive scheme --------------------------------------------------------

AddCiphertext enc_add(const AddPublicKey& pk, const BigInt& m, Rng& rng);
// (1+N)^m * r^N mod N^2 with caller-chosen r; r = 1 gives the public encoding.
AddCiphertext enc_add_with_randomness(const AddPublicKey& pk, const BigInt& m, const BigInt& r);
// L(c^phi mod N^2) * phi^-1 mod N, evaluated literally.
BigInt dec_add(const AddSecretKey& sk, const AddCiphertext& c);

// CRT decryption over p^2 and q^2; output identical to dec_add.
class AddDecryptor {
 public:
  explicit AddDecryptor(const AddSecretKey& sk);
  BigInt operator()(const AddCiphertext& c) const;

 private:
  BigInt n_, p_, q_, p_sq_, q_sq_, hp_, hq_, q_inv_p_;
  ModulusTag tag_;
};

AddCiphertext add_homomorphic(const AddPublicKey& pk, const AddCiphertext& a,
                              const AddCiphertext& b);
AddCiphertext scalar_mul_add(const AddPublicKey& pk, const AddCiphertext& c, const BigInt& k);
AddCiphertext sub_homomorphic(const AddPublicKey& pk, const AddCiphertext& a,
                              const AddCiphertext& b);

// ---- multiplicative scheme --------------------------------------------------

// m must lie in [1, N). m = 0 throws kZeroPlaintext; encode zero with
// pair_encode instead.
MulCiphertext enc_mul(const MulPublicKey& pk, const BigInt& m, Rng& rng);
MulCiphertext enc_mul_with_randomness(const MulPublicKey& pk, const BigInt& m, const BigInt& r);
BigInt dec_mul(const MulSecretKey& sk, const MulCiphertext& c);

// Throws kZeroPlaintext if the product plaintext collapses to 0 mod N, which
// can only happen when a factor is a non-unit.
MulCiphertext mul_homomorphic(const MulPublicKey& pk, const MulCiphertext& a,
                              const MulCiphertext& b);
MulCiphertext scalar_mul_mul(const MulPublicKey& pk, const MulCiphertext& c, const BigInt& k);

}  // namespace sherec

#endif  // SHEREC_SHE_CORE_HPP_
