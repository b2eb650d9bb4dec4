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

#include "sherec/she_core.hpp"

#include "sherec/error.hpp"

namespace sherec {
namespace {

void require_tag(const AddPublicKey& pk, ModulusTag tag) {
  if (tag != pk.tag()) throw Error(ErrorCode::kDomain, "ciphertext was produced under a different modulus");
}

void require_residue(const BigInt& m, const BigInt& n, const char* what) {
  if (m < 0 || m >= n) throw Error(ErrorCode::kDomain, std::string(what) + " outside [0, N)");
}

BigInt random_prime(std::size_t bits, Rng& rng) {
  const std::size_t attempts = 64 * bits + 1024;
  for (std::size_t i = 0; i < attempts; ++i) {
    BigInt candidate = rng.exact_bits(bits);
    mpz_setbit(candidate.get_mpz_t(), 0);
    if (mpz_probab_prime_p(candidate.get_mpz_t(), kPrimalityRounds) > 0) return candidate;
  }
  throw Error(ErrorCode::kGeneration, "no prime found after " + std::to_string(attempts) + " candidates");
}

// Odd, bit length floor(|N|/2) - 1, a unit mod N.
BigInt random_share(const BigInt& n, Rng& rng) {
  std::size_t bits = bit_length(n) / 2 - 1;
  if (bits < 2) throw Error(ErrorCode::kGeneration, "modulus too small for key shares");
  for (;;) {
    BigInt x = rng.exact_bits(bits);
    mpz_setbit(x.get_mpz_t(), 0);
    if (is_unit(x, n)) return x;
  }
}

}  // namespace

ModulusTag modulus_tag(const BigInt& n) {
  std::uint64_t low = mpz_size(n.get_mpz_t()) > 0 ? mpz_getlimbn(n.get_mpz_t(), 0) : 0;
  return low ^ (static_cast<std::uint64_t>(bit_length(n)) << 52);
}

AddPublicKey AddPublicKey::from_modulus(const BigInt& n) {
  if (n < 15) throw Error(ErrorCode::kKeyIntegrity, "modulus too small");
  return AddPublicKey{n, n * n};
}

KeyMaterial keygen_from_parts(const BigInt& p, const BigInt& q, const BigInt& x0,
                              const BigInt& x1) {
  KeyMaterial keys;
  BigInt n = p * q;
  keys.add.pk = AddPublicKey::from_modulus(n);
  keys.add.sk = AddSecretKey{n, (p - 1) * (q - 1), p, q};
  BigInt g = kGenerator;
  keys.mul.pk = MulPublicKey{n, g, powm(g, x0 * x1, n)};
  keys.mul.sk = MulSecretKey{n, g, x0, x1};
  keys.shares.proxy = RoleShare{std::nullopt, x0};
  keys.shares.server = RoleShare{std::nullopt, x1};
  validate_keys(keys);
  return keys;
}

KeyMaterial keygen_from_primes(const BigInt& p, const BigInt& q, Rng& rng) {
  BigInt n = p * q;
  BigInt x0 = random_share(n, rng);
  BigInt x1 = random_share(n, rng);
  return keygen_from_parts(p, q, x0, x1);
}

KeyMaterial keygen(std::size_t security_bits, Rng& rng) {
  if (security_bits < kMinSecurityBits || security_bits > kMaxSecurityBits) {
    throw Error(ErrorCode::kDomain, "security_bits must lie in [" + std::to_string(kMinSecurityBits) +
                                        ", " + std::to_string(kMaxSecurityBits) + "]");
  }
  for (int attempt = 0; attempt < 64; ++attempt) {
    BigInt p = random_prime(security_bits, rng);
    BigInt q = random_prime(security_bits, rng);
    if (p == q) continue;
    BigInt n = p * q;
    BigInt phi = (p - 1) * (q - 1);
    if (!is_unit(n, phi) || !is_unit(BigInt(kGenerator), n)) continue;
    return keygen_from_primes(p, q, rng);
  }
  throw Error(ErrorCode::kGeneration, "could not find a valid prime pair");
}

KeyMaterial keygen(const KeyGenParams& params) {
  Rng rng = params.rng_seed ? Rng::from_seed(*params.rng_seed) : Rng::from_entropy();
  return keygen(params.security_bits, rng);
}

void validate_keys(const KeyMaterial& keys) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kKeyIntegrity, what); };
  const AddSecretKey& sk = keys.add.sk;
  if (sk.p == sk.q) fail("p == q");
  if (mpz_probab_prime_p(sk.p.get_mpz_t(), kPrimalityRounds) == 0 ||
      mpz_probab_prime_p(sk.q.get_mpz_t(), kPrimalityRounds) == 0) {
    fail("p or q is not prime");
  }
  BigInt n = sk.p * sk.q;
  if (sk.n != n || keys.add.pk.n != n || keys.mul.pk.n != n || keys.mul.sk.n != n) {
    fail("keys do not share N = p*q");
  }
  if (keys.add.pk.n_squared != n * n) fail("cached N^2 is wrong");
  if (sk.phi != (sk.p - 1) * (sk.q - 1)) fail("phi(N) != (p-1)(q-1)");
  if (!is_unit(n, sk.phi)) fail("gcd(N, phi(N)) != 1");
  const MulSecretKey& msk = keys.mul.sk;
  if (keys.mul.pk.g != kGenerator || msk.g != kGenerator) fail("g must be 16");
  if (!is_unit(msk.g, n)) fail("g is not a unit mod N");
  std::size_t half = bit_length(n) / 2;
  for (const BigInt* x : {&msk.x0, &msk.x1}) {
    if (mpz_even_p(x->get_mpz_t())) fail("key share is even");
    if (bit_length(*x) >= half) fail("key share is not shorter than |N|/2");
  }
  if (keys.mul.pk.h != powm(msk.g, msk.x(), n)) fail("h != g^(x0*x1) mod N");
  if (keys.shares.proxy.add || keys.shares.server.add) fail("additive key shares must be absent");
  if (keys.shares.proxy.mul != msk.x0 || keys.shares.server.mul != msk.x1) {
    fail("multiplicative shares do not match (x0, x1)");
  }
}

AddCiphertext::AddCiphertext(const AddPublicKey& pk, BigInt value)
    : value_(std::move(value)), tag_(pk.tag()) {
  if (value_ < 0 || value_ >= pk.n_squared) {
    throw Error(ErrorCode::kDomain, "Paillier ciphertext outside [0, N^2)");
  }
  if (!is_unit(value_, pk.n)) {
    throw Error(ErrorCode::kDegenerateCiphertext, "Paillier ciphertext is not a unit mod N^2");
  }
}

MulCiphertext::MulCiphertext(const MulPublicKey& pk, BigInt c1, BigInt c2)
    : c1_(std::move(c1)), c2_(std::move(c2)) {
  if (c1_ <= 0 || c1_ >= pk.n || c2_ <= 0 || c2_ >= pk.n) {
    throw Error(ErrorCode::kDegenerateCiphertext, "ElGamal component outside [1, N)");
  }
}

AddCiphertext enc_add_with_randomness(const AddPublicKey& pk, const BigInt& m, const BigInt& r) {
  require_residue(m, pk.n, "plaintext");
  if (r <= 0 || r >= pk.n || !is_unit(r, pk.n)) {
    throw Error(ErrorCode::kDomain, "randomness must lie in Z*_N");
  }
  // (1+N)^m = 1 + mN mod N^2
  BigInt c = mod_floor(1 + m * pk.n, pk.n_squared);
  c = mod_floor(c * powm(r, pk.n, pk.n_squared), pk.n_squared);
  return AddCiphertext(detail::Trusted{}, pk.tag(), std::move(c));
}

AddCiphertext enc_add(const AddPublicKey& pk, const BigInt& m, Rng& rng) {
  require_residue(m, pk.n, "plaintext");
  return enc_add_with_randomness(pk, m, rng.unit_mod(pk.n));
}

BigInt dec_add(const AddSecretKey& sk, const AddCiphertext& c) {
  BigInt n_sq = sk.n * sk.n;
  if (c.modulus_tag() != modulus_tag(sk.n)) {
    throw Error(ErrorCode::kDomain, "ciphertext was produced under a different modulus");
  }
  BigInt phi_inv;
  if (mpz_invert(phi_inv.get_mpz_t(), sk.phi.get_mpz_t(), sk.n.get_mpz_t()) == 0) {
    throw Error(ErrorCode::kKeyIntegrity, "phi(N) has no inverse mod N");
  }
  BigInt u = powm(c.value(), sk.phi, n_sq);
  BigInt l = (u - 1) / sk.n;
  return mod_floor(l * phi_inv, sk.n);
}

AddDecryptor::AddDecryptor(const AddSecretKey& sk)
    : n_(sk.n), p_(sk.p), q_(sk.q), p_sq_(sk.p * sk.p), q_sq_(sk.q * sk.q), tag_(modulus_tag(sk.n)) {
  // h_p = L_p((1+N)^(p-1) mod p^2)^-1 mod p
  auto h = [this](const BigInt& prime, const BigInt& prime_sq) {
    BigInt u = powm(n_ + 1, prime - 1, prime_sq);
    BigInt l = (u - 1) / prime;
    BigInt inv;
    if (mpz_invert(inv.get_mpz_t(), l.get_mpz_t(), prime.get_mpz_t()) == 0) {
      throw Error(ErrorCode::kKeyIntegrity, "CRT decryption constant is not invertible");
    }
    return inv;
  };
  hp_ = h(p_, p_sq_);
  hq_ = h(q_, q_sq_);
  q_inv_p_ = invert(q_, p_);
}

BigInt AddDecryptor::operator()(const AddCiphertext& c) const {
  if (c.modulus_tag() != tag_) {
    throw Error(ErrorCode::kDomain, "ciphertext was produced under a different modulus");
  }
  BigInt up = powm(c.value(), p_ - 1, p_sq_);
  BigInt mp = mod_floor(((up - 1) / p_) * hp_, p_);
  BigInt uq = powm(c.value(), q_ - 1, q_sq_);
  BigInt mq = mod_floor(((uq - 1) / q_) * hq_, q_);
  BigInt t = mod_floor((mp - mq) * q_inv_p_, p_);
  return mq + t * q_;
}

AddCiphertext add_homomorphic(const AddPublicKey& pk, const AddCiphertext& a,
                              const AddCiphertext& b) {
  require_tag(pk, a.modulus_tag());
  require_tag(pk, b.modulus_tag());
  return AddCiphertext(detail::Trusted{}, pk.tag(), mod_floor(a.value() * b.value(), pk.n_squared));
}

AddCiphertext scalar_mul_add(const AddPublicKey& pk, const AddCiphertext& c, const BigInt& k) {
  require_tag(pk, c.modulus_tag());
  require_residue(k, pk.n, "scalar");
  return AddCiphertext(detail::Trusted{}, pk.tag(), powm(c.value(), k, pk.n_squared));
}

AddCiphertext sub_homomorphic(const AddPublicKey& pk, const AddCiphertext& a,
                              const AddCiphertext& b) {
  require_tag(pk, a.modulus_tag());
  require_tag(pk, b.modulus_tag());
  BigInt inv = invert(b.value(), pk.n_squared);
  return AddCiphertext(detail::Trusted{}, pk.tag(), mod_floor(a.value() * inv, pk.n_squared));
}

MulCiphertext enc_mul_with_randomness(const MulPublicKey& pk, const BigInt& m, const BigInt& r) {
  if (m == 0) throw Error(ErrorCode::kZeroPlaintext, "ElGamal cannot hide 0; use pair_encode");
  require_residue(m, pk.n, "plaintext");
  if (r <= 0) throw Error(ErrorCode::kDomain, "randomness must be positive");
  BigInt c1 = mod_floor(m * powm(pk.h, r, pk.n), pk.n);
  if (c1 == 0) throw Error(ErrorCode::kZeroPlaintext, "plaintext collapsed to 0 mod N");
  return MulCiphertext(detail::Trusted{}, std::move(c1), powm(pk.g, r, pk.n));
}

MulCiphertext enc_mul(const MulPublicKey& pk, const BigInt& m, Rng& rng) {
  if (m == 0) throw Error(ErrorCode::kZeroPlaintext, "ElGamal cannot hide 0; use pair_encode");
  require_residue(m, pk.n, "plaintext");
  return enc_mul_with_randomness(pk, m, rng.unit_mod(pk.n));
}

BigInt dec_mul(const MulSecretKey& sk, const MulCiphertext& c) {
  BigInt mask = powm(c.c2(), sk.x(), sk.n);
  return mod_floor(c.c1() * invert(mask, sk.n), sk.n);
}

MulCiphertext mul_homomorphic(const MulPublicKey& pk, const MulCiphertext& a,
                              const MulCiphertext& b) {
  BigInt c1 = mod_floor(a.c1() * b.c1(), pk.n);
  if (c1 == 0) throw Error(ErrorCode::kZeroPlaintext, "product plaintext is 0 mod N");
  return MulCiphertext(detail::Trusted{}, std::move(c1), mod_floor(a.c2() * b.c2(), pk.n));
}

MulCiphertext scalar_mul_mul(const MulPublicKey& pk, const MulCiphertext& c, const BigInt& k) {
  if (k == 0) throw Error(ErrorCode::kZeroPlaintext, "scalar 0 would expose a zero component");
  require_residue(k, pk.n, "scalar");
  BigInt c1 = mod_floor(c.c1() * k, pk.n);
  if (c1 == 0) throw Error(ErrorCode::kZeroPlaintext, "product plaintext is 0 mod N");
  return MulCiphertext(detail::Trusted{}, std::move(c1), c.c2());
}

}  // namespace sherec
