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

#include <gtest/gtest.h>

#include "oracles/plain_oracles.hpp"
#include "test_keys.hpp"

namespace sherec {
namespace {

namespace o = sherec_oracle;
using testing::full_keys;
using testing::small_keys;
using testing::tiny_keys;
using testing::u;

void expect_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

// ---- keys -------------------------------------------------------------------

TEST(Keygen, SixteenBitInvariants) {
  const KeyMaterial& k = small_keys();
  EXPECT_EQ(bit_length(k.add.sk.p), 16u);
  EXPECT_EQ(bit_length(k.add.sk.q), 16u);
  EXPECT_NE(k.add.sk.p, k.add.sk.q);
  EXPECT_EQ(k.add.pk.n, k.add.sk.p * k.add.sk.q);
  EXPECT_EQ(k.add.sk.phi, (k.add.sk.p - 1) * (k.add.sk.q - 1));
  EXPECT_EQ(k.mul.pk.n, k.add.pk.n);
  EXPECT_EQ(k.mul.pk.g, 16);
  const o::u64 n = u(k.add.pk.n);
  EXPECT_EQ(u(k.mul.pk.h), o::powmod(16, u(k.mul.sk.x0) * u(k.mul.sk.x1), n));
  EXPECT_EQ(k.shares.proxy.mul * k.shares.server.mul, k.mul.sk.x());
  EXPECT_FALSE(k.shares.proxy.add.has_value());
  EXPECT_FALSE(k.shares.server.add.has_value());
  for (const BigInt& x : {k.mul.sk.x0, k.mul.sk.x1}) {
    EXPECT_EQ(x % 2, 1);
    EXPECT_LT(2 * bit_length(x), bit_length(k.add.pk.n));
  }
  validate_keys(k);
}

TEST(Keygen, DefaultSizeGivesThousandBitModulus) {
  const KeyMaterial& k = full_keys();
  std::size_t bits = bit_length(k.add.pk.n);
  EXPECT_TRUE(bits == 1023 || bits == 1024) << bits;
}

TEST(Keygen, SeededRunsRepeat) {
  KeyMaterial a = keygen(KeyGenParams{24, 77});
  KeyMaterial b = keygen(KeyGenParams{24, 77});
  EXPECT_EQ(a.add.sk.p, b.add.sk.p);
  EXPECT_EQ(a.add.sk.q, b.add.sk.q);
  EXPECT_EQ(a.mul.sk.x0, b.mul.sk.x0);
  EXPECT_EQ(a.mul.sk.x1, b.mul.sk.x1);
  KeyMaterial c = keygen(KeyGenParams{24, 78});
  EXPECT_NE(a.add.pk.n, c.add.pk.n);
}

TEST(Keygen, RejectsOutOfRangeSizes) {
  expect_code(ErrorCode::kDomain, [] { keygen(KeyGenParams{8, 1}); });
  expect_code(ErrorCode::kDomain, [] { keygen(KeyGenParams{kMaxSecurityBits + 1, 1}); });
}

TEST(Keygen, IntegrityCheckCatchesTampering) {
  KeyMaterial k = small_keys();
  k.mul.pk.h += 1;
  expect_code(ErrorCode::kKeyIntegrity, [&] { validate_keys(k); });
  KeyMaterial k2 = small_keys();
  k2.shares.server.mul += 2;
  expect_code(ErrorCode::kKeyIntegrity, [&] { validate_keys(k2); });
}

// ---- additive scheme --------------------------------------------------------

TEST(Paillier, ExhaustiveRoundtripTinyModulus) {
  const KeyMaterial& k = tiny_keys();
  AddDecryptor crt(k.add.sk);
  Rng rng = Rng::from_seed(1);
  for (o::u64 m = 0; m < 143; ++m) {
    AddCiphertext c = enc_add(k.add.pk, BigInt(m), rng);
    ASSERT_EQ(o::paillier_decrypt(u(c.value()), 11, 13), m);
    ASSERT_EQ(dec_add(k.add.sk, c), m);
    ASSERT_EQ(crt(c), m);
  }
}

TEST(Paillier, PublicRandomnessIsExactFormula) {
  const KeyMaterial& k = tiny_keys();
  for (o::u64 m = 0; m < 143; ++m) {
    AddCiphertext c = enc_add_with_randomness(k.add.pk, BigInt(m), BigInt(1));
    ASSERT_EQ(u(c.value()), o::powmod(144, m, 143 * 143));
  }
  // And with arbitrary r against the oracle encryption.
  AddCiphertext c = enc_add_with_randomness(k.add.pk, BigInt(57), BigInt(12));
  EXPECT_EQ(u(c.value()), o::paillier_encrypt(57, 12, 143));
}

TEST(Paillier, DomainChecks) {
  const KeyMaterial& k = tiny_keys();
  Rng rng = Rng::from_seed(2);
  expect_code(ErrorCode::kDomain, [&] { enc_add(k.add.pk, BigInt(143), rng); });
  expect_code(ErrorCode::kDomain, [&] { enc_add(k.add.pk, BigInt(-1), rng); });
  expect_code(ErrorCode::kDomain, [&] { AddCiphertext(k.add.pk, BigInt(143 * 143)); });
  expect_code(ErrorCode::kDegenerateCiphertext, [&] { AddCiphertext(k.add.pk, BigInt(11)); });
  AddCiphertext foreign = enc_add(small_keys().add.pk, BigInt(1), rng);
  expect_code(ErrorCode::kDomain, [&] { dec_add(k.add.sk, foreign); });
  expect_code(ErrorCode::kDomain,
              [&] { add_homomorphic(k.add.pk, foreign, enc_add(k.add.pk, BigInt(1), rng)); });
}

TEST(Paillier, ListedExamples) {
  const KeyMaterial& k = tiny_keys();
  Rng rng = Rng::from_seed(3);
  auto E = [&](long m) { return enc_add(k.add.pk, BigInt(m), rng); };
  auto D = [&](const AddCiphertext& c) { return u(dec_add(k.add.sk, c)); };
  EXPECT_EQ(D(add_homomorphic(k.add.pk, E(100), E(100))), 57u);
  EXPECT_EQ(D(add_homomorphic(k.add.pk, E(0), E(42))), 42u);
  EXPECT_EQ(D(scalar_mul_add(k.add.pk, E(10), BigInt(15))), 7u);
  EXPECT_EQ(D(scalar_mul_add(k.add.pk, E(10), BigInt(1))), 10u);
  EXPECT_EQ(D(scalar_mul_add(k.add.pk, E(10), BigInt(0))), 0u);
  EXPECT_EQ(D(sub_homomorphic(k.add.pk, E(5), E(10))), 138u);
  AddCiphertext c = E(77);
  EXPECT_EQ(D(sub_homomorphic(k.add.pk, c, c)), 0u);
}

TEST(Paillier, HomomorphismsExhaustiveTinyModulus) {
  const KeyMaterial& k = tiny_keys();
  Rng rng = Rng::from_seed(4);
  std::vector<AddCiphertext> cts;
  for (int m = 0; m < 143; ++m) cts.push_back(enc_add(k.add.pk, BigInt(m), rng));
  for (o::u64 a = 0; a < 143; ++a) {
    for (o::u64 b = 0; b < 143; ++b) {
      AddCiphertext sum = add_homomorphic(k.add.pk, cts[a], cts[b]);
      ASSERT_EQ(o::paillier_decrypt(u(sum.value()), 11, 13), (a + b) % 143);
      AddCiphertext diff = sub_homomorphic(k.add.pk, cts[a], cts[b]);
      ASSERT_EQ(o::paillier_decrypt(u(diff.value()), 11, 13), (a + 143 - b) % 143);
      AddCiphertext scaled = scalar_mul_add(k.add.pk, cts[a], BigInt(b));
      ASSERT_EQ(o::paillier_decrypt(u(scaled.value()), 11, 13), a * b % 143);
    }
  }
}

TEST(Paillier, RandomPairsFullSize) {
  const KeyMaterial& k = full_keys();
  AddDecryptor crt(k.add.sk);
  Rng rng = Rng::from_seed(5);
  const BigInt& n = k.add.pk.n;
  for (int i = 0; i < 10; ++i) {
    BigInt a = rng.below(n), b = rng.below(n);
    AddCiphertext ca = enc_add(k.add.pk, a, rng), cb = enc_add(k.add.pk, b, rng);
    EXPECT_EQ(dec_add(k.add.sk, ca), a);
    EXPECT_EQ(crt(add_homomorphic(k.add.pk, ca, cb)), mod_floor(a + b, n));
    EXPECT_EQ(crt(sub_homomorphic(k.add.pk, ca, cb)), mod_floor(a - b, n));
    EXPECT_EQ(dec_add(k.add.sk, scalar_mul_add(k.add.pk, ca, b)), mod_floor(a * b, n));
  }
}

TEST(Paillier, CrtMatchesLiteralFormula) {
  for (const KeyMaterial* k : {&small_keys(), &full_keys()}) {
    AddDecryptor crt(k->add.sk);
    Rng rng = Rng::from_seed(6);
    for (int i = 0; i < 50; ++i) {
      AddCiphertext c(k->add.pk, rng.unit_mod(k->add.pk.n_squared));
      ASSERT_EQ(crt(c), dec_add(k->add.sk, c));
    }
  }
}

TEST(Paillier, FreshRandomnessDiffers) {
  const KeyMaterial& k = full_keys();
  Rng rng = Rng::from_seed(7);
  std::set<std::string> seen;
  for (int i = 0; i < 100; ++i) seen.insert(to_hex(enc_add(k.add.pk, BigInt(42), rng).value()));
  EXPECT_EQ(seen.size(), 100u);
}

// ---- multiplicative scheme --------------------------------------------------

TEST(ElGamal, ExhaustiveRoundtripTinyModulus) {
  const KeyMaterial& k = tiny_keys();
  const o::u64 x = u(k.mul.sk.x());
  Rng rng = Rng::from_seed(8);
  for (o::u64 m = 1; m < 143; ++m) {
    MulCiphertext c = enc_mul(k.mul.pk, BigInt(m), rng);
    ASSERT_GE(c.c1(), 1);
    ASSERT_LT(c.c1(), 143);
    ASSERT_EQ(o::elgamal_decrypt(u(c.c1()), u(c.c2()), x, 143), m);
    ASSERT_EQ(dec_mul(k.mul.sk, c), m);
  }
}

TEST(ElGamal, ZeroAndRangeRejected) {
  const KeyMaterial& k = tiny_keys();
  Rng rng = Rng::from_seed(9);
  expect_code(ErrorCode::kZeroPlaintext, [&] { enc_mul(k.mul.pk, BigInt(0), rng); });
  expect_code(ErrorCode::kDomain, [&] { enc_mul(k.mul.pk, BigInt(143), rng); });
  expect_code(ErrorCode::kDomain, [&] { enc_mul(k.mul.pk, BigInt(-3), rng); });
  expect_code(ErrorCode::kDegenerateCiphertext, [&] { MulCiphertext(k.mul.pk, BigInt(0), BigInt(5)); });
  expect_code(ErrorCode::kDegenerateCiphertext, [&] { MulCiphertext(k.mul.pk, BigInt(5), BigInt(143)); });
}

TEST(ElGamal, ListedExamples) {
  const KeyMaterial& k = tiny_keys();
  Rng rng = Rng::from_seed(10);
  auto E = [&](long m) { return enc_mul(k.mul.pk, BigInt(m), rng); };
  auto D = [&](const MulCiphertext& c) { return u(dec_mul(k.mul.sk, c)); };
  EXPECT_EQ(D(E(1)), 1u);
  EXPECT_EQ(D(mul_homomorphic(k.mul.pk, E(10), E(20))), 57u);
  EXPECT_EQ(D(mul_homomorphic(k.mul.pk, E(1), E(99))), 99u);
  EXPECT_EQ(D(scalar_mul_mul(k.mul.pk, E(10), BigInt(2))), 20u);
  EXPECT_EQ(D(scalar_mul_mul(k.mul.pk, E(10), BigInt(1))), 10u);
  expect_code(ErrorCode::kZeroPlaintext, [&] { mul_homomorphic(k.mul.pk, E(11), E(13)); });
}

TEST(ElGamal, HomomorphismsExhaustiveTinyModulus) {
  const KeyMaterial& k = tiny_keys();
  const o::u64 x = u(k.mul.sk.x());
  Rng rng = Rng::from_seed(11);
  std::vector<MulCiphertext> cts;
  for (int m = 1; m < 143; ++m) cts.push_back(enc_mul(k.mul.pk, BigInt(m), rng));
  for (o::u64 a = 1; a < 143; ++a) {
    for (o::u64 b = 1; b < 143; ++b) {
      const o::u64 want = a * b % 143;
      if (want == 0) {
        ASSERT_THROW(mul_homomorphic(k.mul.pk, cts[a - 1], cts[b - 1]), Error);
        ASSERT_THROW(scalar_mul_mul(k.mul.pk, cts[a - 1], BigInt(b)), Error);
        continue;
      }
      MulCiphertext p = mul_homomorphic(k.mul.pk, cts[a - 1], cts[b - 1]);
      ASSERT_EQ(o::elgamal_decrypt(u(p.c1()), u(p.c2()), x, 143), want);
      MulCiphertext s = scalar_mul_mul(k.mul.pk, cts[a - 1], BigInt(b));
      ASSERT_EQ(o::elgamal_decrypt(u(s.c1()), u(s.c2()), x, 143), want);
    }
  }
}

TEST(ElGamal, RandomPairsFullSize) {
  const KeyMaterial& k = full_keys();
  Rng rng = Rng::from_seed(12);
  const BigInt& n = k.mul.pk.n;
  for (int i = 0; i < 10; ++i) {
    BigInt a = rng.unit_mod(n), b = rng.unit_mod(n);
    MulCiphertext ca = enc_mul(k.mul.pk, a, rng), cb = enc_mul(k.mul.pk, b, rng);
    EXPECT_EQ(dec_mul(k.mul.sk, ca), a);
    EXPECT_EQ(dec_mul(k.mul.sk, mul_homomorphic(k.mul.pk, ca, cb)), mod_floor(a * b, n));
    EXPECT_EQ(dec_mul(k.mul.sk, scalar_mul_mul(k.mul.pk, ca, b)), mod_floor(a * b, n));
  }
}

TEST(ElGamal, FreshRandomnessDiffers) {
  const KeyMaterial& k = full_keys();
  Rng rng = Rng::from_seed(13);
  std::set<std::string> seen;
  for (int i = 0; i < 100; ++i) seen.insert(to_hex(enc_mul(k.mul.pk, BigInt(42), rng).c1()));
  EXPECT_EQ(seen.size(), 100u);
}

}  // namespace
}  // namespace sherec
