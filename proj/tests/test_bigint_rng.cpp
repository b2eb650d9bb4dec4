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

#include <set>

#include "oracles/plain_oracles.hpp"
#include "sherec/rng.hpp"
#include "test_keys.hpp"

namespace sherec {
namespace {

using testing::u;

TEST(BigIntHex, CanonicalForm) {
  EXPECT_EQ(to_hex(BigInt(0)), "0");
  EXPECT_EQ(to_hex(BigInt(255)), "ff");
  EXPECT_EQ(from_hex("1f"), BigInt(31));
  EXPECT_EQ(from_hex("0"), BigInt(0));
  for (const char* bad : {"", "01", "FF", "-1", "0x1", "1g", " 1"}) {
    EXPECT_THROW(from_hex(bad), Error) << bad;
  }
  EXPECT_THROW(to_hex(BigInt(-1)), Error);
  BigInt big("123456789012345678901234567890");
  EXPECT_EQ(from_hex(to_hex(big)), big);
}

TEST(BigIntHelpers, InvertAndUnits) {
  EXPECT_EQ(invert(BigInt(3), BigInt(143)), BigInt(sherec_oracle::brute_inverse(3, 143)));
  EXPECT_THROW(invert(BigInt(11), BigInt(143)), Error);
  EXPECT_TRUE(is_unit(BigInt(12), BigInt(143)));
  EXPECT_FALSE(is_unit(BigInt(26), BigInt(143)));
  EXPECT_EQ(mod_floor(BigInt(-5), BigInt(143)), BigInt(138));
}

TEST(Rng, SeededStreamsRepeat) {
  Rng a = Rng::from_seed(9);
  Rng b = Rng::from_seed(9);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  Rng c = Rng::from_seed(10);
  EXPECT_NE(Rng::from_seed(9).next_u64(), c.next_u64());
}

TEST(Rng, ForksAreIndependentOfParentPosition) {
  Rng a = Rng::from_seed(3);
  Rng b = Rng::from_seed(3);
  b.next_u64();
  EXPECT_EQ(a.fork(5).next_u64(), b.fork(5).next_u64());
  EXPECT_NE(a.fork(5).next_u64(), a.fork(6).next_u64());
}

TEST(Rng, RangesHold) {
  Rng rng = Rng::from_seed(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    BigInt v = rng.below(BigInt(10));
    ASSERT_GE(v, 0);
    ASSERT_LT(v, 10);
    seen.insert(u(v));
    ASSERT_EQ(bit_length(rng.exact_bits(37)), 37u);
    BigInt w = rng.unit_mod(BigInt(143));
    ASSERT_TRUE(w >= 1 && w < 143 && is_unit(w, BigInt(143)));
  }
  EXPECT_EQ(seen.size(), 10u);
}

}  // namespace
}  // namespace sherec
