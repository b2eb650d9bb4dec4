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

#ifndef SHEREC_RECOMMENDER_HPP_
#define SHEREC_RECOMMENDER_HPP_

// Item-based collaborative filtering on a co-occurrence matrix, in the clear
// and over ciphertexts. Item i is the POI at Hilbert index i.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sherec/she_switch.hpp"

namespace sherec {

inline constexpr std::uint32_t kDefaultMaxRating = 15;
inline constexpr std::int64_t kDefaultRadius = 1;

using ItemSet = std::set<std::uint64_t>;
// user id -> items the user visited
using InversionList = std::map<std::string, ItemSet>;

class CoMatrix {
 public:
  CoMatrix() = default;
  explicit CoMatrix(std::size_t size) : size_(size), w_(size * size, 0) {}
  CoMatrix(std::size_t size, std::vector<std::uint64_t> row_major);

  std::size_t size() const { return size_; }
  std::uint64_t& at(std::size_t i, std::size_t j) { return w_[i * size_ + j]; }
  std::uint64_t at(std::size_t i, std::size_t j) const { return w_[i * size_ + j]; }
  std::span<const std::uint64_t> entries() const { return w_; }
  std::uint64_t max_entry() const;
  bool symmetric() const;

  bool operator==(const CoMatrix&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> w_;
};

using PreferenceVector = std::vector<std::uint32_t>;
using PlainScores = std::vector<std::uint64_t>;

// Throws kDomain for an item index >= size.
CoMatrix build_cm(const InversionList& lists, std::size_t size);

// RL[i] = sum_j CM[i][j] * PV[j], over all items j.
PlainScores predict_plain(const CoMatrix& cm, const PreferenceVector& pv);

// Throws kDomain unless size * r_max * cm_max < N, i.e. decrypted scores can
// never wrap around the modulus.
void check_score_bound(std::size_t size, std::uint32_t r_max, std::uint64_t cm_max,
                       const BigInt& n);

// Row-major size x size matrix of pair-encoded entries.
struct EncryptedCoMatrix {
  std::size_t size = 0;
  std::vector<PairEncodedValue> entries;

  const PairEncodedValue& at(std::size_t i, std::size_t j) const { return entries[i * size + j]; }
};

// Encrypted recommendation scores, row by row. The wrap randomness for cell
// (i, j) comes from rng.fork(i * size + j) and each row goes through ctx as
// one batch of 4 * size exchanges, so the serial reference and the parallel
// kernel produce identical ciphertexts for identical inputs.
std::vector<AddCiphertext> recommend_encrypted(const AddPublicKey& pk_add,
                                               const MulPublicKey& pk_mul,
                                               const EncryptedCoMatrix& cm,
                                               std::span<const PairEncodedValue> pv,
                                               SwitchContext& ctx, const Rng& rng);

// Element-at-a-time reference with the loop structure of the textbook
// algorithm: one pair_product_to_add per (i, j), accumulated in order.
std::vector<AddCiphertext> recommend_encrypted_serial(const AddPublicKey& pk_add,
                                                      const MulPublicKey& pk_mul,
                                                      const EncryptedCoMatrix& cm,
                                                      std::span<const PairEncodedValue> pv,
                                                      SwitchContext& ctx, const Rng& rng);

struct LocatedScore {
  std::size_t item = 0;
  AddCiphertext score;
  AddCiphertext offset;  // E+((item - loc) mod N)
};

// Server side of location filtering: attaches E+(i - loc) to every entry.
// E+(i) uses the public encoding (randomness 1).
std::vector<LocatedScore> filter_by_location(std::span<const AddCiphertext> rl,
                                             const AddCiphertext& loc, const AddPublicKey& pk_add);

struct Recommendation {
  std::size_t item = 0;
  std::uint64_t score = 0;
  std::int64_t offset = 0;

  bool operator==(const Recommendation&) const = default;
};

// v in [0, N) read as a signed residue in (-N/2, N/2].
BigInt signed_residue(const BigInt& v, const BigInt& n);

// Client side: decrypts, keeps entries with |offset| <= radius. A radius of 0
// keeps only exact matches. radius >= number of entries keeps everything.
std::vector<Recommendation> client_filter(std::span<const LocatedScore> located,
                                          const AddDecryptor& dec, const BigInt& n,
                                          std::int64_t radius, Exec exec = Exec::kParallel);

// Same rule on plaintext scores; the oracle for client_filter.
std::vector<Recommendation> plain_filter(const PlainScores& scores, std::uint64_t loc,
                                         std::int64_t radius);

// Entrywise new - old. Entries from added visits are nonnegative.
struct CoMatrixDelta {
  std::size_t size = 0;
  std::vector<std::int64_t> entries;
};

CoMatrixDelta cm_delta(const CoMatrix& old_cm, const CoMatrix& new_cm);
CoMatrix apply_delta(const CoMatrix& cm, const CoMatrixDelta& delta);

}  // namespace sherec

#endif  // SHEREC_RECOMMENDER_HPP_
