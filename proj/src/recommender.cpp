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

#include "sherec/recommender.hpp"

#include <algorithm>
#include <iostream>

#include "sherec/error.hpp"
#include "sherec/parallel.hpp"

namespace sherec {

CoMatrix::CoMatrix(std::size_t size, std::vector<std::uint64_t> row_major)
    : size_(size), w_(std::move(row_major)) {
  if (w_.size() != size_ * size_) {
    throw Error(ErrorCode::kDomain, "co-occurrence matrix needs " + std::to_string(size_ * size_) +
                                        " entries, got " + std::to_string(w_.size()));
  }
}

std::uint64_t CoMatrix::max_entry() const {
  return w_.empty() ? 0 : *std::max_element(w_.begin(), w_.end());
}

bool CoMatrix::symmetric() const {
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t j = i + 1; j < size_; ++j) {
      if (at(i, j) != at(j, i)) return false;
    }
  }
  return true;
}

CoMatrix build_cm(const InversionList& lists, std::size_t size) {
  CoMatrix cm(size);
  for (const auto& [user, items] : lists) {
    for (std::uint64_t i : items) {
      if (i >= size) {
        throw Error(ErrorCode::kDomain, "user " + user + " lists item " + std::to_string(i) +
                                            " outside [0, " + std::to_string(size) + ")");
      }
      for (std::uint64_t j : items) cm.at(i, j) += 1;  // i == j counts the occurrence
    }
  }
  return cm;
}

PlainScores predict_plain(const CoMatrix& cm, const PreferenceVector& pv) {
  if (pv.size() != cm.size()) {
    throw Error(ErrorCode::kDomain, "preference vector length does not match the matrix");
  }
  PlainScores rl(cm.size(), 0);
  for (std::size_t i = 0; i < cm.size(); ++i) {
    for (std::size_t j = 0; j < cm.size(); ++j) rl[i] += cm.at(i, j) * pv[j];
  }
  return rl;
}

void check_score_bound(std::size_t size, std::uint32_t r_max, std::uint64_t cm_max,
                       const BigInt& n) {
  BigInt bound = from_u64(size) * r_max * from_u64(cm_max);
  if (bound >= n) {
    throw Error(ErrorCode::kDomain, "scores could reach " + bound.get_str() +
                                        ", which does not fit below N; use a larger key");
  }
}

namespace {

void check_shapes(const EncryptedCoMatrix& cm, std::span<const PairEncodedValue> pv) {
  if (cm.entries.size() != cm.size * cm.size) {
    throw Error(ErrorCode::kDomain, "encrypted matrix has the wrong number of entries");
  }
  if (pv.size() != cm.size) {
    throw Error(ErrorCode::kDomain, "encrypted preference vector length does not match the matrix");
  }
}

AddCiphertext public_zero(const AddPublicKey& pk_add) {
  return AddCiphertext(detail::Trusted{}, pk_add.tag(), BigInt(1));
}

}  // namespace

std::vector<AddCiphertext> recommend_encrypted(const AddPublicKey& pk_add,
                                               const MulPublicKey& pk_mul,
                                               const EncryptedCoMatrix& cm,
                                               std::span<const PairEncodedValue> pv,
                                               SwitchContext& ctx, const Rng& rng) {
  check_shapes(cm, pv);
  const std::size_t size = cm.size;
  std::vector<AddCiphertext> rl;
  rl.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    std::vector<std::optional<NestedCiphertext>> wrapped(4 * size);
    parallel_for(size, Exec::kParallel, [&](std::size_t j) {
      Rng cell = rng.fork(i * size + j);
      auto cross = pair_cross_products(pk_mul, cm.at(i, j), pv[j]);
      for (std::size_t k = 0; k < cross.size(); ++k) {
        wrapped[4 * j + k] = wrap_mul(pk_add, cross[k], cell);
      }
    });
    std::vector<NestedCiphertext> batch;
    batch.reserve(wrapped.size());
    for (auto& w : wrapped) batch.push_back(std::move(*w));

    std::vector<AddCiphertext> switched = ctx.mul_to_add(batch);
    if (switched.size() != batch.size()) {
      throw Error(ErrorCode::kProtocol, "switch returned the wrong number of ciphertexts");
    }
    std::vector<std::optional<AddCiphertext>> terms(size);
    parallel_for(size, Exec::kParallel, [&](std::size_t j) {
      terms[j] = pair_combine(pk_add, std::span<const AddCiphertext, 4>(&switched[4 * j], 4));
    });
    AddCiphertext acc = public_zero(pk_add);
    for (const auto& t : terms) acc = add_homomorphic(pk_add, acc, *t);
    rl.push_back(std::move(acc));
  }
  return rl;
}

std::vector<AddCiphertext> recommend_encrypted_serial(const AddPublicKey& pk_add,
                                                      const MulPublicKey& pk_mul,
                                                      const EncryptedCoMatrix& cm,
                                                      std::span<const PairEncodedValue> pv,
                                                      SwitchContext& ctx, const Rng& rng) {
  check_shapes(cm, pv);
  const std::size_t size = cm.size;
  std::vector<AddCiphertext> rl;
  rl.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    AddCiphertext acc = public_zero(pk_add);
    for (std::size_t j = 0; j < size; ++j) {
      Rng cell = rng.fork(i * size + j);
      AddCiphertext temp = pair_product_to_add(pk_add, pk_mul, cm.at(i, j), pv[j], ctx, cell);
      acc = add_homomorphic(pk_add, acc, temp);
    }
    rl.push_back(std::move(acc));
  }
  return rl;
}

std::vector<LocatedScore> filter_by_location(std::span<const AddCiphertext> rl,
                                             const AddCiphertext& loc, const AddPublicKey& pk_add) {
  std::vector<LocatedScore> out;
  out.reserve(rl.size());
  for (std::size_t i = 0; i < rl.size(); ++i) {
    AddCiphertext item = enc_add_with_randomness(pk_add, from_u64(i), BigInt(1));
    out.push_back(LocatedScore{i, rl[i], sub_homomorphic(pk_add, item, loc)});
  }
  return out;
}

BigInt signed_residue(const BigInt& v, const BigInt& n) {
  BigInt r = mod_floor(v, n);
  if (2 * r > n) r -= n;
  return r;
}

std::vector<Recommendation> client_filter(std::span<const LocatedScore> located,
                                          const AddDecryptor& dec, const BigInt& n,
                                          std::int64_t radius, Exec exec) {
  if (radius < 0) throw Error(ErrorCode::kDomain, "radius must be nonnegative");
  const bool keep_all = static_cast<std::size_t>(radius) >= located.size();
  if (keep_all) {
    std::clog << "sherec: radius " << radius << " covers all " << located.size()
              << " items; location filter keeps everything\n";
  }
  std::vector<std::optional<Recommendation>> decoded(located.size());
  parallel_for(located.size(), exec, [&](std::size_t k) {
    BigInt offset = signed_residue(dec(located[k].offset), n);
    BigInt score = dec(located[k].score);
    BigInt magnitude = abs(offset);
    if (!keep_all && magnitude > radius) return;
    decoded[k] = Recommendation{located[k].item, to_u64(score),
                                static_cast<std::int64_t>(offset.get_si())};
  });
  std::vector<Recommendation> out;
  for (auto& d : decoded) {
    if (d) out.push_back(*d);
  }
  return out;
}

std::vector<Recommendation> plain_filter(const PlainScores& scores, std::uint64_t loc,
                                         std::int64_t radius) {
  if (radius < 0) throw Error(ErrorCode::kDomain, "radius must be nonnegative");
  const bool keep_all = static_cast<std::size_t>(radius) >= scores.size();
  std::vector<Recommendation> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::int64_t offset = static_cast<std::int64_t>(i) - static_cast<std::int64_t>(loc);
    if (!keep_all && std::abs(offset) > radius) continue;
    out.push_back(Recommendation{i, scores[i], offset});
  }
  return out;
}

CoMatrixDelta cm_delta(const CoMatrix& old_cm, const CoMatrix& new_cm) {
  if (old_cm.size() != new_cm.size()) {
    throw Error(ErrorCode::kDomain, "matrices differ in size");
  }
  CoMatrixDelta delta{old_cm.size(), std::vector<std::int64_t>(old_cm.entries().size())};
  for (std::size_t k = 0; k < delta.entries.size(); ++k) {
    delta.entries[k] = static_cast<std::int64_t>(new_cm.entries()[k]) -
                       static_cast<std::int64_t>(old_cm.entries()[k]);
  }
  return delta;
}

CoMatrix apply_delta(const CoMatrix& cm, const CoMatrixDelta& delta) {
  if (cm.size() != delta.size) throw Error(ErrorCode::kDomain, "delta size does not match");
  std::vector<std::uint64_t> w(cm.entries().begin(), cm.entries().end());
  for (std::size_t k = 0; k < w.size(); ++k) {
    std::int64_t v = static_cast<std::int64_t>(w[k]) + delta.entries[k];
    if (v < 0) throw Error(ErrorCode::kDomain, "delta drives an entry negative");
    w[k] = static_cast<std::uint64_t>(v);
  }
  return CoMatrix(cm.size(), std::move(w));
}

}  // namespace sherec
