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

#include "sherec/she_switch.hpp"

#include <algorithm>

#include "sherec/error.hpp"
#include "sherec/parallel.hpp"

namespace sherec {

NestedCiphertext add_to_mul(const AddPublicKey& pk_add, const MulPublicKey& pk_mul,
                            const AddCiphertext& c, Rng& rng) {
  if (c.modulus_tag() != pk_add.tag() || pk_add.n != pk_mul.n) {
    throw Error(ErrorCode::kDomain, "ciphertext and keys use different moduli");
  }
  BigInt r = rng.unit_mod(pk_mul.n);
  BigInt h_r = powm(pk_mul.h, r, pk_mul.n);
  // E+(m)^(h^r) = E+(m h^r): the message slot is scaled by h^r mod N.
  AddCiphertext outer(detail::Trusted{}, pk_add.tag(), powm(c.value(), h_r, pk_add.n_squared));
  return NestedCiphertext{std::move(outer), powm(pk_mul.g, r, pk_mul.n)};
}

NestedCiphertext wrap_mul(const AddPublicKey& pk_add, const MulCiphertext& c, Rng& rng) {
  return NestedCiphertext{enc_add(pk_add, c.c1(), rng), c.c2()};
}

std::pair<MulToAddRound1, ServerExchangeState> mul_to_add_server_round1(
    const MulPublicKey& pk_mul, const NestedCiphertext& nested, const BigInt& k1,
    ExchangeId exchange_id, Rng& rng) {
  const BigInt& n = pk_mul.n;
  if (nested.companion <= 0 || nested.companion >= n || !is_unit(nested.companion, n)) {
    throw Error(ErrorCode::kDegenerateCiphertext, "companion g^r is not a unit mod N");
  }
  BigInt s = rng.unit_mod(n);
  BigInt g_s = powm(pk_mul.g, s, n);
  BigInt c_prime = powm(mod_floor(nested.companion * g_s, n), k1, n);
  MulToAddRound1 round1{exchange_id, nested, std::move(c_prime), std::move(g_s)};
  return {std::move(round1), ServerExchangeState(exchange_id, std::move(s))};
}

MulToAddRound2 mul_to_add_proxy(const AddPublicKey& pk_add, const MulPublicKey& pk_mul,
                                const MulToAddRound1& round1, const BigInt& k0) {
  const BigInt& n = pk_mul.n;
  if (round1.nested.outer.modulus_tag() != pk_add.tag()) {
    throw Error(ErrorCode::kDomain, "nested ciphertext was produced under a different modulus");
  }
  if (round1.c_prime <= 0 || round1.c_prime >= n) {
    throw Error(ErrorCode::kDegenerateCiphertext, "c' outside [1, N)");
  }
  if (round1.big_r <= 0 || round1.big_r >= n) {
    throw Error(ErrorCode::kDegenerateCiphertext, "R outside [1, N)");
  }
  BigInt h_rs = powm(round1.c_prime, k0, n);
  if (!is_unit(h_rs, n)) throw Error(ErrorCode::kRetry, "h^(r+s) is not invertible mod N");
  BigInt t = invert(h_rs, n);
  // E+(m h^r)^t = E+(m h^r h^-(r+s)) = E+(m h^-s)
  AddCiphertext c_dprime(detail::Trusted{}, pk_add.tag(),
                         powm(round1.nested.outer.value(), t, pk_add.n_squared));
  return MulToAddRound2{round1.exchange_id, std::move(c_dprime), powm(round1.big_r, k0, n)};
}

AddCiphertext mul_to_add_server_round2(const AddPublicKey& pk_add, const MulPublicKey& pk_mul,
                                       const MulToAddRound2& round2, ServerExchangeState state,
                                       const BigInt& k1) {
  if (state.id() != round2.exchange_id) {
    throw Error(ErrorCode::kProtocolOrder, "round 2 does not match the pending exchange");
  }
  if (round2.r_prime <= 0 || round2.r_prime >= pk_mul.n) {
    throw Error(ErrorCode::kDegenerateCiphertext, "R' outside [1, N)");
  }
  BigInt h_s = powm(round2.r_prime, k1, pk_mul.n);
  return scalar_mul_add(pk_add, round2.c_double_prime, h_s);
}

void ExchangeTable::put(ServerExchangeState state) {
  std::lock_guard lock(mu_);
  ExchangeId id = state.id();
  auto [it, inserted] = pending_.emplace(id, std::move(state));
  if (!inserted) throw Error(ErrorCode::kProtocolOrder, "exchange id reused: " + std::to_string(id));
}

ServerExchangeState ExchangeTable::take(ExchangeId id) {
  std::lock_guard lock(mu_);
  auto it = pending_.find(id);
  if (it == pending_.end()) {
    throw Error(ErrorCode::kProtocolOrder, "no pending exchange " + std::to_string(id));
  }
  ServerExchangeState state = std::move(it->second);
  pending_.erase(it);
  return state;
}

std::size_t ExchangeTable::size() const {
  std::lock_guard lock(mu_);
  return pending_.size();
}

void ExchangeTable::clear() {
  std::lock_guard lock(mu_);
  pending_.clear();
}

std::vector<ProxyReply> proxy_batch(const AddPublicKey& pk_add, const MulPublicKey& pk_mul,
                                    std::span<const MulToAddRound1> batch, const BigInt& k0,
                                    Exec exec) {
  std::vector<ProxyReply> replies(batch.size());
  parallel_for(batch.size(), exec, [&](std::size_t i) {
    replies[i].exchange_id = batch[i].exchange_id;
    try {
      replies[i].round2 = mul_to_add_proxy(pk_add, pk_mul, batch[i], k0);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRetry) throw;
    }
  });
  return replies;
}

MulToAddServer::MulToAddServer(AddPublicKey pk_add, MulPublicKey pk_mul, BigInt k1, Rng rng,
                               ExchangeId first_exchange_id)
    : pk_add_(std::move(pk_add)),
      pk_mul_(std::move(pk_mul)),
      k1_(std::move(k1)),
      rng_(std::move(rng)),
      next_id_(first_exchange_id) {}

std::vector<MulToAddRound1> MulToAddServer::begin(std::span<const NestedCiphertext> batch,
                                                  Exec exec) {
  const ExchangeId base = next_id_;
  next_id_ += batch.size();
  std::vector<std::optional<MulToAddRound1>> rounds(batch.size());
  parallel_for(batch.size(), exec, [&](std::size_t i) {
    Rng local = rng_.fork(base + i);
    auto [round1, state] = mul_to_add_server_round1(pk_mul_, batch[i], k1_, base + i, local);
    table_.put(std::move(state));
    rounds[i] = std::move(round1);
  });
  std::vector<MulToAddRound1> out;
  out.reserve(rounds.size());
  for (auto& r : rounds) out.push_back(std::move(*r));
  return out;
}

std::vector<AddCiphertext> MulToAddServer::run(std::span<const NestedCiphertext> batch,
                                               const ProxyFn& proxy, Exec exec) {
  std::vector<std::optional<AddCiphertext>> results(batch.size());
  std::vector<MulToAddRound1> outstanding;
  std::vector<std::size_t> positions(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) positions[i] = i;

  try {
    outstanding = begin(batch, exec);
    for (int attempt = 0; !outstanding.empty(); ++attempt) {
      if (attempt > kMaxSwitchRetries) {
        throw Error(ErrorCode::kRetryExhausted,
                    std::to_string(outstanding.size()) + " exchanges still failing");
      }
      std::vector<ProxyReply> replies = proxy(outstanding);
      if (replies.size() != outstanding.size()) {
        throw Error(ErrorCode::kProtocol, "proxy answered " + std::to_string(replies.size()) +
                                              " of " + std::to_string(outstanding.size()) +
                                              " exchanges");
      }
      for (std::size_t i = 0; i < replies.size(); ++i) {
        if (replies[i].exchange_id != outstanding[i].exchange_id) {
          throw Error(ErrorCode::kProtocolOrder, "proxy reply out of order");
        }
      }
      parallel_for(replies.size(), exec, [&](std::size_t i) {
        if (!replies[i].round2) return;
        ServerExchangeState state = table_.take(replies[i].exchange_id);
        results[positions[i]] =
            mul_to_add_server_round2(pk_add_, pk_mul_, *replies[i].round2, std::move(state), k1_);
      });
      std::vector<NestedCiphertext> again;
      std::vector<std::size_t> again_pos;
      for (std::size_t i = 0; i < replies.size(); ++i) {
        if (replies[i].round2) continue;
        table_.take(replies[i].exchange_id);  // discard; a fresh s is drawn below
        again.push_back(outstanding[i].nested);
        again_pos.push_back(positions[i]);
      }
      outstanding = again.empty() ? std::vector<MulToAddRound1>{} : begin(again, exec);
      positions = std::move(again_pos);
    }
  } catch (...) {
    for (const auto& r : outstanding) {
      try {
        table_.take(r.exchange_id);
      } catch (const Error&) {
      }
    }
    throw;
  }

  std::vector<AddCiphertext> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

LocalSwitch::LocalSwitch(const KeyMaterial& keys, Rng rng, Exec exec)
    : LocalSwitch(keys.add.pk, keys.mul.pk, keys.shares.proxy.mul, keys.shares.server.mul,
                  std::move(rng), exec) {}

LocalSwitch::LocalSwitch(AddPublicKey pk_add, MulPublicKey pk_mul, BigInt k0, BigInt k1, Rng rng,
                         Exec exec)
    : pk_add_(pk_add),
      pk_mul_(pk_mul),
      k0_(std::move(k0)),
      server_(std::move(pk_add), std::move(pk_mul), std::move(k1), std::move(rng)),
      exec_(exec) {}

std::vector<AddCiphertext> LocalSwitch::mul_to_add(std::span<const NestedCiphertext> batch) {
  exchanges_ += batch.size();
  return server_.run(
      batch,
      [this](std::span<const MulToAddRound1> round1) {
        return proxy_batch(pk_add_, pk_mul_, round1, k0_, exec_);
      },
      exec_);
}

PairEncodedValue pair_encode(const MulPublicKey& pk_mul, const BigInt& v, Rng& rng) {
  if (v < 0 || v >= pk_mul.n) throw Error(ErrorCode::kDomain, "value outside [0, N)");
  for (;;) {
    BigInt blind = rng.unit_mod(pk_mul.n);
    BigInt shifted = mod_floor(v + blind, pk_mul.n);
    if (!is_unit(shifted, pk_mul.n)) continue;
    MulCiphertext hi = enc_mul(pk_mul, shifted, rng);
    MulCiphertext lo = enc_mul(pk_mul, blind, rng);
    return PairEncodedValue{std::move(hi), std::move(lo)};
  }
}

BigInt pair_decode(const MulSecretKey& sk_mul, const PairEncodedValue& pv) {
  return mod_floor(dec_mul(sk_mul, pv.hi) - dec_mul(sk_mul, pv.lo), sk_mul.n);
}

PairEncodedValue pair_scalar_mul(const MulPublicKey& pk_mul, const PairEncodedValue& pv,
                                 const BigInt& k) {
  return PairEncodedValue{scalar_mul_mul(pk_mul, pv.hi, k), scalar_mul_mul(pk_mul, pv.lo, k)};
}

std::array<MulCiphertext, 4> pair_cross_products(const MulPublicKey& pk_mul,
                                                 const PairEncodedValue& a,
                                                 const PairEncodedValue& b) {
  return {mul_homomorphic(pk_mul, a.hi, b.hi), mul_homomorphic(pk_mul, a.hi, b.lo),
          mul_homomorphic(pk_mul, a.lo, b.hi), mul_homomorphic(pk_mul, a.lo, b.lo)};
}

AddCiphertext pair_combine(const AddPublicKey& pk_add, std::span<const AddCiphertext, 4> cross) {
  AddCiphertext acc = sub_homomorphic(pk_add, cross[0], cross[1]);
  acc = sub_homomorphic(pk_add, acc, cross[2]);
  return add_homomorphic(pk_add, acc, cross[3]);
}

AddCiphertext pair_product_to_add(const AddPublicKey& pk_add, const MulPublicKey& pk_mul,
                                  const PairEncodedValue& a, const PairEncodedValue& b,
                                  SwitchContext& ctx, Rng& rng) {
  auto cross = pair_cross_products(pk_mul, a, b);
  std::vector<NestedCiphertext> wrapped;
  wrapped.reserve(cross.size());
  for (const auto& c : cross) wrapped.push_back(wrap_mul(pk_add, c, rng));
  std::vector<AddCiphertext> added = ctx.mul_to_add(wrapped);
  return pair_combine(pk_add, std::span<const AddCiphertext, 4>(added.data(), 4));
}

}  // namespace sherec
