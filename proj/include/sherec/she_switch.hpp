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

#ifndef SHEREC_SHE_SWITCH_HPP_
#define SHEREC_SHE_SWITCH_HPP_

// Ciphertext switching between the additive and multiplicative schemes.
//
//   add_to_mul   local, run by the server: E+(m) -> <E+(m h^r), g^r>
//   mul_to_add   two rounds between the server (share x1) and the proxy
//                (share x0): <E+(m h^r), g^r> -> E+(m)
//
// plus the blinded-pair encoding that lets zero travel through the
// multiplicative domain: v is carried as E*(v + b), E*(b) for a random unit b.

#include <array>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "sherec/she_core.hpp"

namespace sherec {

using ExchangeId = std::uint64_t;

inline constexpr int kMaxSwitchRetries = 8;

enum class Exec { kSerial, kParallel };

// <E+(w), g^r> where w is the first ElGamal component m * h^r.
struct NestedCiphertext {
  AddCiphertext outer;
  BigInt companion;
};

struct MulToAddRound1 {
  ExchangeId exchange_id = 0;
  NestedCiphertext nested;
  BigInt c_prime;  // (companion * g^s)^k1 mod N
  BigInt big_r;    // g^s mod N
};

struct MulToAddRound2 {
  ExchangeId exchange_id = 0;
  AddCiphertext c_double_prime;  // E+(m h^-s)
  BigInt r_prime;                // R^k0 mod N
};

// The server's secret s for one exchange. Move-only and consumed by round 2.
class ServerExchangeState {
 public:
  ServerExchangeState(ExchangeId id, BigInt s) : id_(id), s_(std::move(s)) {}
  ServerExchangeState(const ServerExchangeState&) = delete;
  ServerExchangeState& operator=(const ServerExchangeState&) = delete;
  ServerExchangeState(ServerExchangeState&&) = default;
  ServerExchangeState& operator=(ServerExchangeState&&) = default;

  ExchangeId id() const { return id_; }
  const BigInt& s() const { return s_; }

 private:
  ExchangeId id_;
  BigInt s_;
};

NestedCiphertext add_to_mul(const AddPublicKey& pk_add, const MulPublicKey& pk_mul,
                            const AddCiphertext& c, Rng& rng);

// Paillier-wraps c1 of a multiplicative ciphertext and keeps c2 as the
// companion, giving the same shape add_to_mul produces.
NestedCiphertext wrap_mul(const AddPublicKey& pk_add, const MulCiphertext& c, Rng& rng);

std::pair<MulToAddRound1, ServerExchangeState> mul_to_add_server_round1(
    const MulPublicKey& pk_mul, const NestedCiphertext& nested, const BigInt& k1,
    ExchangeId exchange_id, Rng& rng);

// Throws kDegenerateCiphertext for malformed input and kRetry when
// h^(r+s) happens not to be a unit mod N.
MulToAddRound2 mul_to_add_proxy(const AddPublicKey& pk_add, const MulPublicKey& pk_mul,
                                const MulToAddRound1& round1, const BigInt& k0);

AddCiphertext mul_to_add_server_round2(const AddPublicKey& pk_add, const MulPublicKey& pk_mul,
                                       const MulToAddRound2& round2, ServerExchangeState state,
                                       const BigInt& k1);

// Pending server states keyed by exchange id. Safe for concurrent use.
class ExchangeTable {
 public:
  void put(ServerExchangeState state);
  // Throws kProtocolOrder for an unknown or already consumed id.
  ServerExchangeState take(ExchangeId id);
  std::size_t size() const;
  void clear();

 private:
  mutable std::mutex mu_;
  std::unordered_map<ExchangeId, ServerExchangeState> pending_;
};

// Proxy answer to one round-1 message: either round 2 or a retry signal.
struct ProxyReply {
  ExchangeId exchange_id = 0;
  std::optional<MulToAddRound2> round2;
};

// Runs the proxy role over a batch; kRetry failures become retry replies.
std::vector<ProxyReply> proxy_batch(const AddPublicKey& pk_add, const MulPublicKey& pk_mul,
                                    std::span<const MulToAddRound1> batch, const BigInt& k0,
                                    Exec exec);

// Server half of mul_to_add over batches. Exchange ids are consecutive from
// first_exchange_id, and the secret s of exchange e is drawn from
// rng.fork(e), so results do not depend on batch boundaries or threads.
class MulToAddServer {
 public:
  MulToAddServer(AddPublicKey pk_add, MulPublicKey pk_mul, BigInt k1, Rng rng,
                 ExchangeId first_exchange_id = 1);

  using ProxyFn = std::function<std::vector<ProxyReply>(std::span<const MulToAddRound1>)>;

  // Full server side of the protocol for one batch, retrying exchanges the
  // proxy flagged up to kMaxSwitchRetries times.
  std::vector<AddCiphertext> run(std::span<const NestedCiphertext> batch, const ProxyFn& proxy,
                                 Exec exec);

  std::size_t pending() const { return table_.size(); }
  ExchangeId next_exchange_id() const { return next_id_; }

 private:
  std::vector<MulToAddRound1> begin(std::span<const NestedCiphertext> batch, Exec exec);

  AddPublicKey pk_add_;
  MulPublicKey pk_mul_;
  BigInt k1_;
  Rng rng_;
  ExchangeId next_id_;
  ExchangeTable table_;
};

// Whatever can turn wrapped multiplicative ciphertexts into additive ones.
class SwitchContext {
 public:
  virtual ~SwitchContext() = default;
  // Results are in input order.
  virtual std::vector<AddCiphertext> mul_to_add(std::span<const NestedCiphertext> batch) = 0;
};

// Both roles in one process, for tests and benchmarks.
class LocalSwitch : public SwitchContext {
 public:
  LocalSwitch(const KeyMaterial& keys, Rng rng, Exec exec = Exec::kParallel);
  LocalSwitch(AddPublicKey pk_add, MulPublicKey pk_mul, BigInt k0, BigInt k1, Rng rng,
              Exec exec = Exec::kParallel);

  std::vector<AddCiphertext> mul_to_add(std::span<const NestedCiphertext> batch) override;

  std::size_t exchanges() const { return exchanges_; }

 private:
  AddPublicKey pk_add_;
  MulPublicKey pk_mul_;
  BigInt k0_;
  MulToAddServer server_;
  Exec exec_;
  std::size_t exchanges_ = 0;
};

// ---- blinded pair encoding ------------------------------------------------

struct PairEncodedValue {
  MulCiphertext hi;  // E*(v + b)
  MulCiphertext lo;  // E*(b)

  bool operator==(const PairEncodedValue&) const = default;
};

// b is a uniform unit with v + b also a unit, so no leg can ever be 0 and
// products of legs stay units.
PairEncodedValue pair_encode(const MulPublicKey& pk_mul, const BigInt& v, Rng& rng);
BigInt pair_decode(const MulSecretKey& sk_mul, const PairEncodedValue& pv);

// k must be nonzero; scale a known-zero term with E+(0) instead.
PairEncodedValue pair_scalar_mul(const MulPublicKey& pk_mul, const PairEncodedValue& pv,
                                 const BigInt& k);

// hi*hi, hi*lo, lo*hi, lo*lo
std::array<MulCiphertext, 4> pair_cross_products(const MulPublicKey& pk_mul,
                                                 const PairEncodedValue& a,
                                                 const PairEncodedValue& b);

// hh - hl - lh + ll, which is (a.v * b.v) mod N.
AddCiphertext pair_combine(const AddPublicKey& pk_add, std::span<const AddCiphertext, 4> cross);

// Wraps the four cross products with randomness from rng and switches them
// through ctx.
AddCiphertext pair_product_to_add(const AddPublicKey& pk_add, const MulPublicKey& pk_mul,
                                  const PairEncodedValue& a, const PairEncodedValue& b,
                                  SwitchContext& ctx, Rng& rng);

}  // namespace sherec

#endif  // SHEREC_SHE_SWITCH_HPP_
