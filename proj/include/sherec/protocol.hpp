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

#ifndef SHEREC_PROTOCOL_HPP_
#define SHEREC_PROTOCOL_HPP_

// Three parties:
//   client    owns every key, encrypts its preference vector and location,
//             decrypts the recommendation list
//   server Y  stores the encrypted co-occurrence database, runs the
//             recommendation loop, holds multiplicative share x1
//   proxy X   answers MulToAdd round-1 messages, holds share x0
//
// Each role consumes an ordered message stream per session. A session moves
// through setup -> init -> recommend -> filter -> update -> closed; see
// SessionState::allowed for the exact edges.

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sherec/error.hpp"
#include "sherec/hilbert.hpp"
#include "sherec/recommender.hpp"
#include "sherec/she_switch.hpp"
#include "sherec/transport.hpp"
#include "sherec/wire.hpp"

namespace sherec {

enum class Stage { kSetup, kInit, kRecommend, kFilter, kUpdate, kClosed };
std::string_view to_string(Stage stage);

enum class Role { kClient, kServerY, kProxyX };
std::string_view to_string(Role role);

class SessionState {
 public:
  explicit SessionState(std::uint64_t id = 0) : id_(id) {}

  std::uint64_t id() const { return id_; }
  Stage stage() const { return stage_; }

  static bool allowed(Stage from, Stage to);
  // Throws kProtocolOrder and leaves the state untouched on an illegal edge.
  void advance(Stage next);

 private:
  std::uint64_t id_;
  Stage stage_ = Stage::kSetup;
};

struct PublicKeys {
  AddPublicKey add;
  MulPublicKey mul;

  bool same_as(const PublicKeys& other) const {
    return add.n == other.add.n && mul.n == other.mul.n && mul.g == other.mul.g &&
           mul.h == other.mul.h;
  }
};

PublicKeys public_keys(const KeyMaterial& keys);

// Message stream of one connection. Enforces the session id (adopted from
// the first message when constructed without one) and consecutive seq
// numbers in each direction.
class Channel {
 public:
  Channel(Transport& transport, std::optional<std::uint64_t> session);

  void send(wire::MessageType type, wire::Json body);
  // Throws kAborted when the peer sent ABORT.
  wire::Message receive();
  // receive() plus a type check (kProtocolOrder on mismatch).
  wire::Message expect(wire::MessageType type);
  // Best effort: never throws.
  void abort(Stage stage, std::string_view reason) noexcept;
  void close() noexcept;

  std::optional<std::uint64_t> session() const { return session_; }

 private:
  Transport& transport_;
  std::optional<std::uint64_t> session_;
  std::uint64_t send_seq_ = 0;
  std::uint64_t recv_seq_ = 0;
};

// Y's encrypted co-occurrence database. cm_add is the Paillier aggregate that
// updates are folded into; cm_pairs is the pair-encoded ElGamal form the
// recommendation loop consumes. pairs_stale marks that cm_add has moved on
// and cm_pairs must be regenerated before the next recommendation.
struct EncryptedDatabase {
  std::size_t size = 0;
  std::vector<AddCiphertext> cm_add;
  EncryptedCoMatrix cm_pairs;
  bool pairs_stale = false;
};

struct SessionReport {
  std::uint64_t session = 0;
  Stage final_stage = Stage::kSetup;
  std::optional<ErrorCode> error;
  std::string message;
};

using TransportFactory = std::function<std::unique_ptr<Transport>()>;
using StageObserver = std::function<void(Role, std::uint64_t session, Stage)>;

struct ServerYConfig {
  std::optional<std::uint64_t> seed;  // deterministic sessions for tests
  Exec exec = Exec::kParallel;
  std::size_t m2a_window = 64;  // round-1 messages in flight to the proxy
};

class ServerY {
 public:
  ServerY(ServerYConfig config, TransportFactory proxy_connector);

  void preload_keys(const PublicKeys& keys, const BigInt& k1);

  // Runs one client session until the client disconnects or an error
  // aborts it. Never throws.
  SessionReport serve(Transport& client);

  std::shared_ptr<const EncryptedDatabase> database() const;
  std::optional<PublicKeys> keys() const;
  // Every secret this server currently holds, for state inspection.
  std::vector<BigInt> held_secrets() const;
  double last_recommendation_seconds() const { return last_rec_seconds_.load(); }

  void set_stage_observer(StageObserver observer);

 private:
  friend class ServerYSession;

  ServerYConfig config_;
  TransportFactory proxy_connector_;
  mutable std::shared_mutex mu_;  // guards keys_, k1_, db_; updates are serialised
  std::optional<PublicKeys> keys_;
  std::optional<BigInt> k1_;
  std::shared_ptr<const EncryptedDatabase> db_;
  std::atomic<double> last_rec_seconds_{0.0};
  StageObserver observer_;
};

class ProxyX {
 public:
  explicit ProxyX(Exec exec = Exec::kParallel) : exec_(exec) {}

  void preload_keys(const PublicKeys& keys, const BigInt& k0);

  // Serves one connection: SETUP_KEYS from the client, or M2A_ROUND1
  // messages from server Y. Never throws.
  SessionReport serve(Transport& conn);

  std::vector<BigInt> held_secrets() const;
  std::size_t exchanges_answered() const { return answered_.load(); }

 private:
  Exec exec_;
  mutable std::shared_mutex mu_;
  std::optional<PublicKeys> keys_;
  std::optional<BigInt> k0_;
  std::atomic<std::size_t> answered_{0};
};

struct ClientConfig {
  std::optional<std::uint64_t> seed;
  std::uint32_t r_max = kDefaultMaxRating;
  unsigned order = kDefaultHilbertOrder;
  // Upper bound on any aggregated co-occurrence count, used for the
  // wraparound check when this client did not upload the matrix itself.
  std::uint64_t cm_bound = std::uint64_t{1} << 32;
  Exec exec = Exec::kParallel;
};

struct RecommendationOutcome {
  std::vector<Recommendation> list;
  double encrypt_s = 0;  // PV pair encoding + location encryption
  double server_s = 0;   // upload until RL_RESPONSE, including strip requests
  double decrypt_s = 0;
  double total_s = 0;
};

class Client {
 public:
  Client(KeyMaterial keys, ClientConfig config, Transport& server_y, Transport& proxy_x);

  std::uint64_t session() const { return state_.id(); }
  Stage stage() const { return state_.stage(); }
  const KeyMaterial& keys() const { return keys_; }

  // Distributes public keys and the two multiplicative shares.
  void setup();
  // Uploads each user's size x size matrix under pk_add, then serves Y's
  // strip requests until the database is built. No contributions means an
  // all-zero database.
  void initialize(std::size_t size, std::span<const CoMatrix> contributions);
  RecommendationOutcome recommend(const PreferenceVector& pv, GridCell location,
                                  std::int64_t radius);
  void update(const CoMatrix& old_cm, const CoMatrix& new_cm);
  void close();

 private:
  void require_setup() const;
  void answer_strip_request(const wire::Message& req);
  void send_matrix_rows(wire::MessageType type, std::size_t size,
                        const std::function<BigInt(std::size_t)>& entry);

  KeyMaterial keys_;
  ClientConfig config_;
  Rng rng_;
  AddDecryptor decryptor_;
  SessionState state_;
  Channel to_y_;
  Channel to_x_;
  Transport& y_transport_;
  Transport& x_transport_;
  std::optional<std::uint64_t> known_cm_max_;
  std::uint64_t op_counter_ = 0;
  bool setup_done_ = false;
};

}  // namespace sherec

#endif  // SHEREC_PROTOCOL_HPP_
