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

#include "sherec/protocol.hpp"

#include <chrono>
#include <mutex>

#include "sherec/parallel.hpp"

namespace sherec {

using wire::Json;
using wire::MessageType;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Sub-stream ids for per-session randomness.
constexpr std::uint64_t kStreamSwitch = 1;
constexpr std::uint64_t kStreamOp = 2;

Rng op_stream(const Rng& base, std::uint64_t op) { return base.fork((op << 8) | kStreamOp); }

Json encode_setup(const PublicKeys& k, std::string_view role, const BigInt& share) {
  return Json{{"pk_add", Json{{"n", wire::hex(k.add.n)}}},
              {"pk_mul", Json{{"n", wire::hex(k.mul.n)}, {"g", wire::hex(k.mul.g)}, {"h", wire::hex(k.mul.h)}}},
              {"share", Json{{"role", std::string(role)}, {"k_add", nullptr}, {"k_mul", wire::hex(share)}}}};
}

struct SetupPayload {
  PublicKeys keys;
  BigInt share;
};

SetupPayload decode_setup(const Json& body, std::string_view expected_role) {
  const Json& add = body.at("pk_add");
  const Json& mul = body.at("pk_mul");
  const Json& share = body.at("share");
  if (!share.at("role").is_string() || share.at("role").get<std::string>() != expected_role) {
    throw Error(ErrorCode::kProtocol, "key share addressed to a different role");
  }
  if (!share.at("k_add").is_null()) {
    throw Error(ErrorCode::kProtocol, "additive key shares must be absent");
  }
  BigInt n = wire::big(add, "n");
  MulPublicKey pk_mul{wire::big(mul, "n"), wire::big(mul, "g"), wire::big(mul, "h")};
  if (pk_mul.n != n) throw Error(ErrorCode::kProtocol, "additive and multiplicative keys disagree on N");
  if (pk_mul.g != kGenerator) throw Error(ErrorCode::kProtocol, "g must be 16");
  return SetupPayload{PublicKeys{AddPublicKey::from_modulus(n), pk_mul}, wire::big(share, "k_mul")};
}

Json ack(MessageType what) { return Json{{"ack", std::string(wire::to_string(what))}}; }

void expect_ack(Channel& ch, MessageType what) {
  wire::Message msg = ch.expect(MessageType::kAck);
  auto it = msg.body.find("ack");
  if (it == msg.body.end() || *it != std::string(wire::to_string(what))) {
    throw Error(ErrorCode::kProtocol, "acknowledgement for the wrong message");
  }
}

const Json& array_field(const Json& body, const char* key, std::size_t expected) {
  const Json& arr = body.at(key);
  if (!arr.is_array() || arr.size() != expected) {
    throw Error(ErrorCode::kProtocol, std::string("'") + key + "' must hold " +
                                          std::to_string(expected) + " entries");
  }
  return arr;
}

SessionReport report_error(std::uint64_t session, Stage stage, const std::exception& e) {
  SessionReport r{session, stage, ErrorCode::kProtocol, e.what()};
  if (const auto* err = dynamic_cast<const Error*>(&e)) r.error = err->code();
  return r;
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kSetup: return "setup";
    case Stage::kInit: return "init";
    case Stage::kRecommend: return "recommend";
    case Stage::kFilter: return "filter";
    case Stage::kUpdate: return "update";
    case Stage::kClosed: return "closed";
  }
  return "unknown";
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kClient: return "client";
    case Role::kServerY: return "server_y";
    case Role::kProxyX: return "proxy_x";
  }
  return "unknown";
}

bool SessionState::allowed(Stage from, Stage to) {
  if (from == Stage::kClosed) return false;
  if (to == Stage::kClosed) return true;
  switch (from) {
    case Stage::kSetup: return to == Stage::kInit;
    case Stage::kInit: return to == Stage::kInit || to == Stage::kRecommend || to == Stage::kUpdate;
    case Stage::kRecommend: return to == Stage::kFilter;
    case Stage::kFilter: return to == Stage::kRecommend || to == Stage::kUpdate;
    case Stage::kUpdate: return to == Stage::kUpdate || to == Stage::kRecommend;
    case Stage::kClosed: return false;
  }
  return false;
}

void SessionState::advance(Stage next) {
  if (!allowed(stage_, next)) {
    throw Error(ErrorCode::kProtocolOrder, "illegal stage transition " + std::string(to_string(stage_)) +
                                               " -> " + std::string(to_string(next)));
  }
  stage_ = next;
}

PublicKeys public_keys(const KeyMaterial& keys) { return PublicKeys{keys.add.pk, keys.mul.pk}; }

Channel::Channel(Transport& transport, std::optional<std::uint64_t> session)
    : transport_(transport), session_(session) {}

void Channel::send(MessageType type, Json body) {
  if (!session_) throw Error(ErrorCode::kProtocolOrder, "no session established on this channel");
  wire::Message msg{type, *session_, send_seq_++, std::move(body)};
  try {
    transport_.send(wire::serialize(msg));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTransport) throw;
    // The peer hung up. If it said why first, surface that instead.
    try {
      for (;;) receive();
    } catch (const Error& inner) {
      if (inner.code() == ErrorCode::kAborted) throw;
    }
    throw;
  }
}

wire::Message Channel::receive() {
  wire::Message msg = wire::parse(transport_.receive());
  if (!session_) session_ = msg.session;
  if (msg.session != *session_) {
    throw Error(ErrorCode::kProtocol, "message for session " + std::to_string(msg.session) +
                                          " on session " + std::to_string(*session_));
  }
  if (msg.seq != recv_seq_) {
    throw Error(ErrorCode::kProtocolOrder, "expected seq " + std::to_string(recv_seq_) + ", got " +
                                               std::to_string(msg.seq));
  }
  ++recv_seq_;
  if (msg.type == MessageType::kAbort) {
    std::string reason = msg.body.value("reason", std::string("unspecified"));
    std::string stage = msg.body.value("stage", std::string("?"));
    throw Error(ErrorCode::kAborted, "peer aborted in stage " + stage + ": " + reason);
  }
  return msg;
}

wire::Message Channel::expect(MessageType type) {
  wire::Message msg = receive();
  if (msg.type != type) {
    throw Error(ErrorCode::kProtocolOrder, "expected " + std::string(wire::to_string(type)) + ", got " +
                                               std::string(wire::to_string(msg.type)));
  }
  return msg;
}

void Channel::abort(Stage stage, std::string_view reason) noexcept {
  try {
    if (!session_) session_ = 0;
    send(MessageType::kAbort, Json{{"stage", std::string(to_string(stage))}, {"reason", std::string(reason)}});
  } catch (...) {
  }
}

void Channel::close() noexcept {
  try {
    transport_.close();
  } catch (...) {
  }
}

// ---- server Y ---------------------------------------------------------------

ServerY::ServerY(ServerYConfig config, TransportFactory proxy_connector)
    : config_(config), proxy_connector_(std::move(proxy_connector)) {}

void ServerY::preload_keys(const PublicKeys& keys, const BigInt& k1) {
  std::unique_lock lock(mu_);
  keys_ = keys;
  k1_ = k1;
}

std::shared_ptr<const EncryptedDatabase> ServerY::database() const {
  std::shared_lock lock(mu_);
  return db_;
}

std::optional<PublicKeys> ServerY::keys() const {
  std::shared_lock lock(mu_);
  return keys_;
}

std::vector<BigInt> ServerY::held_secrets() const {
  std::shared_lock lock(mu_);
  std::vector<BigInt> out;
  if (k1_) out.push_back(*k1_);
  return out;
}

void ServerY::set_stage_observer(StageObserver observer) {
  std::unique_lock lock(mu_);
  observer_ = std::move(observer);
}

class ServerYSession {
 public:
  ServerYSession(ServerY& y, Transport& client) : y_(y), ch_(client, std::nullopt) {}

  SessionReport run() {
    SessionReport report;
    try {
      for (;;) {
        wire::Message msg;
        try {
          msg = ch_.receive();
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kTransport) break;
          throw;
        }
        dispatch(msg);
      }
      enter(Stage::kClosed);
      report = SessionReport{session(), Stage::kClosed, std::nullopt, {}};
    } catch (const Error& e) {
      report = report_error(session(), state_.stage(), e);
      if (e.code() != ErrorCode::kAborted) ch_.abort(state_.stage(), e.what());
      if (proxy_ch_) proxy_ch_->abort(state_.stage(), "client session aborted");
    } catch (const std::exception& e) {
      report = report_error(session(), state_.stage(), e);
      ch_.abort(state_.stage(), e.what());
      if (proxy_ch_) proxy_ch_->abort(state_.stage(), "client session aborted");
    }
    if (proxy_ch_) proxy_ch_->close();
    ch_.close();
    return report;
  }

 private:
  class RemoteSwitch : public SwitchContext {
   public:
    explicit RemoteSwitch(ServerYSession& s) : s_(s) {}
    std::vector<AddCiphertext> mul_to_add(std::span<const NestedCiphertext> batch) override {
      return s_.m2a_->run(
          batch, [this](std::span<const MulToAddRound1> r1) { return s_.ask_proxy(r1); },
          s_.y_.config_.exec);
    }

   private:
    ServerYSession& s_;
  };

  std::uint64_t session() const { return ch_.session().value_or(0); }

  void enter(Stage next) {
    state_.advance(next);
    StageObserver observer;
    {
      std::shared_lock lock(y_.mu_);
      observer = y_.observer_;
    }
    if (observer) observer(Role::kServerY, session(), next);
  }

  void dispatch(const wire::Message& msg) {
    switch (msg.type) {
      case MessageType::kSetupKeys: on_setup(msg); break;
      case MessageType::kCmContrib: on_contrib(msg); break;
      case MessageType::kPvUpload: on_pv(msg); break;
      case MessageType::kLocUpload: on_loc(msg); break;
      case MessageType::kCmDelta: on_delta(msg); break;
      default:
        throw Error(ErrorCode::kProtocolOrder,
                    "server Y does not accept " + std::string(wire::to_string(msg.type)) + " here");
    }
  }

  const PublicKeys& keys() const {
    if (!keys_) throw Error(ErrorCode::kProtocolOrder, "no keys: SETUP_KEYS must come first");
    return *keys_;
  }

  std::shared_ptr<const EncryptedDatabase> ready_database() const {
    auto db = y_.database();
    if (!db) throw Error(ErrorCode::kProtocolOrder, "database not initialised");
    return db;
  }

  void on_setup(const wire::Message& msg) {
    SetupPayload setup = decode_setup(msg.body, to_string(Role::kServerY));
    {
      std::unique_lock lock(y_.mu_);
      if (y_.keys_ && !y_.keys_->same_as(setup.keys)) {
        if (y_.db_) throw Error(ErrorCode::kProtocol, "database exists under different keys");
      }
      if (!y_.keys_ || !y_.keys_->same_as(setup.keys)) y_.db_.reset();
      y_.keys_ = setup.keys;
      y_.k1_ = setup.share;
    }
    enter(Stage::kInit);
    keys_ = setup.keys;
    rng_ = (y_.config_.seed ? Rng::from_seed(*y_.config_.seed) : Rng::from_entropy()).fork(session());
    m2a_.emplace(keys_->add, keys_->mul, setup.share, rng_->fork(kStreamSwitch));
    ch_.send(MessageType::kAck, ack(MessageType::kSetupKeys));
  }

  Rng next_op_rng() { return op_stream(*rng_, op_counter_++); }

  void on_contrib(const wire::Message& msg) {
    const PublicKeys& k = keys();
    enter(Stage::kInit);
    std::size_t size = wire::u64(msg.body, "size");
    if (!init_size_) {
      if (size == 0) throw Error(ErrorCode::kProtocol, "matrix size must be positive");
      init_size_ = size;
    }
    if (size != *init_size_) {
      throw Error(ErrorCode::kProtocol, "contribution of size " + std::to_string(size) +
                                            " does not match " + std::to_string(*init_size_));
    }
    if (msg.body.value("last", false)) {
      if (next_row_ != 0) throw Error(ErrorCode::kProtocol, "incomplete contribution before end marker");
      finish_init();
      return;
    }
    std::uint64_t contributor = wire::u64(msg.body, "contributor");
    std::uint64_t row = wire::u64(msg.body, "row");
    if (contributor != next_contributor_ || row != next_row_) {
      throw Error(ErrorCode::kProtocolOrder, "contribution rows out of order");
    }
    const Json& entries = array_field(msg.body, "entries", size);
    std::vector<AddCiphertext> decoded;
    decoded.reserve(size);
    for (const auto& e : entries) decoded.push_back(wire::decode_add(e, k.add));
    if (!aggregate_) {
      if (next_contributor_ != 0 || row != 0) throw Error(ErrorCode::kProtocol, "aggregate missing");
      aggregate_.emplace();
      aggregate_->reserve(size * size);
    }
    if (contributor == 0) {
      for (auto& c : decoded) aggregate_->push_back(std::move(c));
    } else {
      for (std::size_t j = 0; j < size; ++j) {
        auto& slot = (*aggregate_)[row * size + j];
        slot = add_homomorphic(k.add, slot, decoded[j]);
      }
    }
    if (++next_row_ == size) {
      next_row_ = 0;
      ++next_contributor_;
    }
  }

  void finish_init() {
    const PublicKeys& k = keys();
    const std::size_t size = *init_size_;
    Rng rng = next_op_rng();
    if (!aggregate_) {
      std::vector<std::optional<AddCiphertext>> zeros(size * size);
      parallel_for(zeros.size(), y_.config_.exec, [&](std::size_t e) {
        Rng cell = rng.fork(e);
        zeros[e] = enc_add(k.add, BigInt(0), cell);
      });
      aggregate_.emplace();
      for (auto& z : zeros) aggregate_->push_back(std::move(*z));
    }
    auto db = std::make_shared<EncryptedDatabase>();
    db->size = size;
    db->cm_add = std::move(*aggregate_);
    db->cm_pairs = blind_and_convert(db->cm_add, size, next_op_rng());
    {
      std::unique_lock lock(y_.mu_);
      y_.db_ = std::move(db);
    }
    aggregate_.reset();
    init_size_.reset();
    next_contributor_ = 0;
    ch_.send(MessageType::kAck, ack(MessageType::kCmContrib));
  }

  // Pair-encodes every aggregate entry: E+(cm + b) goes through add_to_mul
  // and a client round trip that strips the Paillier layer; E*(b) is made
  // locally.
  EncryptedCoMatrix blind_and_convert(const std::vector<AddCiphertext>& cm_add, std::size_t size,
                                      Rng rng) {
    const PublicKeys& k = keys();
    EncryptedCoMatrix out{size, {}};
    out.entries.reserve(size * size);
    for (std::size_t i = 0; i < size; ++i) {
      std::vector<std::optional<NestedCiphertext>> nested(size);
      std::vector<std::optional<MulCiphertext>> lo(size);
      parallel_for(size, y_.config_.exec, [&](std::size_t j) {
        Rng cell = rng.fork(i * size + j);
        BigInt blind = cell.unit_mod(k.mul.n);
        AddCiphertext shifted = add_homomorphic(k.add, cm_add[i * size + j], enc_add(k.add, blind, cell));
        nested[j] = add_to_mul(k.add, k.mul, shifted, cell);
        lo[j] = enc_mul(k.mul, blind, cell);
      });
      Json entries = Json::array();
      for (const auto& n : nested) entries.push_back(wire::encode(*n));
      ch_.send(MessageType::kInitStripReq, Json{{"row", i}, {"entries", std::move(entries)}});
      wire::Message resp = ch_.expect(MessageType::kInitStripResp);
      if (wire::u64(resp.body, "row") != i) throw Error(ErrorCode::kProtocolOrder, "strip response for the wrong row");
      const Json& his = array_field(resp.body, "entries", size);
      for (std::size_t j = 0; j < size; ++j) {
        out.entries.push_back(PairEncodedValue{wire::decode_mul(his[j], k.mul), std::move(*lo[j])});
      }
    }
    return out;
  }

  void on_pv(const wire::Message& msg) {
    const PublicKeys& k = keys();
    auto db = ready_database();
    enter(Stage::kRecommend);
    std::size_t size = wire::u64(msg.body, "size");
    if (size != db->size) {
      throw Error(ErrorCode::kProtocol, "preference vector has " + std::to_string(size) +
                                            " items, database has " + std::to_string(db->size));
    }
    const Json& entries = array_field(msg.body, "pv", size);
    std::vector<PairEncodedValue> pv;
    pv.reserve(size);
    for (const auto& e : entries) pv.push_back(wire::decode_pair(e, k.mul));
    pv_ = std::move(pv);
  }

  void on_loc(const wire::Message& msg) {
    const PublicKeys& k = keys();
    if (state_.stage() != Stage::kRecommend || !pv_) {
      throw Error(ErrorCode::kProtocolOrder, "LOC_UPLOAD must follow PV_UPLOAD");
    }
    AddCiphertext loc = wire::decode_add(msg.body.at("loc"), k.add);
    auto db = fresh_database();

    if (!proxy_ch_) {
      proxy_conn_ = y_.proxy_connector_();
      proxy_ch_.emplace(*proxy_conn_, session());
    }
    RemoteSwitch sw(*this);
    Rng wrap_rng = next_op_rng();
    auto start = Clock::now();
    std::vector<AddCiphertext> rl =
        y_.config_.exec == Exec::kSerial
            ? recommend_encrypted_serial(k.add, k.mul, db->cm_pairs, *pv_, sw, wrap_rng)
            : recommend_encrypted(k.add, k.mul, db->cm_pairs, *pv_, sw, wrap_rng);
    y_.last_rec_seconds_.store(seconds_since(start));

    enter(Stage::kFilter);
    std::vector<LocatedScore> located = filter_by_location(rl, loc, k.add);
    Json entries = Json::array();
    for (const auto& l : located) {
      entries.push_back(Json{{"item", l.item}, {"score", wire::encode(l.score)}, {"offset", wire::encode(l.offset)}});
    }
    ch_.send(MessageType::kRlResponse, Json{{"entries", std::move(entries)}});
    pv_.reset();
  }

  // Regenerates the pair form if updates made it stale. Commits the result
  // unless another session replaced the database meanwhile.
  std::shared_ptr<const EncryptedDatabase> fresh_database() {
    auto db = ready_database();
    if (!db->pairs_stale) return db;
    auto next = std::make_shared<EncryptedDatabase>(*db);
    next->cm_pairs = blind_and_convert(next->cm_add, next->size, next_op_rng());
    next->pairs_stale = false;
    std::unique_lock lock(y_.mu_);
    if (y_.db_ == db) y_.db_ = next;
    return next;
  }

  std::vector<ProxyReply> ask_proxy(std::span<const MulToAddRound1> round1) {
    const PublicKeys& k = keys();
    const std::size_t window = std::max<std::size_t>(1, y_.config_.m2a_window);
    std::vector<ProxyReply> replies;
    replies.reserve(round1.size());
    for (std::size_t start = 0; start < round1.size(); start += window) {
      std::size_t end = std::min(round1.size(), start + window);
      for (std::size_t i = start; i < end; ++i) proxy_ch_->send(MessageType::kM2ARound1, wire::encode(round1[i]));
      for (std::size_t i = start; i < end; ++i) {
        wire::Message msg = proxy_ch_->expect(MessageType::kM2ARound2);
        replies.push_back(wire::decode_reply(msg.body, k.add));
      }
    }
    return replies;
  }

  void on_delta(const wire::Message& msg) {
    const PublicKeys& k = keys();
    auto db = ready_database();
    enter(Stage::kUpdate);
    std::size_t size = wire::u64(msg.body, "size");
    if (size != db->size) {
      throw Error(ErrorCode::kProtocol, "delta of size " + std::to_string(size) + " for a database of size " +
                                            std::to_string(db->size));
    }
    if (msg.body.value("last", false)) {
      if (delta_.size() != size * size) throw Error(ErrorCode::kProtocol, "incomplete delta before end marker");
      std::unique_lock lock(y_.mu_);
      auto next = std::make_shared<EncryptedDatabase>(*y_.db_);
      for (std::size_t e = 0; e < delta_.size(); ++e) {
        next->cm_add[e] = add_homomorphic(k.add, next->cm_add[e], delta_[e]);
      }
      next->pairs_stale = true;
      y_.db_ = std::move(next);
      lock.unlock();
      delta_.clear();
      ch_.send(MessageType::kAck, ack(MessageType::kCmDelta));
      return;
    }
    if (wire::u64(msg.body, "row") != delta_.size() / size) {
      throw Error(ErrorCode::kProtocolOrder, "delta rows out of order");
    }
    for (const auto& e : array_field(msg.body, "entries", size)) delta_.push_back(wire::decode_add(e, k.add));
  }

  ServerY& y_;
  Channel ch_;
  SessionState state_;
  std::optional<PublicKeys> keys_;
  std::optional<Rng> rng_;
  std::optional<MulToAddServer> m2a_;
  std::unique_ptr<Transport> proxy_conn_;
  std::optional<Channel> proxy_ch_;
  std::uint64_t op_counter_ = 0;

  std::optional<std::size_t> init_size_;
  std::optional<std::vector<AddCiphertext>> aggregate_;
  std::uint64_t next_contributor_ = 0;
  std::uint64_t next_row_ = 0;
  std::optional<std::vector<PairEncodedValue>> pv_;
  std::vector<AddCiphertext> delta_;
};

SessionReport ServerY::serve(Transport& client) {
  ServerYSession session(*this, client);
  return session.run();
}

// ---- proxy X ----------------------------------------------------------------

void ProxyX::preload_keys(const PublicKeys& keys, const BigInt& k0) {
  std::unique_lock lock(mu_);
  keys_ = keys;
  k0_ = k0;
}

std::vector<BigInt> ProxyX::held_secrets() const {
  std::shared_lock lock(mu_);
  std::vector<BigInt> out;
  if (k0_) out.push_back(*k0_);
  return out;
}

SessionReport ProxyX::serve(Transport& conn) {
  Channel ch(conn, std::nullopt);
  Stage stage = Stage::kSetup;
  try {
    for (;;) {
      wire::Message msg;
      try {
        msg = ch.receive();
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kTransport) break;
        throw;
      }
      if (msg.type == MessageType::kSetupKeys) {
        SetupPayload setup = decode_setup(msg.body, to_string(Role::kProxyX));
        {
          std::unique_lock lock(mu_);
          keys_ = setup.keys;
          k0_ = setup.share;
        }
        stage = Stage::kInit;
        ch.send(MessageType::kAck, ack(MessageType::kSetupKeys));
      } else if (msg.type == MessageType::kM2ARound1) {
        std::optional<PublicKeys> keys;
        BigInt k0;
        {
          std::shared_lock lock(mu_);
          keys = keys_;
          if (k0_) k0 = *k0_;
        }
        if (!keys) throw Error(ErrorCode::kProtocolOrder, "proxy has no keys");
        stage = Stage::kRecommend;
        MulToAddRound1 round1 = wire::decode_round1(msg.body, keys->add);
        ProxyReply reply{round1.exchange_id, std::nullopt};
        try {
          reply.round2 = mul_to_add_proxy(keys->add, keys->mul, round1, k0);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kRetry) throw;
        }
        ch.send(MessageType::kM2ARound2, wire::encode(reply));
        ++answered_;
      } else {
        throw Error(ErrorCode::kProtocolOrder,
                    "proxy does not accept " + std::string(wire::to_string(msg.type)));
      }
    }
  } catch (const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    if (!err || err->code() != ErrorCode::kAborted) ch.abort(stage, e.what());
    ch.close();
    return report_error(ch.session().value_or(0), stage, e);
  }
  ch.close();
  return SessionReport{ch.session().value_or(0), Stage::kClosed, std::nullopt, {}};
}

// ---- client -----------------------------------------------------------------

Client::Client(KeyMaterial keys, ClientConfig config, Transport& server_y, Transport& proxy_x)
    : keys_(std::move(keys)),
      config_(config),
      rng_(config.seed ? Rng::from_seed(*config.seed) : Rng::from_entropy()),
      decryptor_(keys_.add.sk),
      state_(rng_.next_u64()),
      to_y_(server_y, state_.id()),
      to_x_(proxy_x, state_.id()),
      y_transport_(server_y),
      x_transport_(proxy_x) {}

namespace {

// Runs a protocol step; on failure tells both peers (unless they aborted
// first) and tears the session down before rethrowing.
template <typename Fn>
auto guarded(SessionState& state, Channel& y, Channel& x, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kAborted) {
      y.abort(state.stage(), e.what());
      x.abort(state.stage(), e.what());
    }
    y.close();
    x.close();
    if (state.stage() != Stage::kClosed) state.advance(Stage::kClosed);
    throw;
  }
}

}  // namespace

void Client::setup() {
  state_.advance(Stage::kInit);
  guarded(state_, to_y_, to_x_, [&] {
    PublicKeys pub = public_keys(keys_);
    to_x_.send(MessageType::kSetupKeys, encode_setup(pub, to_string(Role::kProxyX), keys_.shares.proxy.mul));
    expect_ack(to_x_, MessageType::kSetupKeys);
    to_y_.send(MessageType::kSetupKeys, encode_setup(pub, to_string(Role::kServerY), keys_.shares.server.mul));
    expect_ack(to_y_, MessageType::kSetupKeys);
  });
  setup_done_ = true;
}

void Client::require_setup() const {
  if (!setup_done_) throw Error(ErrorCode::kProtocolOrder, "setup() must come first");
}

void Client::send_matrix_rows(MessageType type, std::size_t size,
                              const std::function<BigInt(std::size_t)>& entry) {
  Rng rng = op_stream(rng_, op_counter_++);
  for (std::size_t i = 0; i < size; ++i) {
    std::vector<std::optional<AddCiphertext>> row(size);
    parallel_for(size, config_.exec, [&](std::size_t j) {
      Rng cell = rng.fork(i * size + j);
      row[j] = enc_add(keys_.add.pk, entry(i * size + j), cell);
    });
    Json entries = Json::array();
    for (const auto& c : row) entries.push_back(wire::encode(*c));
    Json body{{"size", size}, {"row", i}, {"entries", std::move(entries)}};
    to_y_.send(type, std::move(body));
  }
}

void Client::initialize(std::size_t size, std::span<const CoMatrix> contributions) {
  require_setup();
  if (size == 0) throw Error(ErrorCode::kDomain, "matrix size must be positive");
  for (const auto& cm : contributions) {
    if (cm.size() != size) throw Error(ErrorCode::kDomain, "contributions differ in size");
  }
  std::vector<std::uint64_t> total(size * size, 0);
  for (const auto& cm : contributions) {
    for (std::size_t e = 0; e < total.size(); ++e) total[e] += cm.entries()[e];
  }
  CoMatrix aggregate(size, total);
  check_score_bound(size, config_.r_max, aggregate.max_entry(), keys_.add.pk.n);

  state_.advance(Stage::kInit);
  guarded(state_, to_y_, to_x_, [&] {
    const std::uint64_t first_op = op_counter_;
    for (std::size_t u = 0; u < contributions.size(); ++u) {
      const CoMatrix& cm = contributions[u];
      std::uint64_t contributor = u;
      Rng rng = op_stream(rng_, first_op + u);
      for (std::size_t i = 0; i < size; ++i) {
        std::vector<std::optional<AddCiphertext>> row(size);
        parallel_for(size, config_.exec, [&](std::size_t j) {
          Rng cell = rng.fork(i * size + j);
          row[j] = enc_add(keys_.add.pk, from_u64(cm.at(i, j)), cell);
        });
        Json entries = Json::array();
        for (const auto& c : row) entries.push_back(wire::encode(*c));
        to_y_.send(MessageType::kCmContrib,
                   Json{{"size", size}, {"contributor", contributor}, {"row", i}, {"entries", std::move(entries)}});
      }
    }
    op_counter_ = first_op + contributions.size();
    to_y_.send(MessageType::kCmContrib, Json{{"size", size}, {"last", true}});
    for (;;) {
      wire::Message msg = to_y_.receive();
      if (msg.type == MessageType::kInitStripReq) {
        answer_strip_request(msg);
      } else if (msg.type == MessageType::kAck) {
        if (msg.body.value("ack", std::string()) != wire::to_string(MessageType::kCmContrib)) {
          throw Error(ErrorCode::kProtocol, "acknowledgement for the wrong message");
        }
        break;
      } else {
        throw Error(ErrorCode::kProtocolOrder, "unexpected " + std::string(wire::to_string(msg.type)));
      }
    }
  });
  known_cm_max_ = aggregate.max_entry();
}

void Client::answer_strip_request(const wire::Message& req) {
  const std::uint64_t row = wire::u64(req.body, "row");
  const Json& entries = req.body.at("entries");
  if (!entries.is_array()) throw Error(ErrorCode::kProtocol, "'entries' must be an array");
  const BigInt& n = keys_.mul.pk.n;
  Rng rng = op_stream(rng_, op_counter_++);
  std::vector<std::optional<MulCiphertext>> out(entries.size());
  parallel_for(entries.size(), config_.exec, [&](std::size_t j) {
    NestedCiphertext nested = wire::decode_nested(entries[j], keys_.add.pk);
    BigInt w = decryptor_(nested.outer);
    if (w == 0 || !is_unit(w, n) || !is_unit(nested.companion, n)) {
      throw Error(ErrorCode::kZeroPlaintext, "stripped value is not a unit mod N");
    }
    // Re-randomise so Y, which picked r in add_to_mul, cannot unmask w.
    Rng cell = rng.fork(j);
    BigInt r = cell.unit_mod(n);
    out[j] = MulCiphertext(keys_.mul.pk, mod_floor(w * powm(keys_.mul.pk.h, r, n), n),
                           mod_floor(nested.companion * powm(keys_.mul.pk.g, r, n), n));
  });
  Json resp = Json::array();
  for (const auto& c : out) resp.push_back(wire::encode(*c));
  to_y_.send(MessageType::kInitStripResp, Json{{"row", row}, {"entries", std::move(resp)}});
}

RecommendationOutcome Client::recommend(const PreferenceVector& pv, GridCell location,
                                        std::int64_t radius) {
  require_setup();
  // Preconditions are checked before anything goes on the wire.
  const std::uint64_t loc_index = xy_to_index(location, config_.order).d;
  if (radius < 0) throw Error(ErrorCode::kDomain, "radius must be nonnegative");
  if (pv.empty()) throw Error(ErrorCode::kDomain, "preference vector is empty");
  for (auto r : pv) {
    if (r > config_.r_max) {
      throw Error(ErrorCode::kDomain, "rating " + std::to_string(r) + " exceeds R_max " + std::to_string(config_.r_max));
    }
  }
  check_score_bound(pv.size(), config_.r_max, known_cm_max_.value_or(config_.cm_bound), keys_.add.pk.n);

  state_.advance(Stage::kRecommend);
  return guarded(state_, to_y_, to_x_, [&] {
    RecommendationOutcome outcome;
    auto start = Clock::now();
    Rng rng = op_stream(rng_, op_counter_++);
    std::vector<std::optional<PairEncodedValue>> pairs(pv.size());
    parallel_for(pv.size(), config_.exec, [&](std::size_t j) {
      Rng cell = rng.fork(j);
      pairs[j] = pair_encode(keys_.mul.pk, BigInt(pv[j]), cell);
    });
    Rng loc_rng = rng.fork(pv.size());
    AddCiphertext loc = enc_add(keys_.add.pk, from_u64(loc_index), loc_rng);
    Json pv_json = Json::array();
    for (const auto& p : pairs) pv_json.push_back(wire::encode(*p));
    outcome.encrypt_s = seconds_since(start);

    auto sent = Clock::now();
    to_y_.send(MessageType::kPvUpload, Json{{"size", pv.size()}, {"pv", std::move(pv_json)}});
    to_y_.send(MessageType::kLocUpload, Json{{"loc", wire::encode(loc)}});
    wire::Message rl;
    for (;;) {
      wire::Message msg = to_y_.receive();
      if (msg.type == MessageType::kInitStripReq) {
        answer_strip_request(msg);
        continue;
      }
      if (msg.type != MessageType::kRlResponse) {
        throw Error(ErrorCode::kProtocolOrder, "unexpected " + std::string(wire::to_string(msg.type)));
      }
      rl = std::move(msg);
      break;
    }
    outcome.server_s = seconds_since(sent);
    state_.advance(Stage::kFilter);

    auto dec_start = Clock::now();
    const Json& entries = array_field(rl.body, "entries", pv.size());
    std::vector<LocatedScore> located;
    located.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (wire::u64(entries[i], "item") != i) throw Error(ErrorCode::kProtocol, "recommendation list out of order");
      located.push_back(LocatedScore{i, wire::decode_add(entries[i].at("score"), keys_.add.pk),
                                     wire::decode_add(entries[i].at("offset"), keys_.add.pk)});
    }
    outcome.list = client_filter(located, decryptor_, keys_.add.pk.n, radius, config_.exec);
    outcome.decrypt_s = seconds_since(dec_start);
    outcome.total_s = seconds_since(start);
    return outcome;
  });
}

void Client::update(const CoMatrix& old_cm, const CoMatrix& new_cm) {
  require_setup();
  CoMatrixDelta delta = cm_delta(old_cm, new_cm);
  std::int64_t max_growth = 0;
  for (auto d : delta.entries) max_growth = std::max(max_growth, d);
  state_.advance(Stage::kUpdate);
  guarded(state_, to_y_, to_x_, [&] {
    const BigInt& n = keys_.add.pk.n;
    send_matrix_rows(MessageType::kCmDelta, delta.size, [&](std::size_t e) {
      return mod_floor(BigInt(static_cast<long>(delta.entries[e])), n);
    });
    to_y_.send(MessageType::kCmDelta, Json{{"size", delta.size}, {"last", true}});
    expect_ack(to_y_, MessageType::kCmDelta);
  });
  if (known_cm_max_) *known_cm_max_ += static_cast<std::uint64_t>(max_growth);
}

void Client::close() {
  if (state_.stage() != Stage::kClosed) state_.advance(Stage::kClosed);
  to_y_.close();
  to_x_.close();
}

}  // namespace sherec
