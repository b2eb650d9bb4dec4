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

#include "sherec/wire.hpp"

#include <array>
#include <utility>

#include "sherec/error.hpp"

namespace sherec::wire {
namespace {

constexpr std::array<std::pair<MessageType, std::string_view>, 12> kTypeNames = {{
    {MessageType::kSetupKeys, "SETUP_KEYS"},
    {MessageType::kCmContrib, "CM_CONTRIB"},
    {MessageType::kInitStripReq, "INIT_STRIP_REQ"},
    {MessageType::kInitStripResp, "INIT_STRIP_RESP"},
    {MessageType::kPvUpload, "PV_UPLOAD"},
    {MessageType::kLocUpload, "LOC_UPLOAD"},
    {MessageType::kM2ARound1, "M2A_ROUND1"},
    {MessageType::kM2ARound2, "M2A_ROUND2"},
    {MessageType::kRlResponse, "RL_RESPONSE"},
    {MessageType::kCmDelta, "CM_DELTA"},
    {MessageType::kAck, "ACK"},
    {MessageType::kAbort, "ABORT"},
}};

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::kProtocol, what); }

const Json& field(const Json& obj, std::string_view key) {
  if (!obj.is_object()) malformed("expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) malformed("missing field '" + std::string(key) + "'");
  return *it;
}

BigInt parse_hex_value(const Json& v, std::string_view what) {
  if (!v.is_string()) malformed(std::string(what) + " must be a hex string");
  return from_hex(v.get_ref<const std::string&>());
}

}  // namespace

std::string_view to_string(MessageType type) {
  for (const auto& [t, name] : kTypeNames) {
    if (t == type) return name;
  }
  return "UNKNOWN";
}

MessageType parse_message_type(std::string_view name) {
  for (const auto& [t, n] : kTypeNames) {
    if (n == name) return t;
  }
  malformed("unknown message type '" + std::string(name) + "'");
}

std::string serialize(const Message& msg) {
  Json obj = msg.body.is_null() ? Json::object() : msg.body;
  if (!obj.is_object()) malformed("message body must be an object");
  obj["type"] = std::string(to_string(msg.type));
  obj["session"] = msg.session;
  obj["seq"] = msg.seq;
  return obj.dump();
}

Message parse(std::string_view payload) {
  Json obj = Json::parse(payload.begin(), payload.end(), nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) malformed("payload is not a JSON object");
  Message msg;
  const Json& type = field(obj, "type");
  if (!type.is_string()) malformed("'type' must be a string");
  msg.type = parse_message_type(type.get_ref<const std::string&>());
  msg.session = u64(obj, "session");
  msg.seq = u64(obj, "seq");
  obj.erase("type");
  obj.erase("session");
  obj.erase("seq");
  msg.body = std::move(obj);
  return msg;
}

std::string encode_frame(std::string_view payload) {
  if (payload.size() > kMaxFrameBytes) malformed("frame exceeds the size limit");
  std::string out;
  out.reserve(payload.size() + 4);
  auto len = static_cast<std::uint32_t>(payload.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((len >> shift) & 0xff));
  out.append(payload);
  return out;
}

void FrameDecoder::feed(std::string_view bytes) {
  if (pos_ > 0 && pos_ == buf_.size()) {
    buf_.clear();
    pos_ = 0;
  }
  buf_.append(bytes);
}

std::optional<std::string> FrameDecoder::next() {
  if (buffered() < 4) return std::nullopt;
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len = (len << 8) | static_cast<unsigned char>(buf_[pos_ + i]);
  if (len > kMaxFrameBytes) malformed("incoming frame of " + std::to_string(len) + " bytes exceeds the limit");
  if (buffered() < 4 + std::size_t{len}) return std::nullopt;
  std::string payload = buf_.substr(pos_ + 4, len);
  pos_ += 4 + len;
  if (pos_ > (std::size_t{1} << 20) && pos_ * 2 > buf_.size()) {
    buf_.erase(0, pos_);
    pos_ = 0;
  }
  return payload;
}

Json hex(const BigInt& v) { return to_hex(v); }

BigInt big(const Json& obj, std::string_view key) { return parse_hex_value(field(obj, key), key); }

std::uint64_t u64(const Json& obj, std::string_view key) {
  const Json& v = field(obj, key);
  if (!v.is_number_unsigned()) malformed("'" + std::string(key) + "' must be an unsigned integer");
  return v.get<std::uint64_t>();
}

Json encode(const AddCiphertext& c) { return hex(c.value()); }

AddCiphertext decode_add(const Json& v, const AddPublicKey& pk) {
  return AddCiphertext(pk, parse_hex_value(v, "Paillier ciphertext"));
}

Json encode(const MulCiphertext& c) { return Json{{"c1", hex(c.c1())}, {"c2", hex(c.c2())}}; }

MulCiphertext decode_mul(const Json& v, const MulPublicKey& pk) {
  return MulCiphertext(pk, big(v, "c1"), big(v, "c2"));
}

Json encode(const PairEncodedValue& p) { return Json{{"hi", encode(p.hi)}, {"lo", encode(p.lo)}}; }

PairEncodedValue decode_pair(const Json& v, const MulPublicKey& pk) {
  return PairEncodedValue{decode_mul(field(v, "hi"), pk), decode_mul(field(v, "lo"), pk)};
}

Json encode(const NestedCiphertext& n) {
  return Json{{"outer", encode(n.outer)}, {"comp", hex(n.companion)}};
}

NestedCiphertext decode_nested(const Json& v, const AddPublicKey& pk) {
  return NestedCiphertext{decode_add(field(v, "outer"), pk), big(v, "comp")};
}

Json encode(const MulToAddRound1& r) {
  return Json{{"exchange_id", r.exchange_id},
              {"nested_outer", encode(r.nested.outer)},
              {"nested_comp", hex(r.nested.companion)},
              {"c_prime", hex(r.c_prime)},
              {"big_r", hex(r.big_r)}};
}

MulToAddRound1 decode_round1(const Json& v, const AddPublicKey& pk) {
  return MulToAddRound1{u64(v, "exchange_id"),
                        NestedCiphertext{decode_add(field(v, "nested_outer"), pk), big(v, "nested_comp")},
                        big(v, "c_prime"), big(v, "big_r")};
}

Json encode(const ProxyReply& r) {
  if (!r.round2) return Json{{"exchange_id", r.exchange_id}, {"retry", true}};
  return Json{{"exchange_id", r.exchange_id},
              {"c_dprime", encode(r.round2->c_double_prime)},
              {"r_prime", hex(r.round2->r_prime)}};
}

ProxyReply decode_reply(const Json& v, const AddPublicKey& pk) {
  ProxyReply reply;
  reply.exchange_id = u64(v, "exchange_id");
  if (v.contains("retry")) {
    if (!v["retry"].is_boolean() || !v["retry"].get<bool>()) malformed("'retry' must be true when present");
    return reply;
  }
  reply.round2 = MulToAddRound2{reply.exchange_id, decode_add(field(v, "c_dprime"), pk), big(v, "r_prime")};
  return reply;
}

}  // namespace sherec::wire
