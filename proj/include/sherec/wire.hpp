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

#ifndef SHEREC_WIRE_HPP_
#define SHEREC_WIRE_HPP_

// Frame: 4-byte big-endian payload length, then a UTF-8 JSON object with
// mandatory "type", "session" and "seq" fields. Big integers travel as
// lowercase hex strings. Keys are emitted in sorted order, so a message has
// exactly one encoding. See docs/wire.md.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "sherec/she_switch.hpp"

namespace sherec::wire {

using Json = nlohmann::json;

inline constexpr std::size_t kMaxFrameBytes = std::size_t{64} << 20;

enum class MessageType {
  kSetupKeys,
  kCmContrib,
  kInitStripReq,
  kInitStripResp,
  kPvUpload,
  kLocUpload,
  kM2ARound1,
  kM2ARound2,
  kRlResponse,
  kCmDelta,
  kAck,
  kAbort,
};

std::string_view to_string(MessageType type);
// Throws kProtocol for an unknown name.
MessageType parse_message_type(std::string_view name);

struct Message {
  MessageType type = MessageType::kAbort;
  std::uint64_t session = 0;
  std::uint64_t seq = 0;
  Json body = Json::object();
};

std::string serialize(const Message& msg);
Message parse(std::string_view payload);

std::string encode_frame(std::string_view payload);

// Incremental decoder for a byte stream of frames.
class FrameDecoder {
 public:
  void feed(std::string_view bytes);
  // Next complete payload, if any. Throws kProtocol on an oversized frame.
  std::optional<std::string> next();
  std::size_t buffered() const { return buf_.size() - pos_; }

 private:
  std::string buf_;
  std::size_t pos_ = 0;
};

// ---- field codecs ----------------------------------------------------------

Json hex(const BigInt& v);
// Throws kProtocol when the field is missing or not a canonical hex string.
BigInt big(const Json& obj, std::string_view key);
std::uint64_t u64(const Json& obj, std::string_view key);

Json encode(const AddCiphertext& c);
AddCiphertext decode_add(const Json& v, const AddPublicKey& pk);

Json encode(const MulCiphertext& c);
MulCiphertext decode_mul(const Json& v, const MulPublicKey& pk);

Json encode(const PairEncodedValue& p);
PairEncodedValue decode_pair(const Json& v, const MulPublicKey& pk);

Json encode(const NestedCiphertext& n);
NestedCiphertext decode_nested(const Json& v, const AddPublicKey& pk);

Json encode(const MulToAddRound1& r);
MulToAddRound1 decode_round1(const Json& v, const AddPublicKey& pk);

// A reply without round2 is the proxy's retry signal.
Json encode(const ProxyReply& r);
ProxyReply decode_reply(const Json& v, const AddPublicKey& pk);

}  // namespace sherec::wire

#endif  // SHEREC_WIRE_HPP_
