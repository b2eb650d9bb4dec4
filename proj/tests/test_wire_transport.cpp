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

#include <thread>

#include "sherec/transport.hpp"
#include "sherec/wire.hpp"
#include "test_keys.hpp"

namespace sherec {
namespace {

using wire::Json;
using wire::MessageType;

TEST(Wire, SerializeIsCanonical) {
  wire::Message msg{MessageType::kLocUpload, 7, 2, Json{{"loc", "1f"}}};
  const std::string payload = wire::serialize(msg);
  EXPECT_EQ(payload, R"({"loc":"1f","seq":2,"session":7,"type":"LOC_UPLOAD"})");
  const std::string frame = wire::encode_frame(payload);
  ASSERT_EQ(frame.size(), payload.size() + 4);
  EXPECT_EQ(frame.substr(0, 4), std::string("\x00\x00\x00\x34", 4));
  wire::Message back = wire::parse(payload);
  EXPECT_EQ(back.type, MessageType::kLocUpload);
  EXPECT_EQ(back.session, 7u);
  EXPECT_EQ(back.seq, 2u);
  EXPECT_EQ(back.body, (Json{{"loc", "1f"}}));
}

TEST(Wire, AllTypeNamesRoundtrip) {
  for (int t = 0; t <= static_cast<int>(MessageType::kAbort); ++t) {
    auto type = static_cast<MessageType>(t);
    EXPECT_EQ(wire::parse_message_type(wire::to_string(type)), type);
  }
  EXPECT_THROW(wire::parse_message_type("HELLO"), Error);
}

TEST(Wire, MalformedPayloadsRejected) {
  for (const char* bad : {"", "[]", "{", R"({"seq":0,"session":1})", R"({"type":"ACK","session":1})",
                          R"({"type":"ACK","session":-1,"seq":0})", R"({"type":7,"session":1,"seq":0})",
                          R"({"type":"NOPE","session":1,"seq":0})"}) {
    try {
      wire::parse(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kProtocol) << bad;
    }
  }
}

TEST(Wire, FrameDecoderHandlesSplitsAndBatches) {
  std::string stream = wire::encode_frame("abc") + wire::encode_frame("") + wire::encode_frame("hello");
  wire::FrameDecoder dec;
  std::vector<std::string> got;
  for (char c : stream) {
    dec.feed(std::string_view(&c, 1));
    while (auto p = dec.next()) got.push_back(*p);
  }
  EXPECT_EQ(got, (std::vector<std::string>{"abc", "", "hello"}));
  EXPECT_EQ(dec.buffered(), 0u);
}

TEST(Wire, OversizedFrameRejected) {
  wire::FrameDecoder dec;
  dec.feed(std::string("\xff\xff\xff\xff", 4));
  EXPECT_THROW(dec.next(), Error);
}

TEST(Wire, CiphertextCodecsRoundtrip) {
  const KeyMaterial& k = testing::small_keys();
  Rng rng = Rng::from_seed(50);
  AddCiphertext a = enc_add(k.add.pk, BigInt(9), rng);
  EXPECT_EQ(wire::decode_add(wire::encode(a), k.add.pk), a);
  PairEncodedValue p = pair_encode(k.mul.pk, BigInt(0), rng);
  EXPECT_EQ(wire::decode_pair(wire::encode(p), k.mul.pk), p);
  NestedCiphertext n = add_to_mul(k.add.pk, k.mul.pk, a, rng);
  NestedCiphertext n2 = wire::decode_nested(wire::encode(n), k.add.pk);
  EXPECT_EQ(n2.outer, n.outer);
  EXPECT_EQ(n2.companion, n.companion);

  auto [r1, state] = mul_to_add_server_round1(k.mul.pk, n, k.shares.server.mul, 12, rng);
  Json j1 = wire::encode(r1);
  for (const char* key : {"exchange_id", "nested_outer", "nested_comp", "c_prime", "big_r"}) EXPECT_TRUE(j1.contains(key));
  MulToAddRound1 back = wire::decode_round1(j1, k.add.pk);
  EXPECT_EQ(back.exchange_id, 12u);
  EXPECT_EQ(back.c_prime, r1.c_prime);

  ProxyReply reply{12, mul_to_add_proxy(k.add.pk, k.mul.pk, r1, k.shares.proxy.mul)};
  Json j2 = wire::encode(reply);
  for (const char* key : {"exchange_id", "c_dprime", "r_prime"}) EXPECT_TRUE(j2.contains(key));
  EXPECT_EQ(wire::decode_reply(j2, k.add.pk).round2->r_prime, reply.round2->r_prime);
  ProxyReply retry = wire::decode_reply(wire::encode(ProxyReply{13, std::nullopt}), k.add.pk);
  EXPECT_FALSE(retry.round2.has_value());
  EXPECT_THROW(wire::decode_reply(Json{{"exchange_id", 1}, {"retry", false}}, k.add.pk), Error);
}

TEST(Wire, DecodersValidateRanges) {
  const KeyMaterial& k = testing::tiny_keys();
  EXPECT_THROW(wire::decode_add(Json("4fe2"), k.add.pk), Error);           // >= N^2
  EXPECT_THROW(wire::decode_mul(Json{{"c1", "0"}, {"c2", "5"}}, k.mul.pk), Error);
  EXPECT_THROW(wire::decode_mul(Json{{"c1", "05"}, {"c2", "5"}}, k.mul.pk), Error);
  EXPECT_THROW(wire::decode_mul(Json{{"c1", 5}, {"c2", "5"}}, k.mul.pk), Error);
}

// ---- transports ---------------------------------------------------------------

TEST(Loopback, DeliversInOrderAndSignalsClose) {
  auto [a, b] = make_loopback_pair();
  a->send("one");
  a->send("two");
  EXPECT_EQ(b->receive(), "one");
  EXPECT_EQ(b->receive(), "two");
  std::thread t([&] { b->send("back"); });
  EXPECT_EQ(a->receive(), "back");
  t.join();
  a->close();
  try {
    b->receive();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransport);
  }
  EXPECT_THROW(a->send("late"), Error);
}

TEST(Loopback, CloseWakesBlockedReceiver) {
  auto [a, b] = make_loopback_pair();
  std::thread t([&] { EXPECT_THROW(b->receive(), Error); });
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  a->close();
  t.join();
}

TEST(Tcp, RoundtripLargeFrames) {
  TcpListener listener(parse_address("127.0.0.1:0"));
  ASSERT_NE(listener.port(), 0);
  std::string big(3 << 20, 'x');
  std::thread server([&] {
    auto conn = listener.accept();
    for (int i = 0; i < 3; ++i) conn->send(conn->receive());
  });
  auto client = TcpTransport::connect(Address{"localhost", listener.port()});
  client->send("small");
  client->send(big);
  client->send("");
  EXPECT_EQ(client->receive(), "small");
  EXPECT_EQ(client->receive(), big);
  EXPECT_EQ(client->receive(), "");
  server.join();
  EXPECT_THROW(client->receive(), Error);
}

TEST(Tcp, AddressParsing) {
  Address a = parse_address("127.0.0.1:8080");
  EXPECT_EQ(a.host, "127.0.0.1");
  EXPECT_EQ(a.port, 8080);
  for (const char* bad : {"", "host", "1.2.3.4:", ":80", "1.2.3.4:99999", "1.2.3.4:x"}) {
    EXPECT_THROW(parse_address(bad), Error) << bad;
  }
}

TEST(Recording, CapturesBothDirections) {
  auto [a, b] = make_loopback_pair();
  auto transcript = std::make_shared<Transcript>();
  RecordingTransport rec(std::move(a), transcript);
  rec.send("ping");
  b->send("pong");
  EXPECT_EQ(rec.receive(), "pong");
  auto entries = transcript->entries();
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0], (TranscriptEntry{Direction::kSent, "ping"}));
  EXPECT_EQ(entries[1], (TranscriptEntry{Direction::kReceived, "pong"}));
  EXPECT_EQ(transcript->bytes(), wire::encode_frame("ping") + wire::encode_frame("pong"));
}

}  // namespace
}  // namespace sherec
