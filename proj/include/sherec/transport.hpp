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

#ifndef SHEREC_TRANSPORT_HPP_
#define SHEREC_TRANSPORT_HPP_

// Reliable, ordered, bidirectional frame streams. Every implementation moves
// the exact bytes produced by wire::encode_frame.

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sherec/wire.hpp"

namespace sherec {

class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(std::string_view payload) = 0;
  // Blocks for the next payload. Throws kTransport once the peer has closed
  // and no data remains.
  virtual std::string receive() = 0;
  // Idempotent; wakes any blocked receive on the peer.
  virtual void close() = 0;
};

// In-process pair; a frame sent on one end arrives at the other.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback_pair();

// host:port, IPv4. "localhost" is accepted as a host.
struct Address {
  std::string host;
  std::uint16_t port = 0;
};
Address parse_address(std::string_view text);

class TcpTransport : public Transport {
 public:
  explicit TcpTransport(int fd);
  ~TcpTransport() override;
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  static std::unique_ptr<TcpTransport> connect(const Address& addr);

  void send(std::string_view payload) override;
  std::string receive() override;
  void close() override;

 private:
  int fd_;
  std::mutex send_mu_;
  wire::FrameDecoder decoder_;
};

class TcpListener {
 public:
  explicit TcpListener(const Address& addr);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  // Throws kTransport after close().
  std::unique_ptr<TcpTransport> accept();
  void close();

 private:
  int fd_;
  std::uint16_t port_;
};

enum class Direction { kSent, kReceived };

struct TranscriptEntry {
  Direction direction;
  std::string payload;

  bool operator==(const TranscriptEntry&) const = default;
};

// Thread-safe append-only record of one connection, as seen by one end.
class Transcript {
 public:
  void append(Direction d, std::string payload);
  std::vector<TranscriptEntry> entries() const;
  // Concatenated frames, byte for byte as they crossed the transport.
  std::string bytes() const;

 private:
  mutable std::mutex mu_;
  std::vector<TranscriptEntry> entries_;
};

class RecordingTransport : public Transport {
 public:
  RecordingTransport(std::unique_ptr<Transport> inner, std::shared_ptr<Transcript> transcript)
      : inner_(std::move(inner)), transcript_(std::move(transcript)) {}

  void send(std::string_view payload) override;
  std::string receive() override;
  void close() override { inner_->close(); }

 private:
  std::unique_ptr<Transport> inner_;
  std::shared_ptr<Transcript> transcript_;
};

}  // namespace sherec

#endif  // SHEREC_TRANSPORT_HPP_
