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

#include "sherec/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>

#include "sherec/error.hpp"
#include "sherec/wire.hpp"

namespace sherec {
namespace {

// One direction of an in-process byte stream.
class BytePipe {
 public:
  void write(std::string_view bytes) {
    std::lock_guard lock(mu_);
    if (closed_) throw Error(ErrorCode::kTransport, "write on a closed loopback pipe");
    buf_.append(bytes);
    cv_.notify_all();
  }

  // Blocks until bytes are available; returns empty once closed and drained.
  std::string read_some() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return !buf_.empty() || closed_; });
    std::string out;
    out.swap(buf_);
    return out;
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::string buf_;
  bool closed_ = false;
};

class LoopbackTransport : public Transport {
 public:
  LoopbackTransport(std::shared_ptr<BytePipe> out, std::shared_ptr<BytePipe> in)
      : out_(std::move(out)), in_(std::move(in)) {}
  ~LoopbackTransport() override { close(); }

  void send(std::string_view payload) override { out_->write(wire::encode_frame(payload)); }

  std::string receive() override {
    for (;;) {
      if (auto frame = decoder_.next()) return *frame;
      std::string chunk = in_->read_some();
      if (chunk.empty()) throw Error(ErrorCode::kTransport, "loopback peer closed the connection");
      decoder_.feed(chunk);
    }
  }

  void close() override {
    out_->close();
    in_->close();
  }

 private:
  std::shared_ptr<BytePipe> out_;
  std::shared_ptr<BytePipe> in_;
  wire::FrameDecoder decoder_;
};

[[noreturn]] void sys_fail(const std::string& what) {
  throw Error(ErrorCode::kTransport, what + ": " + std::strerror(errno));
}

sockaddr_in resolve(const Address& addr) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(addr.port);
  std::string host = addr.host == "localhost" ? "127.0.0.1" : addr.host;
  if (host.empty() || host == "*") host = "0.0.0.0";
  if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) == 1) return sa;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    throw Error(ErrorCode::kTransport, "cannot resolve host '" + addr.host + "'");
  }
  sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return sa;
}

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback_pair() {
  auto a_to_b = std::make_shared<BytePipe>();
  auto b_to_a = std::make_shared<BytePipe>();
  return {std::make_unique<LoopbackTransport>(a_to_b, b_to_a),
          std::make_unique<LoopbackTransport>(b_to_a, a_to_b)};
}

Address parse_address(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorCode::kDomain, "address '" + std::string(text) + "' is not host:port");
  }
  std::string port_text(text.substr(colon + 1));
  char* end = nullptr;
  long port = std::strtol(port_text.c_str(), &end, 10);
  if (port_text.empty() || *end != '\0' || port < 0 || port > 65535) {
    throw Error(ErrorCode::kDomain, "bad port in address '" + std::string(text) + "'");
  }
  return Address{std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

TcpTransport::TcpTransport(int fd) : fd_(fd) {
  int one = 1;
  setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpTransport::~TcpTransport() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpTransport> TcpTransport::connect(const Address& addr) {
  sockaddr_in sa = resolve(addr);
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) sys_fail("socket");
  if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
    int saved = errno;
    ::close(fd);
    errno = saved;
    sys_fail("connect to " + addr.host + ":" + std::to_string(addr.port));
  }
  return std::make_unique<TcpTransport>(fd);
}

void TcpTransport::send(std::string_view payload) {
  std::string frame = wire::encode_frame(payload);
  std::lock_guard lock(send_mu_);
  std::size_t off = 0;
  while (off < frame.size()) {
    ssize_t n = ::send(fd_, frame.data() + off, frame.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_fail("send");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string TcpTransport::receive() {
  char buf[1 << 16];
  for (;;) {
    if (auto frame = decoder_.next()) return *frame;
    ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_fail("recv");
    }
    if (n == 0) throw Error(ErrorCode::kTransport, "peer closed the connection");
    decoder_.feed(std::string_view(buf, static_cast<std::size_t>(n)));
  }
}

void TcpTransport::close() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

TcpListener::TcpListener(const Address& addr) {
  sockaddr_in sa = resolve(addr);
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) sys_fail("socket");
  int one = 1;
  setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
    int saved = errno;
    ::close(fd_);
    errno = saved;
    sys_fail("bind " + addr.host + ":" + std::to_string(addr.port));
  }
  if (::listen(fd_, 64) != 0) sys_fail("listen");
  socklen_t len = sizeof sa;
  getsockname(fd_, reinterpret_cast<sockaddr*>(&sa), &len);
  port_ = ntohs(sa.sin_port);
}

TcpListener::~TcpListener() {
  close();
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpTransport> TcpListener::accept() {
  for (;;) {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<TcpTransport>(fd);
    if (errno == EINTR) continue;
    sys_fail("accept");
  }
}

void TcpListener::close() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Transcript::append(Direction d, std::string payload) {
  std::lock_guard lock(mu_);
  entries_.push_back(TranscriptEntry{d, std::move(payload)});
}

std::vector<TranscriptEntry> Transcript::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::string Transcript::bytes() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& e : entries_) out += wire::encode_frame(e.payload);
  return out;
}

void RecordingTransport::send(std::string_view payload) {
  transcript_->append(Direction::kSent, std::string(payload));
  inner_->send(payload);
}

std::string RecordingTransport::receive() {
  std::string payload = inner_->receive();
  transcript_->append(Direction::kReceived, payload);
  return payload;
}

}  // namespace sherec
