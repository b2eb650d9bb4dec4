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

#ifndef SHEREC_DEPLOYMENT_HPP_
#define SHEREC_DEPLOYMENT_HPP_

// Wires a server Y and a proxy X together and hands out client links,
// either in-process (loopback) or over TCP on 127.0.0.1. Every session runs
// on its own threads.

#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "sherec/protocol.hpp"
#include "sherec/transport.hpp"

namespace sherec {

struct DeploymentConfig {
  ServerYConfig y;
  Exec proxy_exec = Exec::kParallel;
  // Record client<->Y and client<->X at the client end, Y<->X at the Y end.
  bool record = false;
};

struct ClientLinks {
  std::unique_ptr<Transport> to_y;
  std::unique_ptr<Transport> to_x;
};

struct LinkTranscript {
  std::string label;  // "client-y", "client-x" or "y-x"
  std::shared_ptr<Transcript> transcript;
};

class Deployment {
 public:
  virtual ~Deployment();

  ServerY& server_y() { return *y_; }
  ProxyX& proxy_x() { return *x_; }

  virtual ClientLinks open_session() = 0;

  // Waits for every session thread to finish.
  void join();
  std::vector<SessionReport> y_reports() const;
  std::vector<SessionReport> x_reports() const;
  std::vector<LinkTranscript> transcripts() const;

 protected:
  explicit Deployment(DeploymentConfig config);

  std::unique_ptr<Transport> record(std::unique_ptr<Transport> t, std::string label);
  void spawn_y(std::unique_ptr<Transport> conn);
  void spawn_x(std::unique_ptr<Transport> conn);
  virtual std::unique_ptr<Transport> connect_proxy() = 0;

  DeploymentConfig config_;
  std::unique_ptr<ServerY> y_;
  std::unique_ptr<ProxyX> x_;

 private:
  mutable std::mutex mu_;
  std::vector<std::thread> threads_;
  std::vector<SessionReport> y_reports_;
  std::vector<SessionReport> x_reports_;
  std::vector<LinkTranscript> transcripts_;
};

class LoopbackDeployment : public Deployment {
 public:
  explicit LoopbackDeployment(DeploymentConfig config = {});
  ~LoopbackDeployment() override;

  ClientLinks open_session() override;

 protected:
  std::unique_ptr<Transport> connect_proxy() override;
};

class TcpDeployment : public Deployment {
 public:
  explicit TcpDeployment(DeploymentConfig config = {});
  ~TcpDeployment() override;

  ClientLinks open_session() override;
  Address y_address() const { return {"127.0.0.1", y_listener_.port()}; }
  Address x_address() const { return {"127.0.0.1", x_listener_.port()}; }

 protected:
  std::unique_ptr<Transport> connect_proxy() override;

 private:
  void accept_loop(TcpListener& listener, bool is_y);

  TcpListener y_listener_;
  TcpListener x_listener_;
  std::thread y_acceptor_;
  std::thread x_acceptor_;
};

}  // namespace sherec

#endif  // SHEREC_DEPLOYMENT_HPP_
