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

#include "sherec/deployment.hpp"

namespace sherec {

Deployment::Deployment(DeploymentConfig config) : config_(config) {
  y_ = std::make_unique<ServerY>(config_.y, [this] { return record(connect_proxy(), "y-x"); });
  x_ = std::make_unique<ProxyX>(config_.proxy_exec);
}

Deployment::~Deployment() { join(); }

void Deployment::join() {
  std::vector<std::thread> threads;
  for (;;) {
    {
      std::lock_guard lock(mu_);
      threads.swap(threads_);
    }
    if (threads.empty()) return;
    for (auto& t : threads) t.join();
    threads.clear();
  }
}

std::vector<SessionReport> Deployment::y_reports() const {
  std::lock_guard lock(mu_);
  return y_reports_;
}

std::vector<SessionReport> Deployment::x_reports() const {
  std::lock_guard lock(mu_);
  return x_reports_;
}

std::vector<LinkTranscript> Deployment::transcripts() const {
  std::lock_guard lock(mu_);
  return transcripts_;
}

std::unique_ptr<Transport> Deployment::record(std::unique_ptr<Transport> t, std::string label) {
  if (!config_.record) return t;
  auto transcript = std::make_shared<Transcript>();
  {
    std::lock_guard lock(mu_);
    transcripts_.push_back(LinkTranscript{std::move(label), transcript});
  }
  return std::make_unique<RecordingTransport>(std::move(t), transcript);
}

void Deployment::spawn_y(std::unique_ptr<Transport> conn) {
  std::lock_guard lock(mu_);
  threads_.emplace_back([this, c = std::shared_ptr<Transport>(std::move(conn))] {
    SessionReport r = y_->serve(*c);
    std::lock_guard inner(mu_);
    y_reports_.push_back(std::move(r));
  });
}

void Deployment::spawn_x(std::unique_ptr<Transport> conn) {
  std::lock_guard lock(mu_);
  threads_.emplace_back([this, c = std::shared_ptr<Transport>(std::move(conn))] {
    SessionReport r = x_->serve(*c);
    std::lock_guard inner(mu_);
    x_reports_.push_back(std::move(r));
  });
}

// ---- loopback ---------------------------------------------------------------

LoopbackDeployment::LoopbackDeployment(DeploymentConfig config) : Deployment(config) {}

LoopbackDeployment::~LoopbackDeployment() { join(); }

ClientLinks LoopbackDeployment::open_session() {
  auto [cy, yc] = make_loopback_pair();
  auto [cx, xc] = make_loopback_pair();
  spawn_y(std::move(yc));
  spawn_x(std::move(xc));
  return ClientLinks{record(std::move(cy), "client-y"), record(std::move(cx), "client-x")};
}

std::unique_ptr<Transport> LoopbackDeployment::connect_proxy() {
  auto [yx, xy] = make_loopback_pair();
  spawn_x(std::move(xy));
  return std::move(yx);
}

// ---- tcp --------------------------------------------------------------------

TcpDeployment::TcpDeployment(DeploymentConfig config)
    : Deployment(config), y_listener_(Address{"127.0.0.1", 0}), x_listener_(Address{"127.0.0.1", 0}) {
  y_acceptor_ = std::thread([this] { accept_loop(y_listener_, true); });
  x_acceptor_ = std::thread([this] { accept_loop(x_listener_, false); });
}

TcpDeployment::~TcpDeployment() {
  join();
  y_listener_.close();
  x_listener_.close();
  y_acceptor_.join();
  x_acceptor_.join();
  join();
}

void TcpDeployment::accept_loop(TcpListener& listener, bool is_y) {
  for (;;) {
    std::unique_ptr<Transport> conn;
    try {
      conn = listener.accept();
    } catch (const Error&) {
      return;
    }
    if (is_y) {
      spawn_y(std::move(conn));
    } else {
      spawn_x(std::move(conn));
    }
  }
}

ClientLinks TcpDeployment::open_session() {
  return ClientLinks{record(TcpTransport::connect(y_address()), "client-y"),
                     record(TcpTransport::connect(x_address()), "client-x")};
}

std::unique_ptr<Transport> TcpDeployment::connect_proxy() { return TcpTransport::connect(x_address()); }

}  // namespace sherec
