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

#include "sherec/bench.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

namespace sherec {

namespace {

std::string dump_list(const std::vector<Recommendation>& list) {
  std::ostringstream out;
  for (const auto& r : list) out << " (" << r.item << "," << r.score << "," << r.offset << ")";
  return out.str();
}

std::string dump_instance(const ScenarioParams& p, const ScenarioResult& r) {
  std::ostringstream out;
  out << "oracle mismatch: size=" << p.size << " users=" << p.users << " seed=" << p.seed
      << " radius=" << p.radius << " loc=(" << r.data.location.x << "," << r.data.location.y << ")\n";
  for (const auto& [user, items] : r.data.lists) {
    out << "  " << user << ":";
    for (auto i : items) out << " " << i;
    out << "\n";
  }
  out << "  pv:";
  for (auto v : r.data.pvs.at(r.data.query_user)) out << " " << v;
  out << "\n  expected:" << dump_list(r.expected) << "\n  got:     " << dump_list(r.encrypted);
  return out.str();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::string> cells(const BenchRow& r, bool external) {
  std::vector<std::string> out{std::to_string(r.size), fmt(r.enc_time_s), fmt(r.rec_time_s),
                               fmt(r.dec_time_s),       fmt(r.plain_total_s), fmt(r.enc_total_s)};
  if (external) {
    auto it = external_baseline().find(r.size);
    out.push_back(it == external_baseline().end() ? "n/a" : fmt(it->second));
  }
  return out;
}

std::vector<std::string> header(bool external) {
  std::vector<std::string> h{"size", "enc_time_s", "rec_time_s", "dec_time_s", "plain_total_s", "enc_total_s"};
  if (external) h.push_back("external_fhe_s");
  return h;
}

}  // namespace

ScenarioResult run_scenario(const KeyMaterial& keys, const ScenarioParams& p) {
  ScenarioResult result;
  result.data = gen_data(GenDataParams{p.size, p.users, p.seed});
  Dataset& data = result.data;
  if (p.pv_override) {
    if (p.pv_override->size() != p.size) throw Error(ErrorCode::kDomain, "pv override has the wrong size");
    data.pvs[data.query_user] = *p.pv_override;
  }
  const PreferenceVector& pv = data.pvs.at(data.query_user);
  const std::uint64_t loc_index = xy_to_index(data.location, data.order).d;

  auto plain_start = std::chrono::steady_clock::now();
  CoMatrix cm = build_cm(data.lists, p.size);
  result.expected = plain_filter(predict_plain(cm, pv), loc_index, p.radius);
  result.plain_total_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - plain_start).count();

  DeploymentConfig dc;
  dc.y.seed = p.seed;
  dc.y.exec = p.exec;
  dc.proxy_exec = p.exec;
  dc.record = p.record;
  std::unique_ptr<Deployment> dep;
  if (p.tcp) {
    dep = std::make_unique<TcpDeployment>(dc);
  } else {
    dep = std::make_unique<LoopbackDeployment>(dc);
  }
  {
    ClientLinks links = dep->open_session();
    ClientConfig cc;
    cc.seed = p.seed;
    cc.order = data.order;
    cc.exec = p.exec;
    Client client(keys, cc, *links.to_y, *links.to_x);
    client.setup();
    std::vector<CoMatrix> contributions = data.user_matrices();
    client.initialize(p.size, contributions);
    result.timing = client.recommend(pv, data.location, p.radius);
    client.close();
    dep->join();
  }
  result.encrypted = result.timing.list;
  result.rec_time_s = dep->server_y().last_recommendation_seconds();
  result.transcripts = dep->transcripts();
  result.reports = dep->y_reports();
  for (auto& r : dep->x_reports()) result.reports.push_back(r);
  for (const auto& r : result.reports) {
    if (r.error) throw Error(*r.error, "server session failed: " + r.message);
  }
  if (result.encrypted != result.expected) throw Error(ErrorCode::kOracleMismatch, dump_instance(p, result));
  return result;
}

const std::map<std::size_t, double>& external_baseline() {
  static const std::map<std::size_t, double> values{
      {10, 2.79}, {20, 5.48}, {40, 11.13}, {80, 22.32}, {100, 28.03}, {1000, 269.47}};
  return values;
}

std::vector<BenchRow> bench(const BenchConfig& config, std::ostream* log) {
  if (config.sizes.empty()) throw Error(ErrorCode::kDomain, "bench needs at least one size");
  if (config.repetitions == 0) throw Error(ErrorCode::kDomain, "repetitions must be at least 1");
  for (auto s : config.sizes) {
    if (s == 0) throw Error(ErrorCode::kDomain, "sizes must be positive");
  }
  Rng key_rng = Rng::from_seed(config.seed);
  KeyMaterial keys = keygen(config.security_bits, key_rng);

  if (config.warmup) {
    ScenarioParams warm;
    warm.size = std::min<std::size_t>(config.sizes.front(), 4);
    warm.seed = config.seed;
    warm.exec = config.exec;
    run_scenario(keys, warm);
  }

  std::vector<BenchRow> rows;
  for (auto size : config.sizes) {
    BenchRow row;
    row.size = size;
    for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
      ScenarioParams p;
      p.size = size;
      p.seed = config.seed + rep;
      p.exec = config.exec;
      ScenarioResult r = run_scenario(keys, p);
      row.enc_time_s += r.timing.encrypt_s;
      row.rec_time_s += r.rec_time_s;
      row.dec_time_s += r.timing.decrypt_s;
      row.plain_total_s += r.plain_total_s;
      row.enc_total_s += r.timing.total_s;
      if (log) *log << "size " << size << " rep " << rep + 1 << "/" << config.repetitions << " rec " << r.rec_time_s << " s\n";
    }
    double n = static_cast<double>(config.repetitions);
    row.enc_time_s /= n;
    row.rec_time_s /= n;
    row.dec_time_s /= n;
    row.plain_total_s /= n;
    row.enc_total_s /= n;
    rows.push_back(row);
  }
  return rows;
}

std::string format_table(const std::vector<BenchRow>& rows, bool external) {
  std::vector<std::vector<std::string>> grid{header(external)};
  for (const auto& r : rows) grid.push_back(cells(r, external));
  std::vector<std::size_t> width(grid[0].size(), 0);
  for (const auto& line : grid) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::ostringstream out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t c = 0; c < grid[k].size(); ++c) {
      if (c) out << "  ";
      out << std::string(width[c] - grid[k][c].size(), ' ') << grid[k][c];
    }
    out << "\n";
    if (k == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out << std::string(total - 2, '-') << "\n";
    }
  }
  return out.str();
}

std::string format_csv(const std::vector<BenchRow>& rows, bool external) {
  std::ostringstream out;
  auto h = header(external);
  for (std::size_t c = 0; c < h.size(); ++c) out << (c ? "," : "") << h[c];
  out << "\n";
  for (const auto& r : rows) {
    auto line = cells(r, external);
    for (std::size_t c = 0; c < line.size(); ++c) out << (c ? "," : "") << line[c];
    out << "\n";
  }
  return out.str();
}

std::vector<BenchRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("size,enc_time_s", 0) != 0) {
    throw Error(ErrorCode::kIo, "bench csv: missing header");
  }
  std::vector<BenchRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> f;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() < 6) throw Error(ErrorCode::kIo, "bench csv: short row '" + line + "'");
    try {
      rows.push_back(BenchRow{std::stoull(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3]),
                              std::stod(f[4]), std::stod(f[5])});
    } catch (const std::exception&) {
      throw Error(ErrorCode::kIo, "bench csv: bad number in '" + line + "'");
    }
  }
  return rows;
}

}  // namespace sherec
