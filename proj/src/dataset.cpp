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

#include "sherec/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sherec/wire.hpp"

namespace sherec {

namespace fs = std::filesystem;

namespace {

std::uint64_t uniform(Rng& rng, std::uint64_t bound) { return to_u64(rng.below(from_u64(bound))); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::uint64_t parse_u64(const std::string& s, const fs::path& file) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    if (s.empty() || s.front() == '-') throw std::invalid_argument(s);
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw Error(ErrorCode::kIo, file.string() + ": not a nonnegative integer: '" + s + "'");
  }
  return v;
}

std::vector<std::string> read_lines(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + file.string());
  return out;
}

std::size_t read_size_header(const std::vector<std::string>& lines, const fs::path& file) {
  if (lines.empty()) throw Error(ErrorCode::kIo, file.string() + ": empty file");
  auto head = split(lines[0], ',');
  if (head.size() != 2 || head[0] != "size") throw Error(ErrorCode::kIo, file.string() + ": expected 'size,<n>'");
  return parse_u64(head[1], file);
}

template <typename T>
std::vector<T> parse_row(const std::string& line, std::size_t expected, const fs::path& file) {
  auto cells = split(line, ',');
  if (cells.size() != expected) {
    throw Error(ErrorCode::kIo, file.string() + ": row has " + std::to_string(cells.size()) +
                                    " cells, expected " + std::to_string(expected));
  }
  std::vector<T> out;
  for (const auto& c : cells) out.push_back(static_cast<T>(parse_u64(c, file)));
  return out;
}

wire::Json read_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + file.string());
  try {
    return wire::Json::parse(in);
  } catch (const wire::Json::exception& e) {
    throw Error(ErrorCode::kIo, file.string() + ": " + e.what());
  }
}

void write_json(const wire::Json& j, const fs::path& file) { open_out(file) << j.dump(2) << "\n"; }

wire::Json public_json(const PublicKeys& k) {
  return wire::Json{{"n", to_hex(k.mul.n)}, {"g", to_hex(k.mul.g)}, {"h", to_hex(k.mul.h)}};
}

PublicKeys public_from_json(const wire::Json& j) {
  BigInt n = wire::big(j, "n");
  return PublicKeys{AddPublicKey::from_modulus(n), MulPublicKey{n, wire::big(j, "g"), wire::big(j, "h")}};
}

}  // namespace

std::vector<CoMatrix> Dataset::user_matrices() const {
  std::vector<CoMatrix> out;
  for (const auto& [user, items] : lists) out.push_back(build_cm(InversionList{{user, items}}, pois));
  return out;
}

unsigned order_for(std::size_t pois) {
  unsigned order = 1;
  while (cell_count(order) < pois) ++order;
  return order;
}

Dataset gen_data(const GenDataParams& params) {
  if (params.pois == 0) throw Error(ErrorCode::kDomain, "gen_data needs at least one POI");
  if (params.users == 0) throw Error(ErrorCode::kDomain, "gen_data needs at least one user");
  if (params.r_max == 0) throw Error(ErrorCode::kDomain, "r_max must be positive");
  Dataset d;
  d.pois = params.pois;
  d.order = params.order == 0 ? order_for(params.pois) : params.order;
  if (d.order > kMaxHilbertOrder || cell_count(d.order) < params.pois) {
    throw Error(ErrorCode::kDomain, "Hilbert order " + std::to_string(d.order) + " cannot hold " +
                                        std::to_string(params.pois) + " POIs");
  }
  Rng rng = Rng::from_seed(params.seed);
  const std::size_t max_visits = std::max<std::size_t>(1, std::min(params.max_visits, params.pois));
  const int width = static_cast<int>(std::to_string(params.users - 1).size());
  for (std::size_t u = 0; u < params.users; ++u) {
    std::string id = std::to_string(u);
    id = "u" + std::string(width - id.size(), '0') + id;
    std::size_t visits = 1 + uniform(rng, max_visits);
    ItemSet items;
    while (items.size() < visits) items.insert(uniform(rng, params.pois));
    PreferenceVector pv(params.pois, 0);
    for (auto i : items) pv[i] = static_cast<std::uint32_t>(1 + uniform(rng, params.r_max));
    d.lists.emplace(id, std::move(items));
    d.pvs.emplace(id, std::move(pv));
    if (u == 0) d.query_user = id;
  }
  d.location = d.placement(uniform(rng, params.pois));
  return d;
}

void write_cm_csv(const CoMatrix& cm, const fs::path& file) {
  auto out = open_out(file);
  out << "size," << cm.size() << "\n";
  for (std::size_t i = 0; i < cm.size(); ++i) {
    for (std::size_t j = 0; j < cm.size(); ++j) out << (j ? "," : "") << cm.at(i, j);
    out << "\n";
  }
}

CoMatrix read_cm_csv(const fs::path& file) {
  auto lines = read_lines(file);
  std::size_t size = read_size_header(lines, file);
  if (lines.size() != size + 1) throw Error(ErrorCode::kIo, file.string() + ": wrong number of rows");
  std::vector<std::uint64_t> all;
  for (std::size_t i = 0; i < size; ++i) {
    auto row = parse_row<std::uint64_t>(lines[i + 1], size, file);
    all.insert(all.end(), row.begin(), row.end());
  }
  return CoMatrix(size, std::move(all));
}

void write_pv_csv(const PreferenceVector& pv, const fs::path& file) {
  auto out = open_out(file);
  out << "size," << pv.size() << "\n";
  for (std::size_t j = 0; j < pv.size(); ++j) out << (j ? "," : "") << pv[j];
  out << "\n";
}

PreferenceVector read_pv_csv(const fs::path& file) {
  auto lines = read_lines(file);
  std::size_t size = read_size_header(lines, file);
  if (lines.size() != 2) throw Error(ErrorCode::kIo, file.string() + ": expected one row of ratings");
  return parse_row<std::uint32_t>(lines[1], size, file);
}

void write_dataset(const Dataset& d, const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "meta.csv");
    out << "pois,order,query_user,x,y\n"
        << d.pois << "," << d.order << "," << d.query_user << "," << d.location.x << "," << d.location.y << "\n";
  }
  {
    auto out = open_out(dir / "inversion_lists.csv");
    out << "user,items\n";
    for (const auto& [user, items] : d.lists) {
      out << user << ",";
      bool first = true;
      for (auto i : items) {
        out << (first ? "" : " ") << i;
        first = false;
      }
      out << "\n";
    }
  }
  {
    auto out = open_out(dir / "pvs.csv");
    out << "user";
    for (std::size_t j = 0; j < d.pois; ++j) out << ",r" << j;
    out << "\n";
    for (const auto& [user, pv] : d.pvs) {
      out << user;
      for (auto r : pv) out << "," << r;
      out << "\n";
    }
  }
  write_pv_csv(d.pvs.at(d.query_user), dir / "pv.csv");
  {
    auto out = open_out(dir / "pois.csv");
    out << "item,hilbert_index,x,y\n";
    for (std::size_t i = 0; i < d.pois; ++i) {
      GridCell c = d.placement(i);
      out << i << "," << i << "," << c.x << "," << c.y << "\n";
    }
  }
  open_out(dir / "location.csv") << "x,y\n" << d.location.x << "," << d.location.y << "\n";
  write_cm_csv(build_cm(d.lists, d.pois), dir / "cm.csv");
}

Dataset read_dataset(const fs::path& dir) {
  Dataset d;
  {
    const fs::path file = dir / "meta.csv";
    auto lines = read_lines(file);
    if (lines.size() != 2) throw Error(ErrorCode::kIo, file.string() + ": expected header and one row");
    auto cells = split(lines[1], ',');
    if (cells.size() != 5) throw Error(ErrorCode::kIo, file.string() + ": expected 5 fields");
    d.pois = parse_u64(cells[0], file);
    d.order = static_cast<unsigned>(parse_u64(cells[1], file));
    d.query_user = cells[2];
    d.location = GridCell{static_cast<std::uint32_t>(parse_u64(cells[3], file)),
                          static_cast<std::uint32_t>(parse_u64(cells[4], file))};
  }
  {
    const fs::path file = dir / "inversion_lists.csv";
    auto lines = read_lines(file);
    for (std::size_t k = 1; k < lines.size(); ++k) {
      auto cells = split(lines[k], ',');
      if (cells.size() != 2) throw Error(ErrorCode::kIo, file.string() + ": expected user,items");
      ItemSet items;
      for (const auto& s : split(cells[1], ' ')) {
        if (!s.empty()) items.insert(parse_u64(s, file));
      }
      d.lists[cells[0]] = std::move(items);
    }
  }
  {
    const fs::path file = dir / "pvs.csv";
    auto lines = read_lines(file);
    for (std::size_t k = 1; k < lines.size(); ++k) {
      auto cells = split(lines[k], ',');
      if (cells.size() != d.pois + 1) throw Error(ErrorCode::kIo, file.string() + ": wrong row width");
      PreferenceVector pv;
      for (std::size_t j = 1; j < cells.size(); ++j) pv.push_back(static_cast<std::uint32_t>(parse_u64(cells[j], file)));
      d.pvs[cells[0]] = std::move(pv);
    }
  }
  if (!d.pvs.count(d.query_user)) throw Error(ErrorCode::kIo, "query user missing from pvs.csv");
  return d;
}

void write_keys(const KeyMaterial& keys, const fs::path& dir) {
  fs::create_directories(dir);
  PublicKeys pub = public_keys(keys);
  write_json(public_json(pub), dir / "public.json");
  wire::Json secret = public_json(pub);
  secret["phi"] = to_hex(keys.add.sk.phi);
  secret["p"] = to_hex(keys.add.sk.p);
  secret["q"] = to_hex(keys.add.sk.q);
  secret["x0"] = to_hex(keys.mul.sk.x0);
  secret["x1"] = to_hex(keys.mul.sk.x1);
  write_json(secret, dir / "secret.json");
  wire::Json y = public_json(pub);
  y["k_mul"] = to_hex(keys.shares.server.mul);
  write_json(y, dir / "server_y.json");
  wire::Json x = public_json(pub);
  x["k_mul"] = to_hex(keys.shares.proxy.mul);
  write_json(x, dir / "proxy_x.json");
  fs::permissions(dir / "secret.json", fs::perms::owner_read | fs::perms::owner_write);
}

KeyMaterial read_client_keys(const fs::path& dir) {
  wire::Json s = read_json(dir / "secret.json");
  try {
    KeyMaterial keys = keygen_from_parts(wire::big(s, "p"), wire::big(s, "q"), wire::big(s, "x0"), wire::big(s, "x1"));
    PublicKeys stored = public_from_json(read_json(dir / "public.json"));
    if (!stored.same_as(public_keys(keys)) || !public_from_json(s).same_as(stored) ||
        wire::big(s, "phi") != keys.add.sk.phi) {
      throw Error(ErrorCode::kKeyIntegrity, "public.json does not match secret.json");
    }
    return keys;
  } catch (const wire::Json::exception& e) {
    throw Error(ErrorCode::kIo, (dir / "secret.json").string() + ": " + e.what());
  }
}

RoleKeys read_role_keys(const fs::path& dir, Role role) {
  if (role == Role::kClient) throw Error(ErrorCode::kDomain, "clients load secret.json");
  fs::path file = dir / (role == Role::kServerY ? "server_y.json" : "proxy_x.json");
  wire::Json j = read_json(file);
  try {
    return RoleKeys{public_from_json(j), wire::big(j, "k_mul")};
  } catch (const wire::Json::exception& e) {
    throw Error(ErrorCode::kIo, file.string() + ": " + e.what());
  }
}

}  // namespace sherec
