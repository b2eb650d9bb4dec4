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

// sherec: key generation, daemons, client operations, data generation and
// the benchmark table.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "sherec/bench.hpp"
#include "sherec/dataset.hpp"
#include "sherec/deployment.hpp"

namespace {

using namespace sherec;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAbort = 3;
constexpr int kExitOracle = 4;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAborted:
    case ErrorCode::kProtocol:
    case ErrorCode::kProtocolOrder:
    case ErrorCode::kTransport:
      return kExitAbort;
    case ErrorCode::kOracleMismatch:
      return kExitOracle;
    default:
      return kExitFailure;
  }
}

GridCell parse_cell(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("--loc", "expected X,Y");
  try {
    std::size_t a = 0, b = 0;
    unsigned long x = std::stoul(text.substr(0, comma), &a);
    unsigned long y = std::stoul(text.substr(comma + 1), &b);
    if (a != comma || b != text.size() - comma - 1 || text[0] == '-' || text[comma + 1] == '-') throw 0;
    return GridCell{static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)};
  } catch (...) {
    throw CLI::ValidationError("--loc", "expected two nonnegative integers X,Y");
  }
}

fs::path key_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SHEREC_KEY_DIR")) return env;
  throw CLI::RequiredError("--keys (or SHEREC_KEY_DIR)");
}

struct ClientOptions {
  std::string server;
  std::string proxy;
  std::string keys;
  std::optional<std::uint64_t> seed;
};

struct ClientSession {
  std::unique_ptr<TcpTransport> y;
  std::unique_ptr<TcpTransport> x;
  std::unique_ptr<Client> client;
};

ClientSession connect_client(const ClientOptions& o, unsigned order) {
  ClientSession s;
  s.y = TcpTransport::connect(parse_address(o.server));
  s.x = TcpTransport::connect(parse_address(o.proxy));
  ClientConfig cc;
  cc.seed = o.seed;
  cc.order = order;
  s.client = std::make_unique<Client>(read_client_keys(key_dir(o.keys)), cc, *s.y, *s.x);
  s.client->setup();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sherec: location-aware recommendations over switchable homomorphic encryption"};
  app.require_subcommand(1);

  // keygen
  auto* keygen_cmd = app.add_subcommand("keygen", "generate keys and per-role key files");
  std::size_t bits = 512;
  std::string out_dir;
  std::optional<std::uint64_t> keygen_seed;
  keygen_cmd->add_option("--bits", bits, "bit length of each prime (|N| = 2*bits)")->check(CLI::Range(16, 4096));
  keygen_cmd->add_option("--out-dir", out_dir, "directory for the key files")->required();
  keygen_cmd->add_option("--seed", keygen_seed, "deterministic keys (testing only)");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "run server Y or proxy X");
  std::string role, listen = "127.0.0.1:7000", serve_keys, serve_proxy;
  std::optional<std::uint64_t> serve_seed;
  serve_cmd->add_option("--role", role, "y or proxy")->required()->check(CLI::IsMember({"y", "proxy"}));
  serve_cmd->add_option("--listen", listen, "host:port to listen on (port 0 picks one)");
  serve_cmd->add_option("--keys", serve_keys, "key directory (default $SHEREC_KEY_DIR)");
  serve_cmd->add_option("--proxy", serve_proxy, "proxy X address (role y)");
  serve_cmd->add_option("--seed", serve_seed, "deterministic session randomness (testing only)");

  // client
  auto* client_cmd = app.add_subcommand("client", "client operations against running servers");
  client_cmd->require_subcommand(1);
  ClientOptions copts;
  client_cmd->add_option("--server", copts.server, "server Y address")->required();
  client_cmd->add_option("--proxy", copts.proxy, "proxy X address")->required();
  client_cmd->add_option("--keys", copts.keys, "key directory (default $SHEREC_KEY_DIR)");
  client_cmd->add_option("--seed", copts.seed, "deterministic client randomness (testing only)");

  auto* init_cmd = client_cmd->add_subcommand("init", "upload co-occurrence matrices");
  std::string data_dir, cm_file;
  auto* data_opt = init_cmd->add_option("--data", data_dir, "dataset directory (one matrix per user)");
  init_cmd->add_option("--cm", cm_file, "single aggregate matrix CSV")->excludes(data_opt);

  auto* rec_cmd = client_cmd->add_subcommand("recommend", "request a location-filtered recommendation list");
  std::string pv_file, loc_text;
  std::int64_t radius = kDefaultRadius;
  unsigned order = kDefaultHilbertOrder;
  rec_cmd->add_option("--pv", pv_file, "preference vector CSV")->required();
  rec_cmd->add_option("--loc", loc_text, "grid cell X,Y")->required();
  rec_cmd->add_option("--radius", radius, "keep items with |index - loc| <= radius")->check(CLI::NonNegativeNumber);
  rec_cmd->add_option("--order", order, "Hilbert order of the grid")->check(CLI::Range(1u, kMaxHilbertOrder));

  auto* upd_cmd = client_cmd->add_subcommand("update", "send the difference of two matrices");
  std::string old_file, new_file;
  upd_cmd->add_option("--old", old_file, "previous matrix CSV")->required();
  upd_cmd->add_option("--new", new_file, "current matrix CSV")->required();

  // gen-data
  auto* gen_cmd = app.add_subcommand("gen-data", "write a synthetic dataset");
  GenDataParams gp;
  std::string gen_out;
  gen_cmd->add_option("--pois", gp.pois, "number of POIs")->required();
  gen_cmd->add_option("--users", gp.users, "number of users")->required();
  gen_cmd->add_option("--seed", gp.seed, "random seed")->required();
  gen_cmd->add_option("--order", gp.order, "Hilbert order (default: smallest that fits)");
  gen_cmd->add_option("--out", gen_out, "output directory")->required();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "timing table over synthetic scenarios");
  BenchConfig bc;
  std::string format = "table", bench_out;
  bool serial = false, no_warmup = false;
  bench_cmd->add_option("--sizes", bc.sizes, "comma separated item counts")->delimiter(',');
  bench_cmd->add_option("--reps", bc.repetitions, "repetitions per size")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--bits", bc.security_bits, "bit length of each prime")->check(CLI::Range(16, 4096));
  bench_cmd->add_option("--seed", bc.seed, "first seed");
  bench_cmd->add_option("--format", format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
  bench_cmd->add_option("--out", bench_out, "write output here instead of stdout");
  bench_cmd->add_flag("--external", bc.external_baseline, "add the published FHE baseline column");
  bench_cmd->add_flag("--serial", serial, "use the serial reference kernels");
  bench_cmd->add_flag("--no-warmup", no_warmup, "skip the untimed warm-up run");

  // hilbert
  auto* hil_cmd = app.add_subcommand("hilbert", "map between grid cells and Hilbert indices");
  unsigned hil_order = kDefaultHilbertOrder;
  std::string hil_xy;
  std::optional<std::uint64_t> hil_index;
  hil_cmd->add_option("--order", hil_order, "curve order")->check(CLI::Range(1u, kMaxHilbertOrder));
  auto* xy_opt = hil_cmd->add_option("--xy", hil_xy, "cell X,Y -> index");
  hil_cmd->add_option("--index", hil_index, "index -> cell X,Y")->excludes(xy_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*keygen_cmd) {
      KeyGenParams kp{bits, keygen_seed};
      KeyMaterial keys = keygen(kp);
      write_keys(keys, out_dir);
      std::cout << "wrote keys for a " << bit_length(keys.add.pk.n) << "-bit modulus to " << out_dir << "\n";
    } else if (*serve_cmd) {
      fs::path dir = key_dir(serve_keys);
      TcpListener listener(parse_address(listen));
      std::function<SessionReport(Transport&)> serve;
      std::unique_ptr<ServerY> y;
      std::unique_ptr<ProxyX> x;
      if (role == "y") {
        if (serve_proxy.empty()) throw CLI::RequiredError("--proxy");
        Address proxy = parse_address(serve_proxy);
        RoleKeys rk = read_role_keys(dir, Role::kServerY);
        ServerYConfig yc;
        yc.seed = serve_seed;
        y = std::make_unique<ServerY>(yc, [proxy] { return TcpTransport::connect(proxy); });
        y->preload_keys(rk.keys, rk.share);
        serve = [&y](Transport& t) { return y->serve(t); };
      } else {
        RoleKeys rk = read_role_keys(dir, Role::kProxyX);
        x = std::make_unique<ProxyX>();
        x->preload_keys(rk.keys, rk.share);
        serve = [&x](Transport& t) { return x->serve(t); };
      }
      std::cout << "listening on 127.0.0.1:" << listener.port() << std::endl;
      for (;;) {
        std::shared_ptr<TcpTransport> conn = listener.accept();
        std::thread([conn, &serve, role] {
          SessionReport r = serve(*conn);
          std::clog << role << " session " << r.session << " ended in " << to_string(r.final_stage);
          if (r.error) std::clog << ": " << to_string(*r.error) << ": " << r.message;
          std::clog << std::endl;
        }).detach();
      }
    } else if (*client_cmd) {
      if (*init_cmd) {
        if (data_dir.empty() && cm_file.empty()) throw CLI::RequiredError("--data or --cm");
        std::vector<CoMatrix> contributions;
        std::size_t size = 0;
        if (!data_dir.empty()) {
          Dataset d = read_dataset(data_dir);
          contributions = d.user_matrices();
          size = d.pois;
        } else {
          contributions.push_back(read_cm_csv(cm_file));
          size = contributions.front().size();
        }
        ClientSession s = connect_client(copts, kDefaultHilbertOrder);
        s.client->initialize(size, contributions);
        s.client->close();
        std::cout << "initialised a " << size << "x" << size << " database from " << contributions.size()
                  << " contribution(s)\n";
      } else if (*rec_cmd) {
        PreferenceVector pv = read_pv_csv(pv_file);
        GridCell loc = parse_cell(loc_text);
        xy_to_index(loc, order);  // reject before connecting
        ClientSession s = connect_client(copts, order);
        RecommendationOutcome out = s.client->recommend(pv, loc, radius);
        s.client->close();
        std::cout << "item,score,offset\n";
        for (const auto& r : out.list) std::cout << r.item << "," << r.score << "," << r.offset << "\n";
        std::clog << "encrypt " << out.encrypt_s << " s, servers " << out.server_s << " s, decrypt "
                  << out.decrypt_s << " s\n";
      } else if (*upd_cmd) {
        CoMatrix old_cm = read_cm_csv(old_file);
        CoMatrix new_cm = read_cm_csv(new_file);
        if (old_cm.size() != new_cm.size()) throw Error(ErrorCode::kDomain, "matrices differ in size");
        ClientSession s = connect_client(copts, kDefaultHilbertOrder);
        s.client->update(old_cm, new_cm);
        s.client->close();
        std::cout << "update sent\n";
      }
    } else if (*gen_cmd) {
      Dataset d = gen_data(gp);
      write_dataset(d, gen_out);
      std::cout << "wrote " << d.pois << " POIs, " << d.lists.size() << " users (order " << d.order << ") to "
                << gen_out << "\n";
    } else if (*bench_cmd) {
      bc.format = format == "csv" ? OutputFormat::kCsv : OutputFormat::kTable;
      bc.exec = serial ? Exec::kSerial : Exec::kParallel;
      bc.warmup = !no_warmup;
      std::vector<BenchRow> rows = bench(bc, &std::clog);
      std::string text = bc.format == OutputFormat::kCsv ? format_csv(rows, bc.external_baseline)
                                                         : format_table(rows, bc.external_baseline);
      if (bench_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(bench_out) << text;
      }
    } else if (*hil_cmd) {
      if (hil_index) {
        GridCell c = index_to_xy(HilbertIndex{hil_order, *hil_index});
        std::cout << c.x << "," << c.y << "\n";
      } else if (!hil_xy.empty()) {
        std::cout << xy_to_index(parse_cell(hil_xy), hil_order).d << "\n";
      } else {
        throw CLI::RequiredError("--xy or --index");
      }
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
