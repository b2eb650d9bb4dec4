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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sherec/bench.hpp"
#include "sherec/dataset.hpp"
#include "test_keys.hpp"

namespace sherec {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("sherec_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIo;
}

TEST(GenData, SameSeedSameFiles) {
  fs::path a = scratch("gen_a"), b = scratch("gen_b");
  write_dataset(gen_data(GenDataParams{12, 4, 77}), a);
  write_dataset(gen_data(GenDataParams{12, 4, 77}), b);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
  }
  EXPECT_GE(files, 5u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(GenData, ShapeAndRanges) {
  Dataset d = gen_data(GenDataParams{4, 1, 3});
  EXPECT_EQ(d.pois, 4u);
  ASSERT_EQ(d.lists.size(), 1u);
  const ItemSet& items = d.lists.begin()->second;
  EXPECT_GE(items.size(), 1u);
  EXPECT_LE(items.size(), 4u);
  for (auto i : items) EXPECT_LT(i, 4u);
  for (const auto& [user, pv] : d.pvs) {
    ASSERT_EQ(pv.size(), 4u);
    for (std::size_t i = 0; i < pv.size(); ++i) {
      EXPECT_EQ(pv[i] > 0, d.lists.at(user).count(i) == 1) << user << " item " << i;
      EXPECT_LE(pv[i], kDefaultMaxRating);
    }
  }
  EXPECT_GE(cell_count(d.order), d.pois);
  EXPECT_LT(xy_to_index(d.location, d.order).d, d.pois);
  EXPECT_EQ(order_for(1), 1u);
  EXPECT_EQ(order_for(4), 1u);
  EXPECT_EQ(order_for(5), 2u);
}

TEST(GenData, RejectsEmptyWorlds) {
  EXPECT_EQ(code_of([] { gen_data(GenDataParams{0, 3, 1}); }), ErrorCode::kDomain);
  EXPECT_EQ(code_of([] { gen_data(GenDataParams{3, 0, 1}); }), ErrorCode::kDomain);
}

TEST(GenData, DirectoryRoundTrip) {
  fs::path dir = scratch("roundtrip");
  Dataset d = gen_data(GenDataParams{9, 3, 5});
  write_dataset(d, dir);
  Dataset back = read_dataset(dir);
  EXPECT_EQ(back.pois, d.pois);
  EXPECT_EQ(back.order, d.order);
  EXPECT_EQ(back.lists, d.lists);
  EXPECT_EQ(back.pvs, d.pvs);
  EXPECT_EQ(back.query_user, d.query_user);
  EXPECT_EQ(back.location, d.location);
  fs::remove_all(dir);
  EXPECT_EQ(code_of([&] { read_dataset(dir); }), ErrorCode::kIo);
}

TEST(Csv, MatrixAndVectorRoundTrip) {
  fs::path dir = scratch("csv");
  CoMatrix cm(3, {0, 1, 2, 1, 0, 7, 2, 7, 0});
  write_cm_csv(cm, dir / "cm.csv");
  EXPECT_EQ(read_cm_csv(dir / "cm.csv"), cm);
  PreferenceVector pv{0, 5, 3};
  write_pv_csv(pv, dir / "pv.csv");
  EXPECT_EQ(read_pv_csv(dir / "pv.csv"), pv);
  std::ofstream(dir / "bad.csv") << "size,2\n1,x\n0,0\n";
  EXPECT_EQ(code_of([&] { read_cm_csv(dir / "bad.csv"); }), ErrorCode::kIo);
  fs::remove_all(dir);
}

TEST(KeyFiles, RoundTripAndSeparation) {
  const KeyMaterial& k = testing::small_keys();
  fs::path dir = scratch("keys");
  write_keys(k, dir);
  KeyMaterial back = read_client_keys(dir);
  EXPECT_EQ(back.add.sk.phi, k.add.sk.phi);
  EXPECT_EQ(back.mul.sk.x0, k.mul.sk.x0);
  EXPECT_EQ(back.mul.sk.x1, k.mul.sk.x1);
  EXPECT_EQ(back.mul.pk.h, k.mul.pk.h);

  RoleKeys y = read_role_keys(dir, Role::kServerY);
  RoleKeys x = read_role_keys(dir, Role::kProxyX);
  EXPECT_EQ(y.share, k.mul.sk.x1);
  EXPECT_EQ(x.share, k.mul.sk.x0);
  EXPECT_TRUE(y.keys.same_as(public_keys(k)));

  // A role file never names the other share or the factorisation.
  for (const char* f : {"server_y.json", "proxy_x.json", "public.json"}) {
    std::string text = slurp(dir / f);
    EXPECT_EQ(text.find("phi"), std::string::npos) << f;
    EXPECT_EQ(text.find("\"p\""), std::string::npos) << f;
  }
  EXPECT_EQ(slurp(dir / "server_y.json").find(to_hex(k.mul.sk.x0)), std::string::npos);
  EXPECT_EQ(slurp(dir / "proxy_x.json").find(to_hex(k.mul.sk.x1)), std::string::npos);
  EXPECT_EQ(fs::status(dir / "secret.json").permissions() & fs::perms::others_read, fs::perms::none);

  // A tampered secret file fails the integrity check.
  std::string s = slurp(dir / "secret.json");
  auto pos = s.find(to_hex(k.mul.sk.x0));
  ASSERT_NE(pos, std::string::npos);
  std::string other = to_hex(k.mul.sk.x0 + 2);
  s.replace(pos, to_hex(k.mul.sk.x0).size(), other);
  std::ofstream(dir / "secret.json", std::ios::trunc) << s;
  EXPECT_EQ(code_of([&] { read_client_keys(dir); }), ErrorCode::kKeyIntegrity);
  fs::remove_all(dir);
}

TEST(Bench, OneRowPerSizeAndCsvRoundTrip) {
  BenchConfig c;
  c.sizes = {3, 4};
  c.security_bits = 64;
  c.repetitions = 1;
  c.warmup = false;
  auto rows = bench(c);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].size, 3u);
  EXPECT_EQ(rows[1].size, 4u);
  for (const auto& r : rows) {
    EXPECT_GT(r.enc_time_s, 0);
    EXPECT_GT(r.rec_time_s, 0);
    EXPECT_GE(r.enc_total_s, r.rec_time_s);
  }
  auto back = parse_csv(format_csv(rows));
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].size, rows[i].size);
    EXPECT_NEAR(back[i].rec_time_s, rows[i].rec_time_s, 1e-6);
    EXPECT_NEAR(back[i].enc_total_s, rows[i].enc_total_s, 1e-6);
  }
  std::string table = format_table(rows, true);
  EXPECT_NE(table.find("n/a"), std::string::npos);
  EXPECT_NE(format_csv(rows, true).find("external_fhe_s"), std::string::npos);
}

TEST(Bench, RejectsBadConfig) {
  BenchConfig c;
  c.repetitions = 0;
  EXPECT_EQ(code_of([&] { bench(c); }), ErrorCode::kDomain);
  c = {};
  c.sizes = {};
  EXPECT_EQ(code_of([&] { bench(c); }), ErrorCode::kDomain);
  c = {};
  c.sizes = {0};
  EXPECT_EQ(code_of([&] { bench(c); }), ErrorCode::kDomain);
  EXPECT_EQ(code_of([] { parse_csv("size,enc\n1,2\n"); }), ErrorCode::kIo);
}

TEST(Bench, ExternalBaselineFigures) {
  const auto& b = external_baseline();
  EXPECT_DOUBLE_EQ(b.at(10), 2.79);
  EXPECT_DOUBLE_EQ(b.at(100), 28.03);
  EXPECT_DOUBLE_EQ(b.at(1000), 269.47);
}

}  // namespace
}  // namespace sherec
