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

#ifndef SHEREC_DATASET_HPP_
#define SHEREC_DATASET_HPP_

// Synthetic POI datasets and the on-disk formats the command-line tool
// reads and writes: small CSV files for data, JSON for keys.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sherec/hilbert.hpp"
#include "sherec/protocol.hpp"
#include "sherec/recommender.hpp"

namespace sherec {

struct GenDataParams {
  std::size_t pois = 10;
  std::size_t users = 3;
  std::uint64_t seed = 1;
  unsigned order = 0;  // 0: smallest order whose grid holds every POI
  std::uint32_t r_max = kDefaultMaxRating;
  std::size_t max_visits = 8;
};

struct Dataset {
  std::size_t pois = 0;
  unsigned order = 0;
  InversionList lists;
  std::map<std::string, PreferenceVector> pvs;  // visited items rated 1..r_max
  std::string query_user;
  GridCell location;  // the query user's position, on a POI cell

  // Item i is the POI at Hilbert index i, so its cell is index_to_xy(i).
  GridCell placement(std::size_t item) const { return index_to_xy(HilbertIndex{order, item}); }
  // One matrix per user, the form clients upload.
  std::vector<CoMatrix> user_matrices() const;
};

unsigned order_for(std::size_t pois);
Dataset gen_data(const GenDataParams& params);

// Layout of a dataset directory:
//   meta.csv             pois,order,query_user,x,y
//   inversion_lists.csv  user,items   (items space separated)
//   pvs.csv              user,r0,r1,...
//   pv.csv               size,<n> then the query user's ratings
//   pois.csv             item,hilbert_index,x,y
//   location.csv         x,y
//   cm.csv               size,<n> then n rows of the aggregate matrix
void write_dataset(const Dataset& data, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);

void write_cm_csv(const CoMatrix& cm, const std::filesystem::path& file);
CoMatrix read_cm_csv(const std::filesystem::path& file);
void write_pv_csv(const PreferenceVector& pv, const std::filesystem::path& file);
PreferenceVector read_pv_csv(const std::filesystem::path& file);

// Key directory:
//   public.json    {"n","g","h"}
//   secret.json    public fields plus {"phi","p","q","x0","x1"}, client only
//   server_y.json  public fields plus {"k_mul": x1}
//   proxy_x.json   public fields plus {"k_mul": x0}
void write_keys(const KeyMaterial& keys, const std::filesystem::path& dir);
KeyMaterial read_client_keys(const std::filesystem::path& dir);

struct RoleKeys {
  PublicKeys keys;
  BigInt share;
};
RoleKeys read_role_keys(const std::filesystem::path& dir, Role role);

}  // namespace sherec

#endif  // SHEREC_DATASET_HPP_
