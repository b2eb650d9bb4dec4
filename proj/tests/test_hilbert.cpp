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

#include <set>

#include "oracles/hilbert_reference.hpp"
#include "sherec/error.hpp"
#include "sherec/hilbert.hpp"
#include "sherec/rng.hpp"

namespace sherec {
namespace {

TEST(Hilbert, OrderOneBaseShape) {
  EXPECT_EQ(xy_to_index({0, 0}, 1).d, 0u);
  EXPECT_EQ(index_to_xy({1, 1}), (GridCell{0, 1}));
  EXPECT_EQ(index_to_xy({1, 2}), (GridCell{1, 1}));
  EXPECT_EQ(index_to_xy({1, 3}), (GridCell{1, 0}));
}

TEST(Hilbert, MatchesRecursiveReference) {
  for (unsigned k = 1; k <= 6; ++k) {
    auto walk = sherec_oracle::hilbert_walk(k);
    ASSERT_EQ(walk.size(), cell_count(k));
    for (std::uint64_t d = 0; d < walk.size(); ++d) {
      GridCell c = index_to_xy({k, d});
      ASSERT_EQ(c.x, walk[d].first) << "k=" << k << " d=" << d;
      ASSERT_EQ(c.y, walk[d].second) << "k=" << k << " d=" << d;
    }
  }
}

TEST(Hilbert, OrderTwoVisitsSixteenNeighbouringCells) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (std::uint64_t d = 0; d < 16; ++d) {
    GridCell c = index_to_xy({2, d});
    seen.insert({c.x, c.y});
    if (d > 0) {
      GridCell p = index_to_xy({2, d - 1});
      EXPECT_EQ(std::abs(int(c.x) - int(p.x)) + std::abs(int(c.y) - int(p.y)), 1);
    }
  }
  EXPECT_EQ(seen.size(), 16u);
}

TEST(Hilbert, BijectionAndAdjacencyExhaustive) {
  for (unsigned k = 1; k <= 6; ++k) {
    const std::uint64_t side = grid_side(k);
    std::vector<bool> hit(cell_count(k), false);
    for (std::uint32_t x = 0; x < side; ++x) {
      for (std::uint32_t y = 0; y < side; ++y) {
        HilbertIndex idx = xy_to_index({x, y}, k);
        ASSERT_LT(idx.d, cell_count(k));
        ASSERT_FALSE(hit[idx.d]);
        hit[idx.d] = true;
        ASSERT_EQ(index_to_xy(idx), (GridCell{x, y}));
      }
    }
    for (std::uint64_t d = 0; d + 1 < cell_count(k); ++d) {
      GridCell a = index_to_xy({k, d}), b = index_to_xy({k, d + 1});
      ASSERT_EQ(std::abs(std::int64_t(a.x) - b.x) + std::abs(std::int64_t(a.y) - b.y), 1) << k << " " << d;
    }
  }
}

TEST(Hilbert, LocalityBeatsRandomPairs) {
  const unsigned k = 6;
  const std::uint32_t side = static_cast<std::uint32_t>(grid_side(k));
  double neighbour_sum = 0;
  std::size_t neighbour_count = 0;
  auto d = [&](std::uint32_t x, std::uint32_t y) { return static_cast<double>(xy_to_index({x, y}, k).d); };
  for (std::uint32_t x = 0; x < side; ++x) {
    for (std::uint32_t y = 0; y < side; ++y) {
      if (x + 1 < side) neighbour_sum += std::abs(d(x, y) - d(x + 1, y)), ++neighbour_count;
      if (y + 1 < side) neighbour_sum += std::abs(d(x, y) - d(x, y + 1)), ++neighbour_count;
    }
  }
  Rng rng = Rng::from_seed(6);
  double random_sum = 0;
  const int samples = 20000;
  for (int i = 0; i < samples; ++i) {
    std::uint32_t x1 = rng.next_u64() % side, y1 = rng.next_u64() % side;
    std::uint32_t x2 = rng.next_u64() % side, y2 = rng.next_u64() % side;
    random_sum += std::abs(d(x1, y1) - d(x2, y2));
  }
  EXPECT_LT(neighbour_sum / neighbour_count, random_sum / samples);
}

TEST(Hilbert, LargeOrderRoundtrips) {
  Rng rng = Rng::from_seed(10);
  for (unsigned k : {10u, 16u, 31u}) {
    for (int i = 0; i < 1000; ++i) {
      GridCell c{static_cast<std::uint32_t>(rng.next_u64() % grid_side(k)),
                 static_cast<std::uint32_t>(rng.next_u64() % grid_side(k))};
      ASSERT_EQ(index_to_xy(xy_to_index(c, k)), c);
    }
  }
}

TEST(Hilbert, OutOfRangeIsDomainError) {
  EXPECT_THROW(xy_to_index({4, 0}, 2), Error);
  EXPECT_THROW(xy_to_index({0, 4}, 2), Error);
  EXPECT_THROW(xy_to_index({0, 0}, 0), Error);
  EXPECT_THROW(xy_to_index({0, 0}, 32), Error);
  EXPECT_THROW(index_to_xy({2, 16}), Error);
}

TEST(LatLon, CornersCentreAndErrors) {
  BoundingBox box{40.0, -74.0, 41.0, -73.0};
  EXPECT_EQ(latlon_to_cell(40.0, -74.0, box, 6), (GridCell{0, 0}));
  EXPECT_EQ(latlon_to_cell(41.0, -73.0, box, 6), (GridCell{63, 63}));
  EXPECT_EQ(latlon_to_cell(40.5, -73.5, box, 6), (GridCell{32, 32}));
  EXPECT_EQ(latlon_to_cell(40.25, -73.75, box, 3), (GridCell{2, 2}));
  EXPECT_THROW(latlon_to_cell(39.9, -73.5, box, 6), Error);
  EXPECT_THROW(latlon_to_cell(40.5, -73.5, BoundingBox{40, -74, 40, -73}, 6), Error);
}

}  // namespace
}  // namespace sherec
