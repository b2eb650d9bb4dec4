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

#ifndef SHEREC_HILBERT_HPP_
#define SHEREC_HILBERT_HPP_

// Order-k Hilbert curve over a 2^k x 2^k grid.
//
// Orientation: index 0 sits at cell (0, 0) and the order-1 curve visits
// (0,0) -> (0,1) -> (1,1) -> (1,0). With y growing downward (row index),
// as on a map tile, the base shape is a "U" opening upward. Every test and
// table in this project depends on that choice.

#include <cstdint>

namespace sherec {

inline constexpr unsigned kMaxHilbertOrder = 31;
inline constexpr unsigned kDefaultHilbertOrder = 6;

struct GridCell {
  std::uint32_t x = 0;
  std::uint32_t y = 0;

  bool operator==(const GridCell&) const = default;
};

struct HilbertIndex {
  unsigned order = 0;
  std::uint64_t d = 0;

  bool operator==(const HilbertIndex&) const = default;
};

inline std::uint64_t grid_side(unsigned order) { return std::uint64_t{1} << order; }
inline std::uint64_t cell_count(unsigned order) { return std::uint64_t{1} << (2 * order); }

// Throws kDomain when the cell is off the grid or the order is 0 or too large.
HilbertIndex xy_to_index(GridCell cell, unsigned order);
GridCell index_to_xy(HilbertIndex idx);

struct BoundingBox {
  double min_lat = 0;
  double min_lon = 0;
  double max_lat = 0;
  double max_lon = 0;
};

// Uniform quantisation: longitude drives x, latitude drives y. Points on the
// max edge fall in the last cell. Throws kDomain for a point outside bbox or
// a degenerate bbox.
GridCell latlon_to_cell(double lat, double lon, const BoundingBox& bbox, unsigned order);

}  // namespace sherec

#endif  // SHEREC_HILBERT_HPP_
