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

#include "sherec/hilbert.hpp"

#include <cmath>
#include <string>

#include "sherec/error.hpp"

namespace sherec {
namespace {

void check_order(unsigned order) {
  if (order == 0 || order > kMaxHilbertOrder) {
    throw Error(ErrorCode::kDomain, "Hilbert order must lie in [1, 31], got " + std::to_string(order));
  }
}

// Rotate/flip a quadrant so the sub-curve has the base orientation.
void rotate(std::uint64_t side, std::uint64_t& x, std::uint64_t& y, std::uint64_t rx,
            std::uint64_t ry) {
  if (ry != 0) return;
  if (rx == 1) {
    x = side - 1 - x;
    y = side - 1 - y;
  }
  std::swap(x, y);
}

}  // namespace

HilbertIndex xy_to_index(GridCell cell, unsigned order) {
  check_order(order);
  const std::uint64_t n = grid_side(order);
  if (cell.x >= n || cell.y >= n) {
    throw Error(ErrorCode::kDomain, "cell (" + std::to_string(cell.x) + ", " +
                                        std::to_string(cell.y) + ") is off the order-" +
                                        std::to_string(order) + " grid");
  }
  std::uint64_t x = cell.x;
  std::uint64_t y = cell.y;
  std::uint64_t d = 0;
  for (std::uint64_t s = n / 2; s > 0; s /= 2) {
    std::uint64_t rx = (x & s) > 0 ? 1 : 0;
    std::uint64_t ry = (y & s) > 0 ? 1 : 0;
    d += s * s * ((3 * rx) ^ ry);
    rotate(n, x, y, rx, ry);
  }
  return HilbertIndex{order, d};
}

GridCell index_to_xy(HilbertIndex idx) {
  check_order(idx.order);
  const std::uint64_t n = grid_side(idx.order);
  if (idx.d >= cell_count(idx.order)) {
    throw Error(ErrorCode::kDomain, "index " + std::to_string(idx.d) + " is past the end of the curve");
  }
  std::uint64_t x = 0;
  std::uint64_t y = 0;
  std::uint64_t t = idx.d;
  for (std::uint64_t s = 1; s < n; s *= 2) {
    std::uint64_t rx = 1 & (t / 2);
    std::uint64_t ry = 1 & (t ^ rx);
    rotate(s, x, y, rx, ry);
    x += s * rx;
    y += s * ry;
    t /= 4;
  }
  return GridCell{static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)};
}

GridCell latlon_to_cell(double lat, double lon, const BoundingBox& bbox, unsigned order) {
  check_order(order);
  if (!(bbox.max_lat > bbox.min_lat) || !(bbox.max_lon > bbox.min_lon)) {
    throw Error(ErrorCode::kDomain, "bounding box is degenerate");
  }
  if (!(lat >= bbox.min_lat && lat <= bbox.max_lat && lon >= bbox.min_lon && lon <= bbox.max_lon)) {
    throw Error(ErrorCode::kDomain, "point lies outside the bounding box");
  }
  const double side = static_cast<double>(grid_side(order));
  auto quantise = [&](double v, double lo, double hi) {
    double cell = std::floor((v - lo) / (hi - lo) * side);
    return static_cast<std::uint32_t>(std::min(cell, side - 1));
  };
  return GridCell{quantise(lon, bbox.min_lon, bbox.max_lon), quantise(lat, bbox.min_lat, bbox.max_lat)};
}

}  // namespace sherec
