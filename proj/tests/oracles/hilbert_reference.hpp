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

#ifndef SHEREC_TESTS_ORACLES_HILBERT_REFERENCE_HPP_
#define SHEREC_TESTS_ORACLES_HILBERT_REFERENCE_HPP_

// Recursive Hilbert construction: the order-k curve is four copies of the
// order-(k-1) curve, the first transposed, the last anti-transposed, laid
// out in the order-1 pattern (0,0) (0,1) (1,1) (1,0).

#include <cstdint>
#include <utility>
#include <vector>

namespace sherec_oracle {

using Cell = std::pair<std::uint64_t, std::uint64_t>;  // (x, y)

inline std::vector<Cell> hilbert_walk(unsigned order) {
  if (order == 0) return {{0, 0}};
  std::vector<Cell> sub = hilbert_walk(order - 1);
  const std::uint64_t s = std::uint64_t{1} << (order - 1);
  std::vector<Cell> out;
  out.reserve(sub.size() * 4);
  for (auto [x, y] : sub) out.push_back({y, x});
  for (auto [x, y] : sub) out.push_back({x, y + s});
  for (auto [x, y] : sub) out.push_back({x + s, y + s});
  for (auto [x, y] : sub) out.push_back({2 * s - 1 - y, s - 1 - x});
  return out;
}

}  // namespace sherec_oracle

#endif  // SHEREC_TESTS_ORACLES_HILBERT_REFERENCE_HPP_
