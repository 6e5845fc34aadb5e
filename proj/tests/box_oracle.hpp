// Copyright 2026 The vgrounding Authors
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

// Independent IoU oracle for integer-coordinate boxes: paint unit cells on a
// grid and count. Shared by the unit and acceptance suites.

#ifndef VGROUNDING_TESTS_BOX_ORACLE_HPP_
#define VGROUNDING_TESTS_BOX_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <random>

#include "vgrounding/box.hpp"

namespace vgrounding::testing {

inline double rasterized_iou(const BoundingBox& a, const BoundingBox& b) {
  const int x0 = static_cast<int>(std::floor(std::min(a.x_min, b.x_min)));
  const int y0 = static_cast<int>(std::floor(std::min(a.y_min, b.y_min)));
  const int x1 = static_cast<int>(std::ceil(std::max(a.x_max, b.x_max)));
  const int y1 = static_cast<int>(std::ceil(std::max(a.y_max, b.y_max)));
  auto inside = [](const BoundingBox& r, int x, int y) {
    return x >= r.x_min && x + 1 <= r.x_max && y >= r.y_min && y + 1 <= r.y_max;
  };
  long inter = 0, uni = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const bool in_a = inside(a, x, y), in_b = inside(b, x, y);
      inter += (in_a && in_b) ? 1 : 0;
      uni += (in_a || in_b) ? 1 : 0;
    }
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

inline BoundingBox random_int_box(std::mt19937_64& rng, int extent) {
  std::uniform_int_distribution<int> coord(0, extent);
  int x0 = coord(rng), x1 = coord(rng), y0 = coord(rng), y1 = coord(rng);
  if (x0 == x1) ++x1;
  if (y0 == y1) ++y1;
  return {static_cast<double>(std::min(x0, x1)), static_cast<double>(std::min(y0, y1)),
          static_cast<double>(std::max(x0, x1)), static_cast<double>(std::max(y0, y1))};
}

}  // namespace vgrounding::testing

#endif  // VGROUNDING_TESTS_BOX_ORACLE_HPP_
