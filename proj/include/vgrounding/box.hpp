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

#ifndef VGROUNDING_BOX_HPP_
#define VGROUNDING_BOX_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>

namespace vgrounding {

struct GroundingSample;

/// Axis-aligned box in continuous pixel coordinates,
/// stored as [x_min, y_min, x_max, y_max].
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }

  /// True when both extents are strictly positive and all coordinates finite.
  bool well_formed() const;

  BoundingBox translated(double dx, double dy) const {
    return {x_min + dx, y_min + dy, x_max + dx, y_max + dy};
  }

  std::array<double, 4> as_array() const { return {x_min, y_min, x_max, y_max}; }
  static BoundingBox from_array(const std::array<double, 4>& v) {
    return {v[0], v[1], v[2], v[3]};
  }

  std::string to_string() const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Throws Error(kConfig) when `box` has zero or negative area.
void require_well_formed(const BoundingBox& box, const char* what);

/// Intersection over union. Both boxes must be well formed.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Index of the proposal whose box overlaps `sample.gt_box` the most, provided
/// that overlap reaches `min_iou`. Ties go to the lowest index.
std::optional<std::size_t> assign_gt_proposal(const GroundingSample& sample,
                                              double min_iou);

/// AP50 decision rule. With `strict` the overlap must exceed 0.5; otherwise
/// an overlap of exactly 0.5 also counts.
bool hit_at_50(const BoundingBox& predicted, const BoundingBox& gt,
               bool strict = true);

}  // namespace vgrounding

#endif  // VGROUNDING_BOX_HPP_
