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

#include "vgrounding/box.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "vgrounding/dataset.hpp"
#include "vgrounding/error.hpp"

namespace vgrounding {

bool BoundingBox::well_formed() const {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_max > x_min && y_max > y_min;
}

std::string BoundingBox::to_string() const {
  return fmt::format("[{}, {}, {}, {}]", x_min, y_min, x_max, y_max);
}

void require_well_formed(const BoundingBox& box, const char* what) {
  if (!box.well_formed()) {
    fail(ErrorKind::kConfig,
         fmt::format("degenerate {} box {}", what, box.to_string()));
  }
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  require_well_formed(a, "first");
  require_well_formed(b, "second");
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::optional<std::size_t> assign_gt_proposal(const GroundingSample& sample,
                                              double min_iou) {
  std::optional<std::size_t> best;
  double best_iou = -1.0;
  for (std::size_t i = 0; i < sample.proposals.size(); ++i) {
    const double v = iou(sample.proposals[i].box, sample.gt_box);
    if (v > best_iou) {
      best_iou = v;
      best = i;
    }
  }
  if (!best || best_iou < min_iou) return std::nullopt;
  return best;
}

bool hit_at_50(const BoundingBox& predicted, const BoundingBox& gt,
               bool strict) {
  const double v = iou(predicted, gt);
  return strict ? v > 0.5 : v >= 0.5;
}

}  // namespace vgrounding
