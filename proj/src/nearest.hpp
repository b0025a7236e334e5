// Copyright 2026 The headblend Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HEADBLEND_SRC_NEAREST_HPP_
#define HEADBLEND_SRC_NEAREST_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>

#include "headblend/types.hpp"

namespace headblend::detail {

struct NearestPixel {
  std::size_t index;
  std::int64_t distance_sq;
};

// Closest pixel (Euclidean) to (x, y), excluding (x, y) itself, for which
// is_candidate(index) holds, searching square rings up to Chebyshev radius
// `max_radius`. Ties go to the smaller linear index.
template <class Pred>
std::optional<NearestPixel> nearest_pixel(Size frame, int x, int y, int max_radius,
                                          Pred&& is_candidate) {
  std::optional<NearestPixel> best;
  auto consider = [&](int px, int py) {
    if (px < 0 || py < 0 || px >= frame.width || py >= frame.height) return;
    const std::size_t index = static_cast<std::size_t>(py) * frame.width + px;
    if (!is_candidate(index)) return;
    const std::int64_t dx = px - x, dy = py - y;
    const std::int64_t d2 = dx * dx + dy * dy;
    if (!best || d2 < best->distance_sq || (d2 == best->distance_sq && index < best->index)) {
      best = NearestPixel{index, d2};
    }
  };
  for (int k = 1; k <= max_radius; ++k) {
    for (int dx = -k; dx <= k; ++dx) {
      consider(x + dx, y - k);
      consider(x + dx, y + k);
    }
    for (int dy = -k + 1; dy <= k - 1; ++dy) {
      consider(x - k, y + dy);
      consider(x + k, y + dy);
    }
    // Every pixel on later rings is at least k+1 away.
    if (best && best->distance_sq < static_cast<std::int64_t>(k + 1) * (k + 1)) break;
  }
  return best;
}

}  // namespace headblend::detail

#endif  // HEADBLEND_SRC_NEAREST_HPP_
