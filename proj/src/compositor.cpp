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

#include "headblend/compositor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "nearest.hpp"

namespace headblend {

namespace {

using Color = std::array<double, 3>;

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

Color to_color(Rgb c) { return {double(c[0]), double(c[1]), double(c[2])}; }

Color mix(const Color& top, const Color& under, double alpha) {
  return {alpha * top[0] + (1.0 - alpha) * under[0], alpha * top[1] + (1.0 - alpha) * under[1],
          alpha * top[2] + (1.0 - alpha) * under[2]};
}

}  // namespace

RgbImage recolor_head(const GrayImage& gray_head, const ReferenceImage& head_reference,
                      const BinaryMask& head) {
  require_same_size(gray_head.size(), head.size(), "recolor_head gray vs mask");
  require_same_size(head_reference.colors.size(), head.size(), "recolor_head reference vs mask");
  RgbImage out(head.width(), head.height());
  for (std::size_t i = 0; i < head.pixel_count(); ++i) {
    if (!head.test(i)) continue;
    const double y = gray_head[i];
    if (!head_reference.valid.test(i)) {
      out.set_pixel(i, {gray_head[i], gray_head[i], gray_head[i]});
      continue;
    }
    const Rgb ref = head_reference.colors.pixel(i);
    const double r = ref[0], g = ref[1], b = ref[2];
    const double cb = -0.168736 * r - 0.331264 * g + 0.5 * b;
    const double cr = 0.5 * r - 0.418688 * g - 0.081312 * b;
    out.set_pixel(i, {to_byte(y + 1.402 * cr), to_byte(y - 0.344136 * cb - 0.714136 * cr),
                      to_byte(y + 1.772 * cb)});
  }
  return out;
}

RgbImage fill_inpainting(const ReferenceImage& inpaint_reference, const BinaryMask& band,
                         const RgbImage& background, const BinaryMask& cut_region) {
  const Size frame = band.size();
  require_same_size(inpaint_reference.colors.size(), frame, "fill_inpainting reference");
  require_same_size(background.size(), frame, "fill_inpainting background");
  require_same_size(cut_region.size(), frame, "fill_inpainting cut region");

  auto is_candidate = [&](std::size_t i) {
    return band.test(i) ? inpaint_reference.valid.test(i) : !cut_region.test(i);
  };
  auto candidate_color = [&](std::size_t i) {
    return band.test(i) ? inpaint_reference.colors.pixel(i) : background.pixel(i);
  };
  bool any_candidate = false;
  for (std::size_t i = 0; i < frame.pixel_count() && !any_candidate; ++i) {
    any_candidate = is_candidate(i);
  }

  RgbImage out(frame.width, frame.height);
  const int search = std::max(frame.width, frame.height);
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * frame.width + x;
      if (!band.test(i)) continue;
      if (inpaint_reference.valid.test(i)) {
        out.set_pixel(i, inpaint_reference.colors.pixel(i));
      } else if (any_candidate) {
        if (auto n = detail::nearest_pixel(frame, x, y, search, is_candidate)) {
          out.set_pixel(i, candidate_color(n->index));
        }
      }
    }
  }
  return out;
}

RgbImage composite(const RgbImage& head_colors, const RgbImage& band_fill,
                   const RgbImage& background, const BinaryMask& head, const BinaryMask& band,
                   int feather) {
  if (feather < 0) throw InvalidArgument("feather radius must be >= 0");
  const Size frame = head.size();
  require_same_size(head_colors.size(), frame, "composite head colours");
  require_same_size(band_fill.size(), frame, "composite band fill");
  require_same_size(background.size(), frame, "composite background");
  require_same_size(band.size(), frame, "composite band mask");

  const BinaryMask cut = head.united(band);
  const double width = feather;

  // The ramp is centred on the layer edge: alpha 1/2 on the edge itself,
  // reaching 1 (inside) and 0 (outside) half a feather width away.
  auto inside_alpha = [&](double d) { return std::min(1.0, 0.5 + (d - 0.5) / width); };
  auto outside_alpha = [&](double d) { return std::max(0.0, 0.5 - (d - 0.5) / width); };
  const int search = feather / 2 + 1;

  auto nearest = [&](int x, int y, auto&& pred) -> std::pair<double, std::size_t> {
    const auto n = detail::nearest_pixel(frame, x, y, search, pred);
    if (!n) return {-1.0, 0};
    return {std::sqrt(static_cast<double>(n->distance_sq)), n->index};
  };

  // Band over background. Pixels outside the cut are pinned, so only the
  // inner half of that ramp exists.
  std::vector<Color> lower(frame.pixel_count());
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * frame.width + x;
      if (!cut.test(i)) {
        lower[i] = to_color(background.pixel(i));
        continue;
      }
      if (head.test(i)) continue;
      const Color fill = to_color(band_fill.pixel(i));
      lower[i] = fill;
      if (feather == 0) continue;
      const auto [d, under] = nearest(x, y, [&](std::size_t j) { return !cut.test(j); });
      if (d > 0.0) lower[i] = mix(fill, to_color(background.pixel(under)), inside_alpha(d));
    }
  }

  RgbImage out = background;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * frame.width + x;
      if (!cut.test(i)) continue;
      Color c;
      if (head.test(i)) {
        c = to_color(head_colors.pixel(i));
        if (feather > 0) {
          const auto [d, under] = nearest(x, y, [&](std::size_t j) { return !head.test(j); });
          if (d > 0.0) c = mix(c, lower[under], inside_alpha(d));
        }
      } else {
        c = lower[i];
        if (feather > 0) {
          const auto [d, from] = nearest(x, y, [&](std::size_t j) { return head.test(j); });
          if (d > 0.0) c = mix(to_color(head_colors.pixel(from)), c, outside_alpha(d));
        }
      }
      out.set_pixel(i, {to_byte(c[0]), to_byte(c[1]), to_byte(c[2])});
    }
  }
  return out;
}

}  // namespace headblend
