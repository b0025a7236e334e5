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

#include "headblend/preprocessing.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace headblend {

namespace {

// 1-D running-window max over each row (horizontal) or column (vertical).
void dilate_pass(const std::vector<std::uint8_t>& in, std::vector<std::uint8_t>& out,
                 int width, int height, int radius, bool horizontal) {
  const int lines = horizontal ? height : width;
  const int length = horizontal ? width : height;
  const std::size_t step = horizontal ? 1 : static_cast<std::size_t>(width);
  std::vector<int> prefix(length + 1);
  for (int line = 0; line < lines; ++line) {
    const std::size_t base = horizontal ? static_cast<std::size_t>(line) * width
                                        : static_cast<std::size_t>(line);
    prefix[0] = 0;
    for (int i = 0; i < length; ++i) prefix[i + 1] = prefix[i] + in[base + i * step];
    for (int i = 0; i < length; ++i) {
      const int lo = std::max(0, i - radius);
      const int hi = std::min(length - 1, i + radius);
      out[base + i * step] = (prefix[hi + 1] - prefix[lo]) > 0 ? 1 : 0;
    }
  }
}

}  // namespace

std::uint8_t luminance(Rgb rgb) {
  const double y = 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2];
  return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

BinaryMask head_mask(const LabelMap& labels, std::span<const std::uint8_t> head_ids) {
  std::array<bool, 256> member{};
  for (std::uint8_t id : head_ids) {
    if (id > kMaxLabelId) {
      throw InvalidArgument("unknown head label id " + std::to_string(id));
    }
    member[id] = true;
  }
  BinaryMask mask(labels.size());
  for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
    if (member[labels[i]]) mask.set(i);
  }
  return mask;
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
  if (radius < 0) throw InvalidArgument("dilation radius must be >= 0");
  if (radius == 0) return mask;
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> a(mask.pixel_count());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = mask.test(i) ? 1 : 0;
  std::vector<std::uint8_t> b(a.size());
  dilate_pass(a, b, w, h, radius, true);
  dilate_pass(b, a, w, h, radius, false);
  BinaryMask out(mask.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a[i] != 0);
  return out;
}

BinaryMask target_inpaint_mask(const BinaryMask& target_head, int radius) {
  if (radius < 1) throw InvalidArgument("inpainting dilation radius must be >= 1");
  return dilate(target_head, radius).minus(target_head);
}

AnimatedInpaintMasks animated_inpaint_mask(const BinaryMask& animated_head,
                                           const BinaryMask& target_head, int radius) {
  require_same_size(animated_head.size(), target_head.size(), "animated_inpaint_mask");
  if (radius < 1) throw InvalidArgument("inpainting dilation radius must be >= 1");
  BinaryMask dilated_union = dilate(animated_head.united(target_head), radius);
  BinaryMask inpaint = dilated_union.minus(animated_head);
  return {std::move(inpaint), std::move(dilated_union)};
}

GrayImage grayscale_head(const RgbImage& image, const BinaryMask& head) {
  require_same_size(image.size(), head.size(), "grayscale_head");
  GrayImage out(image.width(), image.height());
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    if (head.test(i)) out[i] = luminance(image.pixel(i));
  }
  return out;
}

RgbImage background_cutout(const RgbImage& image, const BinaryMask& dilated_union) {
  require_same_size(image.size(), dilated_union.size(), "background_cutout");
  RgbImage out = image;
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    if (dilated_union.test(i)) out.set_pixel(i, {0, 0, 0});
  }
  return out;
}

PreprocessResult preprocess(const RgbImage& animated, const LabelMap& animated_labels,
                            const RgbImage& target, const LabelMap& target_labels,
                            const BlenderConfig& config) {
  config.validate();
  require_same_size(animated.size(), animated_labels.size(), "animated image vs labels");
  require_same_size(target.size(), target_labels.size(), "target image vs labels");
  require_same_size(animated.size(), target.size(), "animated vs target image");

  PreprocessResult r;
  r.animated_head = head_mask(animated_labels);
  r.target_head = head_mask(target_labels);
  const int target_radius = config.target_radius(target.height());
  r.target_dilated_head = dilate(r.target_head, target_radius);
  r.target_inpaint = r.target_dilated_head.minus(r.target_head);
  auto animated_masks =
      animated_inpaint_mask(r.animated_head, r.target_head, config.union_radius(target.height()));
  r.animated_inpaint = std::move(animated_masks.inpaint);
  r.dilated_union = std::move(animated_masks.dilated_union);
  r.gray_head = grayscale_head(animated, r.animated_head);
  r.background = background_cutout(target, r.dilated_union);
  return r;
}

}  // namespace headblend
