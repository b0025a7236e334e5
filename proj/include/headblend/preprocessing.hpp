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

#ifndef HEADBLEND_PREPROCESSING_HPP_
#define HEADBLEND_PREPROCESSING_HPP_

#include <cstdint>
#include <span>

#include "headblend/types.hpp"

namespace headblend {

// Pixels whose label is one of `head_ids`. Throws InvalidArgument for ids
// outside the canonical set.
BinaryMask head_mask(const LabelMap& labels,
                     std::span<const std::uint8_t> head_ids = default_head_labels());

// Dilation with a (2r+1)x(2r+1) square element, clamped at the borders.
BinaryMask dilate(const BinaryMask& mask, int radius);

// dilate(target_head, radius) minus target_head. Requires radius >= 1.
BinaryMask target_inpaint_mask(const BinaryMask& target_head, int radius);

struct AnimatedInpaintMasks {
  BinaryMask inpaint;        // dilated_union minus the animated head
  BinaryMask dilated_union;  // dilate(animated head | target head)
};

AnimatedInpaintMasks animated_inpaint_mask(const BinaryMask& animated_head,
                                           const BinaryMask& target_head, int radius);

// BT.601 luminance inside the mask, 0 elsewhere.
GrayImage grayscale_head(const RgbImage& image, const BinaryMask& head);

// Copy of `image` with every pixel inside `dilated_union` zeroed.
RgbImage background_cutout(const RgbImage& image, const BinaryMask& dilated_union);

std::uint8_t luminance(Rgb rgb);

// Everything the reference-creation and compositing stages consume.
struct PreprocessResult {
  BinaryMask animated_head;
  BinaryMask target_head;
  BinaryMask target_dilated_head;
  BinaryMask target_inpaint;
  BinaryMask animated_inpaint;
  BinaryMask dilated_union;
  GrayImage gray_head;
  RgbImage background;
};

PreprocessResult preprocess(const RgbImage& animated, const LabelMap& animated_labels,
                            const RgbImage& target, const LabelMap& target_labels,
                            const BlenderConfig& config);

}  // namespace headblend

#endif  // HEADBLEND_PREPROCESSING_HPP_
