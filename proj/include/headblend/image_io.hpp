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

#ifndef HEADBLEND_IMAGE_IO_HPP_
#define HEADBLEND_IMAGE_IO_HPP_

#include <filesystem>

#include "headblend/types.hpp"

namespace headblend {

// Any PNG colour type is expanded to 8-bit RGB (alpha dropped, gray
// replicated).
RgbImage read_rgb_png(const std::filesystem::path& path);
// Requires a gray PNG (8-bit or lower bit depth).
GrayImage read_gray_png(const std::filesystem::path& path);
// Gray PNG whose values are label ids; throws InvalidArgument mentioning
// "invalid label" for ids outside 0..12.
LabelMap read_label_png(const std::filesystem::path& path);
// Gray PNG; any nonzero sample is set (1-bit masks read as 0/1).
BinaryMask read_mask_png(const std::filesystem::path& path);

void write_rgb_png(const RgbImage& image, const std::filesystem::path& path);
void write_gray_png(const GrayImage& image, const std::filesystem::path& path);
void write_label_png(const LabelMap& labels, const std::filesystem::path& path);
// 1-bit grayscale.
void write_mask_png(const BinaryMask& mask, const std::filesystem::path& path);

}  // namespace headblend

#endif  // HEADBLEND_IMAGE_IO_HPP_
