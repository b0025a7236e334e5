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

#ifndef HEADBLEND_FEATURES_HPP_
#define HEADBLEND_FEATURES_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "headblend/types.hpp"

namespace headblend {

// H x W x C grid of finite 32-bit descriptors, row-major, channel-fastest.
class FeatureMap {
 public:
  FeatureMap() = default;
  // Throws InvalidArgument if channels < 2, the buffer length is wrong or a
  // value is not finite.
  FeatureMap(int width, int height, int channels, std::vector<float> values);

  int width() const { return size_.width; }
  int height() const { return size_.height; }
  Size size() const { return size_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return size_.pixel_count(); }

  std::span<const float> values() const { return values_; }
  std::span<const float> pixel(std::size_t index) const {
    return {values_.data() + index * channels_, static_cast<std::size_t>(channels_)};
  }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  Size size_;
  int channels_ = 0;
  std::vector<float> values_;
};

// Classical multi-scale descriptor. For each of `levels` pyramid levels
// (2x2 box downsampling) the pixel gets that level's RGB in [0,1] plus the
// mean and variance of a (2r+1)^2 luminance patch, all bilinearly upsampled
// to full resolution. Channels = 5 * levels.
FeatureMap extract_pyramid_features(const RgbImage& image, int levels, int patch_radius);

// Subtracts each pixel's channel mean from its channels.
FeatureMap centralize(const FeatureMap& features);

// FMAP container: "FMAP", u32 version=1, height, width, channels, then the
// values as little-endian IEEE-754 binary32.
std::vector<std::uint8_t> encode_features(const FeatureMap& features);
FeatureMap decode_features(std::span<const std::uint8_t> bytes);

void save_features(const FeatureMap& features, const std::filesystem::path& path);
FeatureMap load_features(const std::filesystem::path& path);

}  // namespace headblend

#endif  // HEADBLEND_FEATURES_HPP_
