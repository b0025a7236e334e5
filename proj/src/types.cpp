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

#include "headblend/types.hpp"

#include <algorithm>
#include <cmath>

namespace headblend {

namespace {

void check_dimensions(int width, int height) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("image dimensions must be positive, got " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
}

void check_length(std::size_t actual, std::size_t expected, const char* what) {
  if (actual != expected) {
    throw InvalidArgument(std::string(what) + " buffer has " +
                          std::to_string(actual) + " bytes, expected " +
                          std::to_string(expected));
  }
}

constexpr std::array<LabelEntry, 13> kLabels = {{
    {0, "background"},
    {1, "skin"},
    {2, "left_brow"},
    {3, "right_brow"},
    {4, "left_eye"},
    {5, "right_eye"},
    {6, "nose"},
    {7, "upper_lip"},
    {8, "lower_lip"},
    {9, "tooth"},
    {10, "hair"},
    {11, "neck"},
    {12, "body"},
}};

constexpr std::array<std::uint8_t, 10> kHeadLabels = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

constexpr std::array<std::pair<Region, std::string_view>, 7> kRegionNames = {{
    {Region::kFace, "face"},
    {Region::kHair, "hair"},
    {Region::kEye, "eye"},
    {Region::kNose, "nose"},
    {Region::kLip, "lip"},
    {Region::kTooth, "tooth"},
    {Region::kInpainting, "inpainting"},
}};

int scaled_radius(int base, int image_height) {
  const double r = std::round(base * static_cast<double>(image_height) / 512.0);
  return std::max(1, static_cast<int>(r));
}

}  // namespace

std::string to_string(Size size) {
  return std::to_string(size.width) + "x" + std::to_string(size.height);
}

void require_same_size(Size a, Size b, std::string_view what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch " +
                          to_string(a) + " vs " + to_string(b));
  }
}

RgbImage::RgbImage(int width, int height) : size_{width, height} {
  check_dimensions(width, height);
  data_.assign(size_.pixel_count() * 3, 0);
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> data)
    : size_{width, height}, data_(std::move(data)) {
  check_dimensions(width, height);
  check_length(data_.size(), size_.pixel_count() * 3, "RGB image");
}

GrayImage::GrayImage(int width, int height) : size_{width, height} {
  check_dimensions(width, height);
  data_.assign(size_.pixel_count(), 0);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : size_{width, height}, data_(std::move(data)) {
  check_dimensions(width, height);
  check_length(data_.size(), size_.pixel_count(), "gray image");
}

BinaryMask::BinaryMask(int width, int height, bool value) : size_{width, height} {
  check_dimensions(width, height);
  bits_.assign(size_.pixel_count(), value ? 1 : 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::vector<std::uint32_t> BinaryMask::indices() const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

BinaryMask BinaryMask::united(const BinaryMask& other) const {
  require_same_size(size_, other.size_, "mask union");
  BinaryMask out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] |= other.bits_[i];
  return out;
}

BinaryMask BinaryMask::minus(const BinaryMask& other) const {
  require_same_size(size_, other.size_, "mask difference");
  BinaryMask out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    out.bits_[i] = (bits_[i] && !other.bits_[i]) ? 1 : 0;
  }
  return out;
}

BinaryMask BinaryMask::intersected(const BinaryMask& other) const {
  require_same_size(size_, other.size_, "mask intersection");
  BinaryMask out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] &= other.bits_[i];
  return out;
}

bool BinaryMask::is_subset_of(const BinaryMask& other) const {
  require_same_size(size_, other.size_, "mask subset test");
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && !other.bits_[i]) return false;
  }
  return true;
}

LabelMap::LabelMap(int width, int height, std::vector<std::uint8_t> labels)
    : size_{width, height}, labels_(std::move(labels)) {
  check_dimensions(width, height);
  check_length(labels_.size(), size_.pixel_count(), "label map");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] > kMaxLabelId) {
      throw InvalidArgument("invalid label " + std::to_string(labels_[i]) +
                            " at pixel " + std::to_string(i));
    }
  }
}

std::span<const LabelEntry> canonical_labels() { return kLabels; }

std::span<const std::uint8_t> default_head_labels() { return kHeadLabels; }

std::string_view region_name(Region region) {
  for (const auto& [r, name] : kRegionNames) {
    if (r == region) return name;
  }
  return "unknown";
}

std::optional<Region> parse_region(std::string_view name) {
  for (const auto& [r, n] : kRegionNames) {
    if (n == name) return r;
  }
  return std::nullopt;
}

std::vector<RegionSpec> default_region_specs() {
  return {
      {Region::kFace, {1, 2, 3}},
      {Region::kHair, {10}},
      {Region::kEye, {4, 5}},
      {Region::kNose, {6}},
      {Region::kLip, {7, 8}},
      {Region::kTooth, {9}},
      {Region::kInpainting, {}},
  };
}

RegionIndex::RegionIndex(Region region, Size frame, std::vector<std::uint32_t> pixels)
    : region_(region), frame_(frame), pixels_(std::move(pixels)) {
  const std::size_t limit = frame_.pixel_count();
  for (std::size_t i = 0; i < pixels_.size(); ++i) {
    if (pixels_[i] >= limit) {
      throw InvalidArgument("region index " + std::to_string(pixels_[i]) +
                            " out of range for frame " + to_string(frame_));
    }
    if (i > 0 && pixels_[i] <= pixels_[i - 1]) {
      throw InvalidArgument("region indices must be strictly increasing");
    }
  }
}

RegionIndex RegionIndex::from_labels(const LabelMap& labels, const RegionSpec& spec) {
  std::array<bool, 256> member{};
  for (std::uint8_t id : spec.labels) member[id] = true;
  std::vector<std::uint32_t> pixels;
  const auto ids = labels.labels();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (member[ids[i]]) pixels.push_back(static_cast<std::uint32_t>(i));
  }
  return RegionIndex(spec.region, labels.size(), std::move(pixels));
}

RegionIndex RegionIndex::from_mask(Region region, const BinaryMask& mask) {
  return RegionIndex(region, mask.size(), mask.indices());
}

BinaryMask RegionIndex::to_mask() const {
  BinaryMask mask(frame_);
  for (std::uint32_t p : pixels_) mask.set(p);
  return mask;
}

std::string_view fallback_name(FallbackPolicy policy) {
  return policy == FallbackPolicy::kSkip ? "skip" : "global-head";
}

std::optional<FallbackPolicy> parse_fallback(std::string_view name) {
  if (name == "skip") return FallbackPolicy::kSkip;
  if (name == "global-head") return FallbackPolicy::kGlobalHead;
  return std::nullopt;
}

void BlenderConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("tau must be a positive finite number");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("epsilon must be a positive finite number");
  }
  if (dilate_target && *dilate_target < 1) {
    throw InvalidArgument("dilate_target must be >= 1");
  }
  if (dilate_union && *dilate_union < 1) {
    throw InvalidArgument("dilate_union must be >= 1");
  }
  if (feather < 0) throw InvalidArgument("feather must be >= 0");
  if (feature_levels < 1) throw InvalidArgument("feature_levels must be >= 1");
  if (patch_radius < 0) throw InvalidArgument("patch_radius must be >= 0");
}

int BlenderConfig::target_radius(int image_height) const {
  return dilate_target ? *dilate_target : scaled_radius(7, image_height);
}

int BlenderConfig::union_radius(int image_height) const {
  return dilate_union ? *dilate_union : scaled_radius(11, image_height);
}

}  // namespace headblend
