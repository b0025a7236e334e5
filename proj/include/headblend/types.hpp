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

#ifndef HEADBLEND_TYPES_HPP_
#define HEADBLEND_TYPES_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace headblend {

// Error categories shared with the C API (see hb_status in headblend.h).
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kFormat = 2,
  kIo = 3,
  kEmptyDomain = 4,
  kCapExceeded = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error(ErrorCode::kInvalidArgument, message) {}
};

// Malformed serialized data. `offset` is the byte position where decoding
// failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& message, std::uint64_t offset)
      : Error(ErrorCode::kFormat,
              message + " (at byte offset " + std::to_string(offset) + ")"),
        reason_(message),
        offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
  std::uint64_t offset_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorCode::kIo, message) {}
};

class EmptyDomain : public Error {
 public:
  explicit EmptyDomain(const std::string& message) : Error(ErrorCode::kEmptyDomain, message) {}
};

class CapExceeded : public Error {
 public:
  explicit CapExceeded(const std::string& message) : Error(ErrorCode::kCapExceeded, message) {}
};

struct Size {
  int width = 0;
  int height = 0;

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  friend bool operator==(const Size&, const Size&) = default;
};

std::string to_string(Size size);

// Throws InvalidArgument naming `what` when the two sizes differ.
void require_same_size(Size a, Size b, std::string_view what);

using Rgb = std::array<std::uint8_t, 3>;

// 8-bit RGB image, row-major, interleaved.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height);
  RgbImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return size_.width; }
  int height() const { return size_.height; }
  Size size() const { return size_; }
  std::size_t pixel_count() const { return size_.pixel_count(); }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  Rgb pixel(std::size_t index) const {
    const std::uint8_t* p = data_.data() + 3 * index;
    return {p[0], p[1], p[2]};
  }
  Rgb at(int x, int y) const { return pixel(linear(x, y)); }
  void set_pixel(std::size_t index, Rgb value) {
    std::uint8_t* p = data_.data() + 3 * index;
    p[0] = value[0];
    p[1] = value[1];
    p[2] = value[2];
  }
  std::size_t linear(int x, int y) const {
    return static_cast<std::size_t>(y) * size_.width + x;
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  Size size_;
  std::vector<std::uint8_t> data_;
};

// 8-bit single channel image.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height);
  GrayImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return size_.width; }
  int height() const { return size_.height; }
  Size size() const { return size_; }
  std::size_t pixel_count() const { return size_.pixel_count(); }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }
  std::uint8_t operator[](std::size_t index) const { return data_[index]; }
  std::uint8_t& operator[](std::size_t index) { return data_[index]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  Size size_;
  std::vector<std::uint8_t> data_;
};

// One boolean per pixel. Set algebra requires equal sizes.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool value = false);
  explicit BinaryMask(Size size, bool value = false)
      : BinaryMask(size.width, size.height, value) {}

  int width() const { return size_.width; }
  int height() const { return size_.height; }
  Size size() const { return size_; }
  std::size_t pixel_count() const { return size_.pixel_count(); }

  bool test(std::size_t index) const { return bits_[index] != 0; }
  bool test(int x, int y) const {
    return test(static_cast<std::size_t>(y) * size_.width + x);
  }
  void set(std::size_t index, bool value = true) { bits_[index] = value ? 1 : 0; }
  void set(int x, int y, bool value = true) {
    set(static_cast<std::size_t>(y) * size_.width + x, value);
  }

  std::size_t count() const;
  bool empty() const { return count() == 0; }
  // Linear indices of set pixels, ascending.
  std::vector<std::uint32_t> indices() const;

  BinaryMask united(const BinaryMask& other) const;
  BinaryMask minus(const BinaryMask& other) const;
  BinaryMask intersected(const BinaryMask& other) const;
  bool is_subset_of(const BinaryMask& other) const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  Size size_;
  std::vector<std::uint8_t> bits_;
};

inline constexpr std::uint8_t kMaxLabelId = 12;

// Per-pixel semantic label ids from a face parser. Every id is in 0..12.
class LabelMap {
 public:
  LabelMap() = default;
  // Throws InvalidArgument("invalid label ...") for ids outside 0..12.
  LabelMap(int width, int height, std::vector<std::uint8_t> labels);

  int width() const { return size_.width; }
  int height() const { return size_.height; }
  Size size() const { return size_; }
  std::size_t pixel_count() const { return size_.pixel_count(); }
  std::span<const std::uint8_t> labels() const { return labels_; }
  std::uint8_t operator[](std::size_t index) const { return labels_[index]; }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  Size size_;
  std::vector<std::uint8_t> labels_;
};

struct LabelEntry {
  std::uint8_t id;
  std::string_view name;
};

// The fixed 13-entry label scheme: 0=background ... 12=body.
std::span<const LabelEntry> canonical_labels();

// Head-area labels 1..10 (skin through hair; neck and body excluded).
std::span<const std::uint8_t> default_head_labels();

enum class Region { kFace, kHair, kEye, kNose, kLip, kTooth, kInpainting };

std::string_view region_name(Region region);
std::optional<Region> parse_region(std::string_view name);

struct RegionSpec {
  Region region;
  // Empty for the mask-defined inpainting region.
  std::vector<std::uint8_t> labels;
};

// face={1,2,3} eye={4,5} nose={6} lip={7,8} tooth={9} hair={10},
// inpainting={} (mask-defined).
std::vector<RegionSpec> default_region_specs();

// Sorted linear pixel indices belonging to one region of a frame.
class RegionIndex {
 public:
  RegionIndex() = default;
  // Throws InvalidArgument unless `pixels` is strictly increasing and in
  // range for `frame`.
  RegionIndex(Region region, Size frame, std::vector<std::uint32_t> pixels);

  static RegionIndex from_labels(const LabelMap& labels, const RegionSpec& spec);
  static RegionIndex from_mask(Region region, const BinaryMask& mask);

  Region region() const { return region_; }
  Size frame() const { return frame_; }
  std::span<const std::uint32_t> pixels() const { return pixels_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  BinaryMask to_mask() const;

 private:
  Region region_ = Region::kFace;
  Size frame_;
  std::vector<std::uint32_t> pixels_;
};

// Warped colours plus the pixels where a colour exists. Colours outside
// `valid` are zero.
struct ReferenceImage {
  RgbImage colors;
  BinaryMask valid;

  static ReferenceImage empty(Size size) {
    return {RgbImage(size.width, size.height), BinaryMask(size)};
  }
};

enum class FallbackPolicy { kSkip, kGlobalHead };

std::string_view fallback_name(FallbackPolicy policy);
std::optional<FallbackPolicy> parse_fallback(std::string_view name);

struct BlenderConfig {
  double tau = 0.01;
  double epsilon = 1e-8;
  // Radius for the target head dilation; unset scales 7 px @ 512 rows.
  std::optional<int> dilate_target;
  // Radius for the union dilation; unset scales 11 px @ 512 rows.
  std::optional<int> dilate_union;
  int feather = 3;
  FallbackPolicy fallback = FallbackPolicy::kGlobalHead;
  int feature_levels = 3;
  int patch_radius = 2;

  // Throws InvalidArgument on tau <= 0, epsilon <= 0 or negative radii.
  void validate() const;
  int target_radius(int image_height) const;
  int union_radius(int image_height) const;
};

}  // namespace headblend

#endif  // HEADBLEND_TYPES_HPP_
