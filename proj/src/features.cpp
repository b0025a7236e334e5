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

#include "headblend/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace headblend {

namespace {

constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kHeaderBytes = 20;
constexpr int kPerLevel = 5;

// Planar float image used while building the pyramid.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> v;

  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

struct Level {
  int width = 0;
  int height = 0;
  std::array<Plane, kPerLevel> planes;  // r, g, b, patch mean, patch variance
};

Plane downsample(const Plane& in) {
  Plane out;
  out.width = std::max(1, in.width / 2);
  out.height = std::max(1, in.height / 2);
  out.v.resize(static_cast<std::size_t>(out.width) * out.height);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const int x0 = std::min(2 * x, in.width - 1), x1 = std::min(2 * x + 1, in.width - 1);
      const int y0 = std::min(2 * y, in.height - 1), y1 = std::min(2 * y + 1, in.height - 1);
      out.v[static_cast<std::size_t>(y) * out.width + x] =
          0.25 * (in.at(x0, y0) + in.at(x1, y0) + in.at(x0, y1) + in.at(x1, y1));
    }
  }
  return out;
}

void patch_stats(const Plane& luma, int radius, Plane& mean, Plane& variance) {
  mean = {luma.width, luma.height, std::vector<double>(luma.v.size())};
  variance = mean;
  const double n = static_cast<double>((2 * radius + 1) * (2 * radius + 1));
  for (int y = 0; y < luma.height; ++y) {
    for (int x = 0; x < luma.width; ++x) {
      double s = 0.0, s2 = 0.0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int yy = std::clamp(y + dy, 0, luma.height - 1);
        for (int dx = -radius; dx <= radius; ++dx) {
          const double l = luma.at(std::clamp(x + dx, 0, luma.width - 1), yy);
          s += l;
          s2 += l * l;
        }
      }
      const std::size_t i = static_cast<std::size_t>(y) * luma.width + x;
      mean.v[i] = s / n;
      variance.v[i] = std::max(0.0, s2 / n - mean.v[i] * mean.v[i]);
    }
  }
}

// Sample coordinate in a level of `level_extent` pixels for full-resolution
// coordinate `x` of a `full_extent` image (pixel-centre aligned).
struct Tap {
  int lo;
  int hi;
  double t;
};

Tap make_tap(int x, int full_extent, int level_extent) {
  const double scale = static_cast<double>(full_extent) / level_extent;
  double s = (x + 0.5) / scale - 0.5;
  s = std::clamp(s, 0.0, static_cast<double>(level_extent - 1));
  const int lo = static_cast<int>(std::floor(s));
  const int hi = std::min(lo + 1, level_extent - 1);
  return {lo, hi, s - lo};
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
  return v;
}

}  // namespace

FeatureMap::FeatureMap(int width, int height, int channels, std::vector<float> values)
    : size_{width, height}, channels_(channels), values_(std::move(values)) {
  if (width < 1 || height < 1) throw InvalidArgument("feature map dimensions must be positive");
  if (channels < 2) throw InvalidArgument("feature map needs at least 2 channels");
  if (values_.size() != size_.pixel_count() * static_cast<std::size_t>(channels)) {
    throw InvalidArgument("feature map buffer has " + std::to_string(values_.size()) +
                          " values, expected " +
                          std::to_string(size_.pixel_count() * channels));
  }
  for (float v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("feature map contains a non-finite value");
  }
}

FeatureMap extract_pyramid_features(const RgbImage& image, int levels, int patch_radius) {
  if (levels < 1) throw InvalidArgument("pyramid levels must be >= 1");
  if (patch_radius < 0) throw InvalidArgument("patch radius must be >= 0");
  const long min_extent = 1L << (levels - 1);
  if (image.width() < min_extent || image.height() < min_extent) {
    throw InvalidArgument("image " + to_string(image.size()) + " too small for " +
                          std::to_string(levels) + " pyramid levels");
  }

  const int w = image.width();
  const int h = image.height();
  std::array<Plane, 3> rgb;
  for (auto& p : rgb) p = {w, h, std::vector<double>(image.pixel_count())};
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    const Rgb px = image.pixel(i);
    for (int c = 0; c < 3; ++c) rgb[c].v[i] = px[c] / 255.0;
  }

  std::vector<Level> pyramid;
  for (int l = 0; l < levels; ++l) {
    if (l > 0) {
      for (auto& p : rgb) p = downsample(p);
    }
    Level level;
    level.width = rgb[0].width;
    level.height = rgb[0].height;
    Plane luma{level.width, level.height, std::vector<double>(rgb[0].v.size())};
    for (std::size_t i = 0; i < luma.v.size(); ++i) {
      luma.v[i] = 0.299 * rgb[0].v[i] + 0.587 * rgb[1].v[i] + 0.114 * rgb[2].v[i];
    }
    for (int c = 0; c < 3; ++c) level.planes[c] = rgb[c];
    patch_stats(luma, patch_radius, level.planes[3], level.planes[4]);
    pyramid.push_back(std::move(level));
  }

  const int channels = kPerLevel * levels;
  std::vector<float> values(image.pixel_count() * channels);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float* out = values.data() + (static_cast<std::size_t>(y) * w + x) * channels;
      for (int l = 0; l < levels; ++l) {
        const Level& level = pyramid[l];
        const Tap tx = make_tap(x, w, level.width);
        const Tap ty = make_tap(y, h, level.height);
        for (int c = 0; c < kPerLevel; ++c) {
          const Plane& p = level.planes[c];
          const double top = p.at(tx.lo, ty.lo) * (1.0 - tx.t) + p.at(tx.hi, ty.lo) * tx.t;
          const double bottom = p.at(tx.lo, ty.hi) * (1.0 - tx.t) + p.at(tx.hi, ty.hi) * tx.t;
          out[l * kPerLevel + c] = static_cast<float>(top * (1.0 - ty.t) + bottom * ty.t);
        }
      }
    }
  }
  return FeatureMap(w, h, channels, std::move(values));
}

FeatureMap centralize(const FeatureMap& features) {
  const int c = features.channels();
  std::vector<float> values(features.values().begin(), features.values().end());
  for (std::size_t i = 0; i < features.pixel_count(); ++i) {
    float* v = values.data() + i * c;
    double mean = 0.0;
    for (int k = 0; k < c; ++k) mean += v[k];
    mean /= c;
    for (int k = 0; k < c; ++k) v[k] = static_cast<float>(v[k] - mean);
  }
  return FeatureMap(features.width(), features.height(), c, std::move(values));
}

std::vector<std::uint8_t> encode_features(const FeatureMap& features) {
  std::vector<std::uint8_t> out = {'F', 'M', 'A', 'P'};
  out.reserve(kHeaderBytes + features.values().size() * 4);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(features.height()));
  put_u32(out, static_cast<std::uint32_t>(features.width()));
  put_u32(out, static_cast<std::uint32_t>(features.channels()));
  for (float v : features.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

FeatureMap decode_features(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kMagic[4] = {'F', 'M', 'A', 'P'};
  for (std::size_t i = 0; i < 4; ++i) {
    if (i >= bytes.size()) throw FormatError("truncated feature file magic", bytes.size());
    if (bytes[i] != kMagic[i]) throw FormatError("bad feature file magic", i);
  }
  if (bytes.size() < kHeaderBytes) throw FormatError("truncated feature file header", bytes.size());
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kFormatVersion) {
    throw FormatError("unsupported feature file version " + std::to_string(version), 4);
  }
  const std::uint32_t height = get_u32(bytes, 8);
  const std::uint32_t width = get_u32(bytes, 12);
  const std::uint32_t channels = get_u32(bytes, 16);
  constexpr auto kMaxDim = static_cast<std::uint32_t>(std::numeric_limits<int>::max());
  if (height == 0 || height > kMaxDim) throw FormatError("invalid feature map height", 8);
  if (width == 0 || width > kMaxDim) throw FormatError("invalid feature map width", 12);
  if (channels < 2 || channels > kMaxDim) throw FormatError("invalid feature channel count", 16);

  const unsigned __int128 count = static_cast<unsigned __int128>(height) * width * channels;
  const unsigned __int128 expected = kHeaderBytes + count * 4;
  if (expected > bytes.size()) {
    throw FormatError("truncated feature payload: header declares " + std::to_string(height) +
                          "x" + std::to_string(width) + "x" + std::to_string(channels),
                      bytes.size());
  }
  if (expected < bytes.size()) {
    throw FormatError("trailing bytes after feature payload", static_cast<std::uint64_t>(expected));
  }
  std::vector<float> values(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t offset = kHeaderBytes + 4 * i;
    values[i] = std::bit_cast<float>(get_u32(bytes, offset));
    if (!std::isfinite(values[i])) throw FormatError("non-finite feature value", offset);
  }
  return FeatureMap(static_cast<int>(width), static_cast<int>(height), static_cast<int>(channels),
                    std::move(values));
}

void save_features(const FeatureMap& features, const std::filesystem::path& path) {
  const auto bytes = encode_features(features);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open feature file for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing feature file: " + path.string());
}

FeatureMap load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_features(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.reason(), e.offset());
  }
}

}  // namespace headblend
