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

#include "headblend/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

namespace headblend {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void on_png_error(png_structp png, png_const_charp message) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = message;
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 (gray) or 3 (rgb)
  std::vector<std::uint8_t> pixels;
};

// `want_rgb` expands everything to RGB; otherwise the file must be gray and
// is returned with its raw sample values (sub-byte depths unpacked, not
// scaled).
Decoded decode_png(const std::filesystem::path& path, bool want_rgb) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path.string());
  png_byte signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    throw InvalidArgument(path.string() + ": not a PNG file");
  }

  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, on_png_error,
                                           on_png_warning);
  if (!png) throw IoError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  Decoded out;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InvalidArgument(path.string() + ": corrupt PNG: " + error);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  const bool is_gray = (color_type & PNG_COLOR_MASK_COLOR) == 0 &&
                       color_type != PNG_COLOR_TYPE_PALETTE;
  if (!want_rgb && !is_gray) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InvalidArgument(path.string() + ": expected a grayscale PNG");
  }
  if (depth == 16) png_set_strip_16(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  if (depth < 8) {
    if (want_rgb && is_gray) {
      png_set_expand_gray_1_2_4_to_8(png);
    } else {
      png_set_packing(png);
    }
  }
  if (want_rgb && is_gray) png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  if (stride != static_cast<std::size_t>(out.width) * out.channels) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InvalidArgument(path.string() + ": unsupported PNG layout");
  }
  out.pixels.resize(stride * out.height);
  rows.resize(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void encode_png(const std::filesystem::path& path, int width, int height, int color_type,
                int bit_depth, const std::vector<std::uint8_t>& packed, std::size_t stride) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, on_png_error,
                                            on_png_warning);
  if (!png) throw IoError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(path.string() + ": PNG write failed: " + error);
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(packed.data() + y * stride);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw IoError("failed writing " + path.string());
}

}  // namespace

RgbImage read_rgb_png(const std::filesystem::path& path) {
  Decoded d = decode_png(path, true);
  return RgbImage(d.width, d.height, std::move(d.pixels));
}

GrayImage read_gray_png(const std::filesystem::path& path) {
  Decoded d = decode_png(path, false);
  return GrayImage(d.width, d.height, std::move(d.pixels));
}

LabelMap read_label_png(const std::filesystem::path& path) {
  Decoded d = decode_png(path, false);
  try {
    return LabelMap(d.width, d.height, std::move(d.pixels));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

BinaryMask read_mask_png(const std::filesystem::path& path) {
  Decoded d = decode_png(path, false);
  BinaryMask mask(d.width, d.height);
  for (std::size_t i = 0; i < d.pixels.size(); ++i) mask.set(i, d.pixels[i] != 0);
  return mask;
}

void write_rgb_png(const RgbImage& image, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(image.data().begin(), image.data().end());
  encode_png(path, image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, bytes,
             static_cast<std::size_t>(image.width()) * 3);
}

void write_gray_png(const GrayImage& image, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(image.data().begin(), image.data().end());
  encode_png(path, image.width(), image.height(), PNG_COLOR_TYPE_GRAY, 8, bytes,
             static_cast<std::size_t>(image.width()));
}

void write_label_png(const LabelMap& labels, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(labels.labels().begin(), labels.labels().end());
  encode_png(path, labels.width(), labels.height(), PNG_COLOR_TYPE_GRAY, 8, bytes,
             static_cast<std::size_t>(labels.width()));
}

void write_mask_png(const BinaryMask& mask, const std::filesystem::path& path) {
  const std::size_t stride = (static_cast<std::size_t>(mask.width()) + 7) / 8;
  std::vector<std::uint8_t> packed(stride * mask.height(), 0);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.test(x, y)) packed[y * stride + x / 8] |= static_cast<std::uint8_t>(0x80 >> (x % 8));
    }
  }
  encode_png(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, 1, packed, stride);
}

}  // namespace headblend
