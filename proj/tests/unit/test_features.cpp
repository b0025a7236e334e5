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


#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "headblend/features.hpp"
#include "test_support.hpp"

using namespace headblend;

namespace {

void put_le32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

std::vector<std::uint8_t> header(std::uint32_t version, std::uint32_t h, std::uint32_t w,
                                 std::uint32_t c) {
  std::vector<std::uint8_t> out = {'F', 'M', 'A', 'P'};
  put_le32(out, version);
  put_le32(out, h);
  put_le32(out, w);
  put_le32(out, c);
  return out;
}

void put_float(std::vector<std::uint8_t>& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_le32(out, bits);
}

std::uint64_t format_offset(std::span<const std::uint8_t> bytes) {
  try {
    decode_features(bytes);
  } catch (const FormatError& e) {
    return e.offset();
  }
  FAIL("expected FormatError");
  return 0;
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("feature map validation") {
    CHECK_THROWS_AS(FeatureMap(2, 2, 1, std::vector<float>(4)), InvalidArgument);
    CHECK_THROWS_AS(FeatureMap(2, 2, 2, std::vector<float>(7)), InvalidArgument);
    std::vector<float> v(8, 0.f);
    v[3] = std::numeric_limits<float>::quiet_NaN();
    CHECK_THROWS_AS(FeatureMap(2, 2, 2, v), InvalidArgument);
    v[3] = std::numeric_limits<float>::infinity();
    CHECK_THROWS_AS(FeatureMap(2, 2, 2, v), InvalidArgument);
  }

  TEST_CASE("pyramid features") {
    const auto flat = hbtest::uniform_image(16, 12, {40, 100, 220});
    const auto f = extract_pyramid_features(flat, 3, 2);
    CHECK(f.channels() == 15);
    for (std::size_t i = 1; i < f.pixel_count(); ++i) {
      CHECK(std::equal(f.pixel(i).begin(), f.pixel(i).end(), f.pixel(0).begin()));
    }

    hbtest::Rng rng(21);
    const auto img = hbtest::random_image(rng, 9, 7);
    const auto base = extract_pyramid_features(img, 1, 0);
    CHECK(base.channels() == 5);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      for (int k = 0; k < 3; ++k) CHECK(base.pixel(i)[k] == doctest::Approx(img.pixel(i)[k] / 255.0));
    }

    auto changed = img;
    changed.set_pixel(23, {1, 2, 3});
    const auto other = extract_pyramid_features(changed, 1, 0);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      const bool same = std::equal(base.pixel(i).begin(), base.pixel(i).end(), other.pixel(i).begin());
      CHECK(same == (i != 23));
    }

    CHECK(extract_pyramid_features(img, 2, 1) == extract_pyramid_features(img, 2, 1));
    CHECK_THROWS_AS(extract_pyramid_features(hbtest::uniform_image(3, 8, {0, 0, 0}), 3, 1),
                    InvalidArgument);
    CHECK_NOTHROW(extract_pyramid_features(hbtest::uniform_image(4, 4, {0, 0, 0}), 3, 1));
    CHECK_THROWS_AS(extract_pyramid_features(img, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(extract_pyramid_features(img, 1, -1), InvalidArgument);
  }

  TEST_CASE("centralize") {
    const FeatureMap f(2, 1, 3, {1, 2, 3, 5, 5, 5});
    const auto c = centralize(f);
    CHECK(c.pixel(0)[0] == -1.f);
    CHECK(c.pixel(0)[1] == 0.f);
    CHECK(c.pixel(0)[2] == 1.f);
    for (float v : c.pixel(1)) CHECK(v == 0.f);

    hbtest::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const auto r = hbtest::random_features(rng, 6, 5, hbtest::uniform_int(rng, 2, 16));
      const auto once = centralize(r);
      const auto twice = centralize(once);
      for (std::size_t i = 0; i < once.pixel_count(); ++i) {
        double mean = 0, scale = 0;
        for (float v : once.pixel(i)) {
          mean += v;
          scale = std::max(scale, double(std::abs(v)));
        }
        mean /= once.channels();
        // float storage: the mean is zero up to a few float ulps of the values
        CHECK(std::abs(mean) <= 4 * std::numeric_limits<float>::epsilon() * std::max(scale, 1e-30));
        for (int k = 0; k < once.channels(); ++k) {
          CHECK(twice.pixel(i)[k] == doctest::Approx(once.pixel(i)[k]).epsilon(1e-6).scale(1.0));
        }
      }
    }
  }

  TEST_CASE("encoding is bit exact") {
    const FeatureMap f(2, 1, 2, {1.0f, -2.5f, 0.0f, 3.25f});
    auto expected = header(1, 1, 2, 2);
    for (float v : {1.0f, -2.5f, 0.0f, 3.25f}) put_float(expected, v);
    CHECK(encode_features(f) == expected);
    CHECK(decode_features(expected) == f);
  }

  TEST_CASE("save and load round trip") {
    hbtest::Rng rng(41);
    hbtest::TempDir dir("features");
    const auto f = hbtest::random_features(rng, 8, 8, 6);
    save_features(f, dir / "f.fmap");
    const auto g = load_features(dir / "f.fmap");
    CHECK(g == f);
    CHECK(std::memcmp(f.values().data(), g.values().data(), f.values().size() * 4) == 0);
    CHECK_THROWS_AS(load_features(dir / "missing.fmap"), IoError);
  }

  TEST_CASE("format errors carry offsets") {
    auto bad_magic = header(1, 1, 1, 2);
    bad_magic[2] = 'X';
    CHECK(format_offset(bad_magic) == 2);

    auto short_header = header(1, 1, 1, 2);
    short_header.resize(11);
    CHECK(format_offset(short_header) == 11);

    CHECK(format_offset(header(2, 1, 1, 2)) == 4);
    CHECK(format_offset(header(1, 0, 1, 2)) == 8);
    CHECK(format_offset(header(1, 1, 0, 2)) == 12);
    CHECK(format_offset(header(1, 1, 1, 1)) == 16);

    auto truncated = header(1, 4, 4, 3);
    for (int i = 0; i < 10; ++i) put_float(truncated, 0.5f);
    CHECK(format_offset(truncated) == truncated.size());

    auto trailing = header(1, 1, 1, 2);
    put_float(trailing, 1.f);
    put_float(trailing, 2.f);
    trailing.push_back(0);
    CHECK(format_offset(trailing) == 28);

    auto nan = header(1, 1, 1, 2);
    put_float(nan, 1.f);
    put_float(nan, std::numeric_limits<float>::quiet_NaN());
    CHECK(format_offset(nan) == 24);

    hbtest::TempDir dir("features-bad");
    hbtest::write_bytes(dir / "bad.fmap", bad_magic);
    try {
      load_features(dir / "bad.fmap");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 2);
      const std::string what = e.what();
      CHECK(what.find("bad.fmap") != std::string::npos);
      CHECK(what.find("offset 2") != std::string::npos);
    }
  }
}
