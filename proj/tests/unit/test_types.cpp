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

#include <set>

#include "headblend/types.hpp"
#include "test_support.hpp"

using namespace headblend;

TEST_SUITE("core_types") {
  TEST_CASE("canonical label table") {
    const auto table = canonical_labels();
    CHECK(table.size() == 13);
    std::set<int> ids;
    for (const auto& e : table) ids.insert(e.id);
    CHECK(ids.size() == 13);
    bool hair = false;
    for (const auto& e : table) hair = hair || (e.id == 10 && e.name == "hair");
    CHECK(hair);
    CHECK(table[0].name == "background");
    CHECK(table[12].name == "body");
  }

  TEST_CASE("default region specs") {
    const auto specs = default_region_specs();
    REQUIRE(specs.size() == 7);
    std::set<int> seen;
    for (const auto& s : specs) {
      for (auto id : s.labels) {
        CHECK(id >= 1);
        CHECK(id <= 10);
        CHECK(seen.insert(id).second);
      }
    }
    CHECK(seen.count(0) == 0);
    CHECK(specs.back().region == Region::kInpainting);
    CHECK(specs.back().labels.empty());
    auto labels_of = [&](Region r) {
      for (const auto& s : specs) {
        if (s.region == r) return s.labels;
      }
      return std::vector<std::uint8_t>{};
    };
    CHECK(labels_of(Region::kFace) == std::vector<std::uint8_t>{1, 2, 3});
    CHECK(labels_of(Region::kEye) == std::vector<std::uint8_t>{4, 5});
    CHECK(labels_of(Region::kLip) == std::vector<std::uint8_t>{7, 8});
    CHECK(labels_of(Region::kHair) == std::vector<std::uint8_t>{10});
  }

  TEST_CASE("region names round trip") {
    for (const auto& s : default_region_specs()) {
      const auto parsed = parse_region(region_name(s.region));
      REQUIRE(parsed);
      CHECK(*parsed == s.region);
    }
    CHECK_FALSE(parse_region("neck"));
  }

  TEST_CASE("label map rejects ids above 12") {
    CHECK_NOTHROW(LabelMap(2, 1, {0, 12}));
    try {
      LabelMap(2, 1, {0, 200});
      FAIL("expected InvalidArgument");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find("invalid label") != std::string::npos);
    }
    CHECK_THROWS_AS(LabelMap(2, 2, {0, 1}), InvalidArgument);
  }

  TEST_CASE("region index validation") {
    const Size frame{4, 4};
    CHECK_NOTHROW(RegionIndex(Region::kFace, frame, {0, 3, 15}));
    CHECK_THROWS_AS(RegionIndex(Region::kFace, frame, {3, 3}), InvalidArgument);
    CHECK_THROWS_AS(RegionIndex(Region::kFace, frame, {4, 2}), InvalidArgument);
    CHECK_THROWS_AS(RegionIndex(Region::kFace, frame, {16}), InvalidArgument);
  }

  TEST_CASE("region index from labels covers exactly the region labels") {
    hbtest::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const auto labels = hbtest::random_labels(rng, 9, 7, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
      std::vector<std::uint32_t> all;
      for (const auto& spec : default_region_specs()) {
        if (spec.labels.empty()) continue;
        const auto idx = RegionIndex::from_labels(labels, spec);
        for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
          const bool member = std::find(spec.labels.begin(), spec.labels.end(), labels[i]) !=
                              spec.labels.end();
          CHECK(idx.to_mask().test(i) == member);
        }
        all.insert(all.end(), idx.pixels().begin(), idx.pixels().end());
      }
      std::sort(all.begin(), all.end());
      CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    }
  }

  TEST_CASE("mask set algebra properties") {
    hbtest::Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      const int w = hbtest::uniform_int(rng, 1, 12), h = hbtest::uniform_int(rng, 1, 12);
      const auto a = hbtest::random_mask(rng, w, h, 0.4);
      const auto b = hbtest::random_mask(rng, w, h, 0.4);
      CHECK(a.united(b).minus(a).is_subset_of(b));
      CHECK(a.minus(a).empty());
      CHECK(a.intersected(b).is_subset_of(a));
      CHECK(a.united(b).count() == a.count() + b.count() - a.intersected(b).count());
    }
    CHECK_THROWS_AS(BinaryMask(2, 2).united(BinaryMask(2, 3)), InvalidArgument);
  }

  TEST_CASE("config validation and radii") {
    BlenderConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.target_radius(512) == 7);
    CHECK(c.union_radius(512) == 11);
    CHECK(c.target_radius(256) == 4);  // round(3.5)
    CHECK(c.union_radius(256) == 6);   // round(5.5)
    CHECK(c.target_radius(16) == 1);
    c.dilate_union = 0;
    CHECK(c.union_radius(512) == 0);
    c.tau = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.epsilon = -1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.dilate_target = -1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    CHECK(parse_fallback("skip") == FallbackPolicy::kSkip);
    CHECK(parse_fallback("global-head") == FallbackPolicy::kGlobalHead);
    CHECK_FALSE(parse_fallback("nearest"));
  }
}
