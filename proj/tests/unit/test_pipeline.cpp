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

#include "headblend/image_io.hpp"
#include "headblend/metrics.hpp"
#include "headblend/pipeline.hpp"
#include "headblend/synthetic.hpp"
#include "test_support.hpp"

using namespace headblend;

namespace {

PairPaths write_pair(const hbtest::TempDir& dir, const RgbImage& a, const LabelMap& la,
                     const RgbImage& t, const LabelMap& lt, const std::string& tag = "") {
  PairPaths p{dir / (tag + "a.png"), dir / (tag + "a_labels.png"), dir / (tag + "t.png"),
              dir / (tag + "t_labels.png")};
  write_rgb_png(a, p.animated_image);
  write_label_png(la, p.animated_labels);
  write_rgb_png(t, p.target_image);
  write_label_png(lt, p.target_labels);
  return p;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("key value documents") {
    const auto doc = KeyValueDocument::parse("# comment\n\n tau = 0.5 \nname=a = b\r\nempty =\n");
    CHECK(doc.get("tau") == "0.5");
    CHECK(doc.get("name") == "a = b");
    CHECK(doc.get("empty") == "");
    CHECK_FALSE(doc.get("missing"));
    try {
      KeyValueDocument::parse("a = 1\nbroken line\n");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 6);
    }
    CHECK_THROWS_AS(KeyValueDocument::parse(" = 3"), FormatError);

    KeyValueDocument d;
    d.set("b", "1");
    d.set("a", "2");
    d.set("b", "3");
    CHECK(d.to_string() == "b = 3\na = 2\n");
    CHECK(KeyValueDocument::parse(d.to_string()).entries() == d.entries());
  }

  TEST_CASE("config entries and files") {
    BlenderConfig c;
    apply_config_entry(c, "tau", "0.25");
    apply_config_entry(c, "epsilon", "1e-6");
    apply_config_entry(c, "dilate_target", "3");
    apply_config_entry(c, "dilate_union", "5");
    apply_config_entry(c, "feather", "0");
    apply_config_entry(c, "fallback", "skip");
    apply_config_entry(c, "feature_levels", "2");
    apply_config_entry(c, "patch_radius", "1");
    CHECK(c.tau == 0.25);
    CHECK(c.epsilon == 1e-6);
    CHECK(c.target_radius(512) == 3);
    CHECK(c.union_radius(512) == 5);
    CHECK(c.feather == 0);
    CHECK(c.fallback == FallbackPolicy::kSkip);
    CHECK(c.feature_levels == 2);
    CHECK(c.patch_radius == 1);
    CHECK_THROWS_AS(apply_config_entry(c, "sigma", "1"), InvalidArgument);
    CHECK_THROWS_AS(apply_config_entry(c, "tau", "fast"), InvalidArgument);
    CHECK_THROWS_AS(apply_config_entry(c, "tau", "0.1x"), InvalidArgument);
    CHECK_THROWS_AS(apply_config_entry(c, "feather", "2.5"), InvalidArgument);
    CHECK_THROWS_AS(apply_config_entry(c, "fallback", "never"), InvalidArgument);

    hbtest::TempDir dir("config");
    std::ofstream(dir / "ok.cfg") << "tau = 0.5\nfallback = skip\n";
    const auto loaded = load_config(dir / "ok.cfg");
    CHECK(loaded.tau == 0.5);
    CHECK(loaded.fallback == FallbackPolicy::kSkip);
    std::ofstream(dir / "bad.cfg") << "tau = -1\n";
    CHECK_THROWS_AS(load_config(dir / "bad.cfg"), InvalidArgument);
    CHECK_THROWS_AS(load_config(dir / "none.cfg"), IoError);
  }

  TEST_CASE("feature sources") {
    CHECK(FeatureSource::parse("pyramid").kind == FeatureSource::Kind::kPyramid);
    const auto f = FeatureSource::parse("file:a.fmap,b.fmap");
    CHECK(f.kind == FeatureSource::Kind::kFile);
    CHECK(f.animated == "a.fmap");
    CHECK(f.target == "b.fmap");
    CHECK(f.describe() == "file:a.fmap,b.fmap");
    CHECK_THROWS_AS(FeatureSource::parse("file:a.fmap"), InvalidArgument);
    CHECK_THROWS_AS(FeatureSource::parse("vgg"), InvalidArgument);
  }

  TEST_CASE("synthetic region labels") {
    const auto l = synthetic_region_labels(64, 0.3, 6, 5);
    std::size_t labelled = 0;
    for (auto v : l.labels()) labelled += v != 0;
    CHECK(labelled == 1229);  // round(0.3 * 4096)
    const auto regions = label_regions(l);
    for (const auto& r : regions) CHECK(r.size() >= 204);
    CHECK(synthetic_region_labels(64, 0.3, 6, 5) == l);
    CHECK_THROWS_AS(synthetic_region_labels(8, 1.5, 6, 1), InvalidArgument);
    CHECK_THROWS_AS(synthetic_region_labels(8, 0.5, 7, 1), InvalidArgument);
  }

  TEST_CASE("bench counts entries exactly") {
    BenchOptions o;
    o.sizes = {64};
    o.fractions = {0.3};
    o.seed = 3;
    const auto report = run_bench(o);
    REQUIRE(report.rows.size() == 1);
    const auto& row = report.rows[0];
    CHECK(row.counts_match);
    CHECK(report.all_match());
    REQUIRE(row.measured_entries);
    CHECK(*row.measured_entries == row.predicted_entries);
    REQUIRE(row.naive_measured);
    CHECK(*row.naive_measured == 16777216u);

    // independent count from the label maps
    const auto la = synthetic_region_labels(64, 0.3, 6, 3);
    const auto lt = synthetic_region_labels(64, 0.3, 6, 4);
    std::uint64_t expected = 0;
    for (std::uint8_t id : hbtest::region_representatives()) {
      const auto na = std::count(la.labels().begin(), la.labels().end(), id);
      const auto nt = std::count(lt.labels().begin(), lt.labels().end(), id);
      expected += static_cast<std::uint64_t>(na) * nt;
    }
    CHECK(row.predicted_entries == expected);
    REQUIRE(row.ratio);
    CHECK(std::abs(1.0 / *row.ratio - double(expected) / 16777216.0) <= 1e-9);

    o.sizes = {16};
    o.fractions = {1.0, 0.0};
    o.regions = 1;
    const auto edge = run_bench(o);
    REQUIRE(edge.rows.size() == 2);
    CHECK(*edge.rows[0].ratio == 1.0);
    CHECK(edge.rows[1].predicted_entries == 0);
    CHECK(*edge.rows[1].measured_entries == 0);
    CHECK_FALSE(edge.rows[1].ratio);
    CHECK(edge.to_text().find("undefined") != std::string::npos);

    o.sizes = {65};
    o.fractions = {0.1};
    const auto capped = run_bench(o);
    CHECK_FALSE(capped.rows[0].naive_measured);
    CHECK(capped.to_text().find("skipped(cap)") != std::string::npos);
    CHECK(capped.to_kv().find("bench.0.naive_measured = skipped(cap)") != std::string::npos);
    CHECK(capped.rows[0].counts_match);
  }

  TEST_CASE("portrait bench layout saves at least 5x at 64x64") {
    BenchOptions o;
    o.sizes = {64};
    o.layout = BenchOptions::Layout::kPortrait;
    const auto report = run_bench(o);
    REQUIRE(report.rows.size() == 1);
    REQUIRE(report.rows[0].ratio);
    CHECK(*report.rows[0].ratio >= 5.0);
    CHECK(report.all_match());
  }

  TEST_CASE("animated context image") {
    const auto p = make_synthetic_portrait(64, 2);
    const auto t = make_synthetic_portrait(64, 3);
    const auto pre = preprocess(p.image, p.labels, t.image, t.labels, BlenderConfig{});
    const auto ctx = animated_context_image(p.image, pre);
    for (std::size_t i = 0; i < ctx.pixel_count(); ++i) {
      if (pre.animated_head.test(i)) {
        CHECK(ctx.pixel(i) == p.image.pixel(i));
      } else if (!pre.dilated_union.test(i)) {
        CHECK(ctx.pixel(i) == t.image.pixel(i));
      }
    }
  }

  TEST_CASE("self swap reconstructs a small portrait") {
    const auto p = make_synthetic_portrait(64, 1);
    const PairInputs in{p.image, p.labels, p.image, p.labels};
    const auto r = swap_images(in, BlenderConfig{}, {});
    CHECK(psnr(r.blended, p.image) >= 30.0);
    for (std::size_t i = 0; i < p.image.pixel_count(); ++i) {
      if (!r.pre.dilated_union.test(i)) CHECK(r.blended.pixel(i) == p.image.pixel(i));
    }
    BlenderConfig hard;
    hard.feather = 0;
    const auto h = swap_images(in, hard, {});
    for (auto i : h.pre.animated_head.indices()) CHECK(h.blended.pixel(i) == h.recolored_head.pixel(i));
  }

  TEST_CASE("stage errors are prefixed") {
    const auto p = make_synthetic_portrait(32, 1);
    BlenderConfig cfg;
    cfg.dilate_union = 0;
    try {
      swap_images({p.image, p.labels, p.image, p.labels}, cfg, {});
      FAIL("expected an error");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).rfind("preprocess: ", 0) == 0);
    }
  }

  TEST_CASE("file features must match the images") {
    hbtest::TempDir dir("files");
    const auto p = make_synthetic_portrait(32, 4);
    const auto paths = write_pair(dir, p.image, p.labels, p.image, p.labels);
    hbtest::Rng rng(1);
    save_features(hbtest::random_features(rng, 32, 32, 6), dir / "a.fmap");
    save_features(hbtest::random_features(rng, 32, 32, 6), dir / "t.fmap");
    save_features(hbtest::random_features(rng, 16, 32, 6), dir / "small.fmap");
    const auto good = FeatureSource::parse("file:" + (dir / "a.fmap").string() + "," + (dir / "t.fmap").string());
    CHECK_NOTHROW(run_swap(paths, BlenderConfig{}, good, dir / "out.png", false));
    const auto bad = FeatureSource::parse("file:" + (dir / "small.fmap").string() + "," + (dir / "t.fmap").string());
    CHECK_THROWS_AS(run_swap(paths, BlenderConfig{}, bad, dir / "out2.png", false), InvalidArgument);
    const auto missing = FeatureSource::parse("file:" + (dir / "nope.fmap").string() + "," + (dir / "t.fmap").string());
    CHECK_THROWS_AS(run_swap(paths, BlenderConfig{}, missing, dir / "out3.png", false), IoError);
  }

  TEST_CASE("bundle digests are verified") {
    hbtest::TempDir dir("bundle");
    const auto a = make_synthetic_portrait(32, 5);
    const auto t = make_synthetic_portrait(32, 6);
    const auto paths = write_pair(dir, a.image, a.labels, t.image, t.labels);
    run_preprocess(paths, BlenderConfig{}, dir / "bundle");
    const auto manifest = KeyValueDocument::load(dir / "bundle" / std::string(bundle::kManifest));
    CHECK(manifest.get("input.target_image.sha256") == sha256_file_hex(paths.target_image));
    CHECK(manifest.get("config.dilate_union") == "1");
    CHECK_NOTHROW(run_refs(dir / "bundle", {}, BlenderConfig{}));
    const auto after = KeyValueDocument::load(dir / "bundle" / std::string(bundle::kManifest));
    CHECK(after.get("refs.tau") == "0.01");
    CHECK(after.get("refs.fallback") == "global-head");
    write_rgb_png(a.image, paths.target_image);
    CHECK_THROWS_AS(run_refs(dir / "bundle", {}, BlenderConfig{}), InvalidArgument);
  }

  TEST_CASE("sha256 of known input") {
    hbtest::TempDir dir("sha");
    std::ofstream(dir / "abc.txt") << "abc";
    CHECK(sha256_file_hex(dir / "abc.txt") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("cycle check reports") {
    hbtest::TempDir dir("cycle");
    const auto p = make_synthetic_portrait(48, 7);
    const auto q = make_synthetic_portrait(48, 8);
    const auto self = write_pair(dir, p.image, p.labels, p.image, p.labels);
    BlenderConfig cfg;
    cfg.tau = 1e-6;
    const auto r = run_cycle_check(self, std::nullopt, {}, cfg);
    REQUIRE(r.primary);
    CHECK(r.primary->aggregate <= 1e-4);
    CHECK_FALSE(r.has_cross);
    CHECK(r.to_text().find("aggregate L_c") != std::string::npos);

    const auto flat = hbtest::uniform_image(48, 48, {50, 60, 70});
    const auto uniform = write_pair(dir, flat, p.labels, flat, q.labels, "u");
    const auto u = run_cycle_check(uniform, std::nullopt, {}, BlenderConfig{});
    REQUIRE(u.primary);
    CHECK(u.primary->aggregate == 0.0);

    write_rgb_png(q.image, dir / "second.png");
    write_label_png(q.labels, dir / "second_labels.png");
    const auto both = run_cycle_check(self, std::make_pair(dir / "second.png", dir / "second_labels.png"), {}, BlenderConfig{});
    REQUIRE(both.primary);
    REQUIRE(both.cross);
    const auto kv = KeyValueDocument::parse(both.to_kv());
    CHECK(kv.get("l_c.aggregate"));
    CHECK(kv.get("l_c_prime.aggregate"));
    CHECK(both.to_text().find("L_c'") != std::string::npos);

    // no head anywhere: every region reports an empty domain, not an error
    const LabelMap blank(48, 48, std::vector<std::uint8_t>(48 * 48, 0));
    const auto empty = write_pair(dir, p.image, blank, p.image, blank, "e");
    const auto e = run_cycle_check(empty, std::nullopt, {}, BlenderConfig{});
    CHECK_FALSE(e.primary);
    CHECK(e.to_text().find("empty cycle domain") != std::string::npos);

    // a region present only in the animated frame is reported empty
    std::vector<std::uint8_t> no_teeth(p.labels.labels().begin(), p.labels.labels().end());
    bool had_teeth = false;
    for (auto& v : no_teeth) {
      if (v == 9) {
        v = 1;
        had_teeth = true;
      }
    }
    if (had_teeth) {
      const auto partial = write_pair(dir, p.image, p.labels, p.image, LabelMap(48, 48, no_teeth), "p");
      const auto pr = run_cycle_check(partial, std::nullopt, {}, BlenderConfig{});
      REQUIRE(pr.primary);
      for (const auto& reg : pr.primary->regions) {
        if (reg.region == Region::kTooth) CHECK_FALSE(reg.loss);
      }
      CHECK(pr.to_text().find("region tooth: empty cycle domain") != std::string::npos);
    }
  }
}
