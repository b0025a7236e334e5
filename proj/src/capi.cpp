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


#include "headblend/headblend.h"

#include <exception>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "headblend/features.hpp"
#include "headblend/image_io.hpp"
#include "headblend/metrics.hpp"
#include "headblend/pipeline.hpp"
#include "headblend/synthetic.hpp"

struct hb_config {
  headblend::BlenderConfig value;
};
struct hb_image {
  headblend::RgbImage value;
};
struct hb_labels {
  headblend::LabelMap value;
};
struct hb_features {
  headblend::FeatureMap value;
};
struct hb_report {
  std::string text;
  std::string kv;
  headblend::KeyValueDocument doc;
};

namespace {

thread_local std::string last_error;

hb_status fail(hb_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class Fn>
hb_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return HB_OK;
  } catch (const headblend::Error& e) {
    return fail(static_cast<hb_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HB_ERROR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HB_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(HB_ERROR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw headblend::InvalidArgument(std::string(what) + " is null");
}

headblend::BlenderConfig config_or_default(const hb_config* config) {
  return config ? config->value : headblend::BlenderConfig{};
}

headblend::FeatureSource feature_source(const char* spec) {
  return spec ? headblend::FeatureSource::parse(spec) : headblend::FeatureSource{};
}

headblend::PairPaths pair_paths(const hb_pair_paths* pair) {
  require(pair, "pair");
  require(pair->animated_image, "animated_image");
  require(pair->animated_labels, "animated_labels");
  require(pair->target_image, "target_image");
  require(pair->target_labels, "target_labels");
  return {pair->animated_image, pair->animated_labels, pair->target_image, pair->target_labels};
}

hb_report* make_report(std::string text, std::string kv) {
  auto report = new hb_report{std::move(text), std::move(kv), {}};
  report->doc = headblend::KeyValueDocument::parse(report->kv);
  return report;
}

}  // namespace

extern "C" {

const char* hb_last_error_message(void) { return last_error.c_str(); }

const char* hb_version(void) { return "0.1.0"; }

hb_status hb_config_create(hb_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new hb_config{};
  });
}

void hb_config_destroy(hb_config* config) { delete config; }

hb_status hb_config_set(hb_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    headblend::BlenderConfig updated = config->value;
    headblend::apply_config_entry(updated, key, value);
    config->value = updated;
  });
}

hb_status hb_config_load(hb_config* config, const char* path) {
  return guarded([&] {
    require(config, "config");
    require(path, "path");
    config->value = headblend::load_config(path, config->value);
  });
}

hb_status hb_config_validate(const hb_config* config) {
  return guarded([&] {
    require(config, "config");
    config->value.validate();
  });
}

hb_status hb_image_load(const char* path, hb_image** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new hb_image{headblend::read_rgb_png(path)};
  });
}

hb_status hb_image_create(int width, int height, const uint8_t* rgb, hb_image** out) {
  return guarded([&] {
    require(rgb, "rgb");
    require(out, "out");
    if (width < 1 || height < 1) throw headblend::InvalidArgument("image size must be positive");
    const std::size_t n = static_cast<std::size_t>(width) * height * 3;
    *out = new hb_image{headblend::RgbImage(width, height, std::vector<uint8_t>(rgb, rgb + n))};
  });
}

hb_status hb_image_save(const hb_image* image, const char* path) {
  return guarded([&] {
    require(image, "image");
    require(path, "path");
    headblend::write_rgb_png(image->value, path);
  });
}

int hb_image_width(const hb_image* image) { return image ? image->value.width() : 0; }
int hb_image_height(const hb_image* image) { return image ? image->value.height() : 0; }
const uint8_t* hb_image_data(const hb_image* image) {
  return image ? image->value.data().data() : nullptr;
}
void hb_image_destroy(hb_image* image) { delete image; }

hb_status hb_labels_load(const char* path, hb_labels** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new hb_labels{headblend::read_label_png(path)};
  });
}

hb_status hb_labels_create(int width, int height, const uint8_t* ids, hb_labels** out) {
  return guarded([&] {
    require(ids, "ids");
    require(out, "out");
    if (width < 1 || height < 1) throw headblend::InvalidArgument("label map size must be positive");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    *out = new hb_labels{headblend::LabelMap(width, height, std::vector<uint8_t>(ids, ids + n))};
  });
}

hb_status hb_labels_save(const hb_labels* labels, const char* path) {
  return guarded([&] {
    require(labels, "labels");
    require(path, "path");
    headblend::write_label_png(labels->value, path);
  });
}

int hb_labels_width(const hb_labels* labels) { return labels ? labels->value.width() : 0; }
int hb_labels_height(const hb_labels* labels) { return labels ? labels->value.height() : 0; }
const uint8_t* hb_labels_data(const hb_labels* labels) {
  return labels ? labels->value.labels().data() : nullptr;
}
void hb_labels_destroy(hb_labels* labels) { delete labels; }

hb_status hb_synthetic_portrait(int size, uint32_t seed, hb_image** image, hb_labels** labels) {
  return guarded([&] {
    require(image, "image");
    require(labels, "labels");
    auto portrait = headblend::make_synthetic_portrait(size, seed);
    auto img = new hb_image{std::move(portrait.image)};
    auto lab = new (std::nothrow) hb_labels{std::move(portrait.labels)};
    if (!lab) {
      delete img;
      throw std::bad_alloc();
    }
    *image = img;
    *labels = lab;
  });
}

hb_status hb_features_extract(const hb_image* image, const hb_config* config,
                              hb_features** out) {
  return guarded([&] {
    require(image, "image");
    require(out, "out");
    const auto cfg = config_or_default(config);
    cfg.validate();
    *out = new hb_features{
        headblend::extract_pyramid_features(image->value, cfg.feature_levels, cfg.patch_radius)};
  });
}

hb_status hb_features_load(const char* path, hb_features** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new hb_features{headblend::load_features(path)};
  });
}

hb_status hb_features_save(const hb_features* features, const char* path) {
  return guarded([&] {
    require(features, "features");
    require(path, "path");
    headblend::save_features(features->value, path);
  });
}

hb_status hb_features_dims(const hb_features* features, int* width, int* height, int* channels) {
  return guarded([&] {
    require(features, "features");
    if (width) *width = features->value.width();
    if (height) *height = features->value.height();
    if (channels) *channels = features->value.channels();
  });
}

void hb_features_destroy(hb_features* features) { delete features; }

hb_status hb_preprocess(const hb_pair_paths* pair, const hb_config* config, const char* out_dir) {
  return guarded([&] {
    require(out_dir, "out_dir");
    headblend::run_preprocess(pair_paths(pair), config_or_default(config), out_dir);
  });
}

hb_status hb_refs(const char* bundle_dir, const char* features, const hb_config* config) {
  return guarded([&] {
    require(bundle_dir, "bundle_dir");
    headblend::run_refs(bundle_dir, feature_source(features), config_or_default(config));
  });
}

hb_status hb_swap(const hb_pair_paths* pair, const hb_config* config, const char* features,
                  const char* output, int keep_intermediates) {
  return guarded([&] {
    require(output, "output");
    headblend::run_swap(pair_paths(pair), config_or_default(config), feature_source(features),
                        output, keep_intermediates != 0);
  });
}

hb_status hb_swap_images(const hb_image* animated, const hb_labels* animated_labels,
                         const hb_image* target, const hb_labels* target_labels,
                         const hb_config* config, hb_image** out) {
  return guarded([&] {
    require(animated, "animated");
    require(animated_labels, "animated_labels");
    require(target, "target");
    require(target_labels, "target_labels");
    require(out, "out");
    const auto cfg = config_or_default(config);
    cfg.validate();
    headblend::PairInputs pair{animated->value, animated_labels->value, target->value,
                               target_labels->value};
    headblend::require_same_size(pair.animated.size(), pair.animated_labels.size(),
                                 "animated labels");
    headblend::require_same_size(pair.target.size(), pair.target_labels.size(), "target labels");
    headblend::require_same_size(pair.animated.size(), pair.target.size(), "target image");
    auto result = headblend::swap_images(pair, cfg, {});
    *out = new hb_image{std::move(result.blended)};
  });
}

const char* hb_report_text(const hb_report* report) { return report ? report->text.c_str() : ""; }
const char* hb_report_kv(const hb_report* report) { return report ? report->kv.c_str() : ""; }

hb_status hb_report_get(const hb_report* report, const char* key, const char** value) {
  return guarded([&] {
    require(report, "report");
    require(key, "key");
    require(value, "value");
    for (const auto& [k, v] : report->doc.entries()) {
      if (k == key) {
        *value = v.c_str();
        return;
      }
    }
    throw headblend::InvalidArgument(std::string("no report key '") + key + "'");
  });
}

void hb_report_destroy(hb_report* report) { delete report; }

void hb_bench_options_init(hb_bench_options* options) {
  if (!options) return;
  static const int kSizes[] = {32, 64};
  static const double kFractions[] = {0.3};
  options->sizes = kSizes;
  options->size_count = 2;
  options->fractions = kFractions;
  options->fraction_count = 1;
  options->regions = 6;
  options->repetitions = 1;
  options->seed = 1;
  options->portrait_layout = 0;
  options->naive_pixel_cap = headblend::kDefaultNaivePixelCap;
}

hb_status hb_bench(const hb_bench_options* options, hb_report** out) {
  return guarded([&] {
    require(options, "options");
    require(out, "out");
    if (options->size_count > 0) require(options->sizes, "sizes");
    if (options->fraction_count > 0) require(options->fractions, "fractions");
    headblend::BenchOptions opts;
    opts.sizes.assign(options->sizes, options->sizes + options->size_count);
    opts.fractions.assign(options->fractions, options->fractions + options->fraction_count);
    opts.regions = options->regions;
    opts.repetitions = options->repetitions;
    opts.seed = options->seed;
    opts.layout = options->portrait_layout ? headblend::BenchOptions::Layout::kPortrait
                                           : headblend::BenchOptions::Layout::kRandom;
    opts.naive_pixel_cap = options->naive_pixel_cap;
    const auto report = headblend::run_bench(opts);
    *out = make_report(report.to_text(), report.to_kv());
  });
}

hb_status hb_cycle_check(const hb_pair_paths* pair, const char* second_image,
                         const char* second_labels, const char* features,
                         const hb_config* config, hb_report** out) {
  return guarded([&] {
    require(out, "out");
    if ((second_image == nullptr) != (second_labels == nullptr)) {
      throw headblend::InvalidArgument("second target needs both an image and a label map");
    }
    std::optional<std::pair<std::filesystem::path, std::filesystem::path>> second;
    if (second_image) second.emplace(second_image, second_labels);
    const auto result = headblend::run_cycle_check(pair_paths(pair), second,
                                                   feature_source(features),
                                                   config_or_default(config));
    *out = make_report(result.to_text(), result.to_kv());
  });
}

hb_status hb_psnr(const hb_image* a, const hb_image* b, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = headblend::psnr(a->value, b->value);
  });
}

hb_status hb_ssim(const hb_image* a, const hb_image* b, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = headblend::ssim(headblend::to_gray(a->value), headblend::to_gray(b->value));
  });
}

}  // extern "C"
