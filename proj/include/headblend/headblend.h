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


/* C interface to headblend. Every object is an opaque handle owned by the
 * caller and released with its destroy function. Functions report failure
 * through hb_status; hb_last_error_message() then describes the failure on
 * the calling thread. */

#ifndef HEADBLEND_HEADBLEND_H_
#define HEADBLEND_HEADBLEND_H_

#include <stddef.h>
#include <stdint.h>

#if defined(HB_BUILDING_LIBRARY)
#define HB_API __attribute__((visibility("default")))
#else
#define HB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hb_status {
  HB_OK = 0,
  HB_ERROR_INVALID_ARGUMENT = 1,
  HB_ERROR_FORMAT = 2,
  HB_ERROR_IO = 3,
  HB_ERROR_EMPTY_DOMAIN = 4,
  HB_ERROR_CAP_EXCEEDED = 5,
  HB_ERROR_INTERNAL = 6
} hb_status;

/* Message for the last failing call on this thread; "" if none. */
HB_API const char* hb_last_error_message(void);
HB_API const char* hb_version(void);

/* ---- configuration ---- */

typedef struct hb_config hb_config;

HB_API hb_status hb_config_create(hb_config** out);
HB_API void hb_config_destroy(hb_config* config);
/* Keys: tau, epsilon, dilate_target, dilate_union, feather, fallback,
 * feature_levels, patch_radius. */
HB_API hb_status hb_config_set(hb_config* config, const char* key, const char* value);
/* Applies every `key = value` line of a config file. */
HB_API hb_status hb_config_load(hb_config* config, const char* path);
HB_API hb_status hb_config_validate(const hb_config* config);

/* ---- images and label maps ---- */

typedef struct hb_image hb_image;
typedef struct hb_labels hb_labels;

HB_API hb_status hb_image_load(const char* path, hb_image** out);
/* Copies width*height*3 bytes of row-major RGB. */
HB_API hb_status hb_image_create(int width, int height, const uint8_t* rgb, hb_image** out);
HB_API hb_status hb_image_save(const hb_image* image, const char* path);
HB_API int hb_image_width(const hb_image* image);
HB_API int hb_image_height(const hb_image* image);
HB_API const uint8_t* hb_image_data(const hb_image* image);
HB_API void hb_image_destroy(hb_image* image);

HB_API hb_status hb_labels_load(const char* path, hb_labels** out);
HB_API hb_status hb_labels_create(int width, int height, const uint8_t* ids, hb_labels** out);
HB_API hb_status hb_labels_save(const hb_labels* labels, const char* path);
HB_API int hb_labels_width(const hb_labels* labels);
HB_API int hb_labels_height(const hb_labels* labels);
HB_API const uint8_t* hb_labels_data(const hb_labels* labels);
HB_API void hb_labels_destroy(hb_labels* labels);

/* Procedural parsed portrait (image plus label map), size >= 16. */
HB_API hb_status hb_synthetic_portrait(int size, uint32_t seed, hb_image** image,
                                       hb_labels** labels);

/* ---- feature maps ---- */

typedef struct hb_features hb_features;

HB_API hb_status hb_features_extract(const hb_image* image, const hb_config* config,
                                     hb_features** out);
HB_API hb_status hb_features_load(const char* path, hb_features** out);
HB_API hb_status hb_features_save(const hb_features* features, const char* path);
HB_API hb_status hb_features_dims(const hb_features* features, int* width, int* height,
                                  int* channels);
HB_API void hb_features_destroy(hb_features* features);

/* ---- commands ---- */

typedef struct hb_pair_paths {
  const char* animated_image;
  const char* animated_labels;
  const char* target_image;
  const char* target_labels;
} hb_pair_paths;

/* `features` is "pyramid" or "file:ANIMATED.fmap,TARGET.fmap"; NULL means
 * pyramid. A NULL config means defaults. */
HB_API hb_status hb_preprocess(const hb_pair_paths* pair, const hb_config* config,
                               const char* out_dir);
HB_API hb_status hb_refs(const char* bundle_dir, const char* features, const hb_config* config);
HB_API hb_status hb_swap(const hb_pair_paths* pair, const hb_config* config, const char* features,
                         const char* output, int keep_intermediates);
/* In-memory swap with pyramid features. */
HB_API hb_status hb_swap_images(const hb_image* animated, const hb_labels* animated_labels,
                                const hb_image* target, const hb_labels* target_labels,
                                const hb_config* config, hb_image** out);

/* ---- reports ---- */

typedef struct hb_report hb_report;

HB_API const char* hb_report_text(const hb_report* report);
/* `key = value` lines. */
HB_API const char* hb_report_kv(const hb_report* report);
/* Looks up one key of the key-value form; *value stays valid until the
 * report is destroyed. */
HB_API hb_status hb_report_get(const hb_report* report, const char* key, const char** value);
HB_API void hb_report_destroy(hb_report* report);

typedef struct hb_bench_options {
  const int* sizes;
  size_t size_count;
  const double* fractions;
  size_t fraction_count;
  int regions;
  int repetitions;
  uint32_t seed;
  int portrait_layout; /* nonzero: synthetic portrait label maps */
  size_t naive_pixel_cap;
} hb_bench_options;

/* Defaults: sizes {32, 64}, fractions {0.3}, 6 regions, 1 repetition, seed
 * 1, random layout, naive cap 4096 pixels. */
HB_API void hb_bench_options_init(hb_bench_options* options);
HB_API hb_status hb_bench(const hb_bench_options* options, hb_report** out);

/* Cycle losses; second_image/second_labels may both be NULL. */
HB_API hb_status hb_cycle_check(const hb_pair_paths* pair, const char* second_image,
                                const char* second_labels, const char* features,
                                const hb_config* config, hb_report** out);

/* ---- metrics ---- */

HB_API hb_status hb_psnr(const hb_image* a, const hb_image* b, double* out);
/* SSIM of the luminance of both images. */
HB_API hb_status hb_ssim(const hb_image* a, const hb_image* b, double* out);

#ifdef __cplusplus
}
#endif

#endif /* HEADBLEND_HEADBLEND_H_ */
