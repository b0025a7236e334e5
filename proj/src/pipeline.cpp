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

#include "headblend/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <memory>
#include <random>
#include <sstream>

#include "headblend/compositor.hpp"
#include "headblend/image_io.hpp"
#include "headblend/synthetic.hpp"

namespace headblend {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string owned(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(owned, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != owned.size()) {
    throw InvalidArgument("config " + std::string(key) + ": not a number: '" + owned + "'");
  }
  return v;
}

int parse_int(std::string_view key, std::string_view text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidArgument("config " + std::string(key) + ": not an integer: '" +
                          std::string(text) + "'");
  }
  return v;
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, result.ptr);
}

std::string format_fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// Re-raises a library error with the stage name prepended, keeping its code.
template <class Fn>
auto in_stage(std::string_view stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const FormatError& e) {
    throw FormatError(std::string(stage) + ": " + e.reason(), e.offset());
  } catch (const Error& e) {
    const std::string message = std::string(stage) + ": " + e.what();
    switch (e.code()) {
      case ErrorCode::kInvalidArgument: throw InvalidArgument(message);
      case ErrorCode::kIo: throw IoError(message);
      case ErrorCode::kEmptyDomain: throw EmptyDomain(message);
      case ErrorCode::kCapExceeded: throw CapExceeded(message);
      default: throw Error(e.code(), message);
    }
  }
}

fs::path artifact(const fs::path& dir, std::string_view name) { return dir / fs::path(name); }

struct FeaturePair {
  FeatureMap animated;
  FeatureMap target;
};

FeatureMap load_feature_file(const fs::path& path, Size expected) {
  FeatureMap f = load_features(path);
  if (f.size() != expected) {
    throw InvalidArgument(path.string() + ": feature map is " + to_string(f.size()) +
                          ", image is " + to_string(expected));
  }
  return f;
}

// Centralized feature maps for an (animated, target) pair of images.
FeaturePair compute_features(const RgbImage& animated, const RgbImage& target,
                             const BlenderConfig& config, const FeatureSource& source) {
  if (source.kind == FeatureSource::Kind::kFile) {
    FeatureMap a = load_feature_file(source.animated, animated.size());
    FeatureMap t = load_feature_file(source.target, target.size());
    if (a.channels() != t.channels()) {
      throw InvalidArgument("feature files disagree on channel count: " +
                            std::to_string(a.channels()) + " vs " + std::to_string(t.channels()));
    }
    return {centralize(a), centralize(t)};
  }
  return {centralize(extract_pyramid_features(animated, config.feature_levels, config.patch_radius)),
          centralize(extract_pyramid_features(target, config.feature_levels, config.patch_radius))};
}

void write_preprocess_artifacts(const PreprocessResult& pre, const fs::path& dir) {
  write_mask_png(pre.animated_head, artifact(dir, bundle::kAnimatedHead));
  write_mask_png(pre.target_head, artifact(dir, bundle::kTargetHead));
  write_mask_png(pre.animated_inpaint, artifact(dir, bundle::kAnimatedInpaint));
  write_mask_png(pre.target_inpaint, artifact(dir, bundle::kTargetInpaint));
  write_mask_png(pre.dilated_union, artifact(dir, bundle::kDilatedUnion));
  write_gray_png(pre.gray_head, artifact(dir, bundle::kGrayHead));
  write_rgb_png(pre.background, artifact(dir, bundle::kBackground));
}

void write_reference_artifacts(const ReferencePair& refs, const fs::path& dir) {
  write_rgb_png(refs.head.colors, artifact(dir, bundle::kHeadReference));
  write_mask_png(refs.head.valid, artifact(dir, bundle::kHeadReferenceValid));
  write_rgb_png(refs.inpaint.colors, artifact(dir, bundle::kInpaintReference));
  write_mask_png(refs.inpaint.valid, artifact(dir, bundle::kInpaintReferenceValid));
}

KeyValueDocument make_manifest(const PairPaths& paths, const BlenderConfig& config,
                               int image_height) {
  KeyValueDocument doc;
  doc.set("format", "headblend-bundle");
  doc.set("version", "1");
  const std::pair<const char*, const fs::path*> inputs[] = {
      {"animated_image", &paths.animated_image},
      {"animated_labels", &paths.animated_labels},
      {"target_image", &paths.target_image},
      {"target_labels", &paths.target_labels},
  };
  for (const auto& [key, path] : inputs) {
    doc.set(std::string("input.") + key, fs::absolute(*path).lexically_normal().string());
    doc.set(std::string("input.") + key + ".sha256", sha256_file_hex(*path));
  }
  record_config(doc, config, image_height);
  doc.set("artifact.animated_head_mask", std::string(bundle::kAnimatedHead));
  doc.set("artifact.target_head_mask", std::string(bundle::kTargetHead));
  doc.set("artifact.animated_inpaint_mask", std::string(bundle::kAnimatedInpaint));
  doc.set("artifact.target_inpaint_mask", std::string(bundle::kTargetInpaint));
  doc.set("artifact.dilated_union_mask", std::string(bundle::kDilatedUnion));
  doc.set("artifact.gray_head", std::string(bundle::kGrayHead));
  doc.set("artifact.background", std::string(bundle::kBackground));
  return doc;
}

void record_refs(KeyValueDocument& doc, const BlenderConfig& config,
                 const FeatureSource& features) {
  doc.set("refs.tau", format_double(config.tau));
  doc.set("refs.epsilon", format_double(config.epsilon));
  doc.set("refs.fallback", std::string(fallback_name(config.fallback)));
  doc.set("refs.features", features.describe());
  doc.set("refs.feature_levels", std::to_string(config.feature_levels));
  doc.set("refs.patch_radius", std::to_string(config.patch_radius));
  doc.set("artifact.head_reference", std::string(bundle::kHeadReference));
  doc.set("artifact.head_reference_valid", std::string(bundle::kHeadReferenceValid));
  doc.set("artifact.inpaint_reference", std::string(bundle::kInpaintReference));
  doc.set("artifact.inpaint_reference_valid", std::string(bundle::kInpaintReferenceValid));
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  }
}

// Fisher-Yates over the raw engine so the permutation is portable.
std::vector<std::uint32_t> shuffled_pixels(std::size_t n, std::uint32_t seed) {
  std::vector<std::uint32_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::mt19937 engine(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>((static_cast<std::uint64_t>(engine()) * i) >> 32);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

FeatureMap random_features(Size size, int channels, std::uint32_t seed) {
  std::mt19937 engine(seed);
  std::vector<float> values(size.pixel_count() * channels);
  for (float& v : values) v = static_cast<float>(engine() / 4294967296.0 * 2.0 - 1.0);
  return centralize(FeatureMap(size.width, size.height, channels, std::move(values)));
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string cycle_region_text(const CycleReport& report, std::string_view loss_name) {
  std::ostringstream os;
  for (const RegionCycleLoss& r : report.regions) {
    os << "  region " << region_name(r.region) << ": ";
    if (r.loss) {
      os << "pixels=" << r.pixels << " " << loss_name << "=" << format_fixed(*r.loss, 6) << "\n";
    } else {
      os << "empty cycle domain\n";
    }
  }
  os << "  aggregate " << loss_name << " = " << format_fixed(report.aggregate, 6) << " over "
     << report.pixels << " pixels\n";
  return os.str();
}

void cycle_region_kv(std::ostringstream& os, const std::string& prefix,
                     const std::optional<CycleReport>& report) {
  if (!report) {
    os << prefix << ".aggregate = undefined\n";
    return;
  }
  for (const RegionCycleLoss& r : report->regions) {
    const std::string key = prefix + ".region." + std::string(region_name(r.region));
    os << key << ".pixels = " << r.pixels << "\n";
    os << key << ".loss = " << (r.loss ? format_double(*r.loss) : "empty") << "\n";
  }
  os << prefix << ".pixels = " << report->pixels << "\n";
  os << prefix << ".aggregate = " << format_double(report->aggregate) << "\n";
}

}  // namespace

KeyValueDocument KeyValueDocument::parse(std::string_view text) {
  KeyValueDocument doc;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, end - pos));
    if (!line.empty() && line.front() != '#') {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw FormatError("expected 'key = value'", pos);
      }
      const std::string_view key = trim(line.substr(0, eq));
      if (key.empty()) throw FormatError("empty key", pos);
      doc.set(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return doc;
}

KeyValueDocument KeyValueDocument::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse(text);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.reason(), e.offset());
  }
}

void KeyValueDocument::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> KeyValueDocument::get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string KeyValueDocument::to_string() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

void KeyValueDocument::save(const fs::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_string();
  if (!out) throw IoError("failed writing " + path.string());
}

void apply_config_entry(BlenderConfig& config, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "tau") {
    config.tau = parse_double(key, value);
  } else if (key == "epsilon") {
    config.epsilon = parse_double(key, value);
  } else if (key == "dilate_target") {
    config.dilate_target = parse_int(key, value);
  } else if (key == "dilate_union") {
    config.dilate_union = parse_int(key, value);
  } else if (key == "feather") {
    config.feather = parse_int(key, value);
  } else if (key == "fallback") {
    const auto policy = parse_fallback(value);
    if (!policy) {
      throw InvalidArgument("config fallback must be 'skip' or 'global-head', got '" +
                            std::string(value) + "'");
    }
    config.fallback = *policy;
  } else if (key == "feature_levels") {
    config.feature_levels = parse_int(key, value);
  } else if (key == "patch_radius") {
    config.patch_radius = parse_int(key, value);
  } else {
    throw InvalidArgument("unknown config key '" + std::string(key) + "'");
  }
}

BlenderConfig load_config(const fs::path& path, BlenderConfig base) {
  const KeyValueDocument doc = KeyValueDocument::load(path);
  for (const auto& [k, v] : doc.entries()) apply_config_entry(base, k, v);
  base.validate();
  return base;
}

void record_config(KeyValueDocument& doc, const BlenderConfig& config, int image_height) {
  doc.set("config.tau", format_double(config.tau));
  doc.set("config.epsilon", format_double(config.epsilon));
  doc.set("config.dilate_target", std::to_string(config.target_radius(image_height)));
  doc.set("config.dilate_union", std::to_string(config.union_radius(image_height)));
  doc.set("config.feather", std::to_string(config.feather));
  doc.set("config.fallback", std::string(fallback_name(config.fallback)));
}

FeatureSource FeatureSource::parse(std::string_view spec) {
  if (spec == "pyramid") return {};
  constexpr std::string_view kFilePrefix = "file:";
  if (spec.substr(0, kFilePrefix.size()) == kFilePrefix) {
    const std::string_view rest = spec.substr(kFilePrefix.size());
    const auto comma = rest.find(',');
    if (comma == std::string_view::npos || comma == 0 || comma + 1 == rest.size()) {
      throw InvalidArgument("feature source must be file:ANIMATED.fmap,TARGET.fmap");
    }
    return {Kind::kFile, fs::path(rest.substr(0, comma)), fs::path(rest.substr(comma + 1))};
  }
  throw InvalidArgument("unknown feature source '" + std::string(spec) +
                        "' (expected pyramid or file:A.fmap,T.fmap)");
}

std::string FeatureSource::describe() const {
  if (kind == Kind::kPyramid) return "pyramid";
  return "file:" + animated.string() + "," + target.string();
}

PairInputs load_pair(const PairPaths& paths) {
  PairInputs in;
  in.animated = read_rgb_png(paths.animated_image);
  in.animated_labels = read_label_png(paths.animated_labels);
  in.target = read_rgb_png(paths.target_image);
  in.target_labels = read_label_png(paths.target_labels);
  if (in.animated.size() != in.animated_labels.size()) {
    throw InvalidArgument(paths.animated_labels.string() + ": label map is " +
                          to_string(in.animated_labels.size()) + " but image is " +
                          to_string(in.animated.size()));
  }
  if (in.target.size() != in.target_labels.size()) {
    throw InvalidArgument(paths.target_labels.string() + ": label map is " +
                          to_string(in.target_labels.size()) + " but image is " +
                          to_string(in.target.size()));
  }
  if (in.animated.size() != in.target.size()) {
    throw InvalidArgument(paths.target_image.string() + ": target is " +
                          to_string(in.target.size()) + " but animated image is " +
                          to_string(in.animated.size()));
  }
  return in;
}

std::string sha256_file_hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 initialisation failed");
  }
  char buffer[1 << 16];
  while (in) {
    in.read(buffer, sizeof(buffer));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &length);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 15]);
  }
  return hex;
}

RgbImage animated_context_image(const RgbImage& animated, const PreprocessResult& pre) {
  const RgbImage band_context =
      fill_inpainting(ReferenceImage::empty(animated.size()), pre.animated_inpaint,
                      pre.background, pre.dilated_union);
  RgbImage out = pre.background;
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    if (pre.animated_head.test(i)) {
      out.set_pixel(i, animated.pixel(i));
    } else if (pre.animated_inpaint.test(i)) {
      out.set_pixel(i, band_context.pixel(i));
    }
  }
  return out;
}

ReferencePair create_references(const PairInputs& pair, const PreprocessResult& pre,
                                const BlenderConfig& config, const FeatureSource& features) {
  const RgbImage context = in_stage("features", [&] { return animated_context_image(pair.animated, pre); });
  const FeaturePair f =
      in_stage("features", [&] { return compute_features(context, pair.target, config, features); });
  ReferencePair refs;
  refs.head = in_stage("refs", [&] {
    return create_head_color_reference(f.animated, pair.animated_labels, f.target,
                                       pair.target_labels, pair.target, config);
  });
  refs.inpaint = in_stage("refs", [&] {
    return create_inpainting_reference(f.animated, pre.animated_inpaint, f.target,
                                       pre.target_inpaint, pair.target, config, &pre.target_head);
  });
  return refs;
}

SwapResult swap_images(const PairInputs& pair, const BlenderConfig& config,
                       const FeatureSource& features) {
  SwapResult r;
  r.pre = in_stage("preprocess", [&] {
    return preprocess(pair.animated, pair.animated_labels, pair.target, pair.target_labels, config);
  });
  r.refs = create_references(pair, r.pre, config, features);
  r.recolored_head = in_stage("recolor", [&] {
    return recolor_head(r.pre.gray_head, r.refs.head, r.pre.animated_head);
  });
  r.band_fill = in_stage("fill", [&] {
    return fill_inpainting(r.refs.inpaint, r.pre.animated_inpaint, r.pre.background,
                           r.pre.dilated_union);
  });
  r.blended = in_stage("composite", [&] {
    return composite(r.recolored_head, r.band_fill, r.pre.background, r.pre.animated_head,
                     r.pre.animated_inpaint, config.feather);
  });
  return r;
}

void run_preprocess(const PairPaths& paths, const BlenderConfig& config, const fs::path& out_dir) {
  config.validate();
  const PairInputs pair = load_pair(paths);
  const PreprocessResult pre = preprocess(pair.animated, pair.animated_labels, pair.target,
                                          pair.target_labels, config);
  ensure_directory(out_dir);
  write_preprocess_artifacts(pre, out_dir);
  make_manifest(paths, config, pair.target.height()).save(artifact(out_dir, bundle::kManifest));
}

void run_refs(const fs::path& bundle_dir, const FeatureSource& features,
              const BlenderConfig& config) {
  config.validate();
  const fs::path manifest_path = artifact(bundle_dir, bundle::kManifest);
  if (!fs::exists(manifest_path)) {
    throw IoError("bundle manifest not found: " + manifest_path.string());
  }
  KeyValueDocument manifest = KeyValueDocument::load(manifest_path);
  auto input = [&](const char* key) {
    const auto path = manifest.get(std::string("input.") + key);
    const auto digest = manifest.get(std::string("input.") + key + ".sha256");
    if (!path || !digest) {
      throw InvalidArgument(manifest_path.string() + ": missing input." + key);
    }
    if (sha256_file_hex(*path) != *digest) {
      throw InvalidArgument(*path + ": input changed since preprocessing (sha256 mismatch)");
    }
    return fs::path(*path);
  };
  const PairPaths paths{input("animated_image"), input("animated_labels"), input("target_image"),
                        input("target_labels")};
  const PairInputs pair = load_pair(paths);

  PreprocessResult pre;
  pre.animated_head = read_mask_png(artifact(bundle_dir, bundle::kAnimatedHead));
  pre.target_head = read_mask_png(artifact(bundle_dir, bundle::kTargetHead));
  pre.animated_inpaint = read_mask_png(artifact(bundle_dir, bundle::kAnimatedInpaint));
  pre.target_inpaint = read_mask_png(artifact(bundle_dir, bundle::kTargetInpaint));
  pre.dilated_union = read_mask_png(artifact(bundle_dir, bundle::kDilatedUnion));
  pre.gray_head = read_gray_png(artifact(bundle_dir, bundle::kGrayHead));
  pre.background = read_rgb_png(artifact(bundle_dir, bundle::kBackground));
  for (Size s : {pre.animated_head.size(), pre.target_head.size(), pre.animated_inpaint.size(),
                 pre.target_inpaint.size(), pre.dilated_union.size(), pre.gray_head.size(),
                 pre.background.size()}) {
    require_same_size(s, pair.animated.size(), "bundle artifact");
  }

  const ReferencePair refs = create_references(pair, pre, config, features);
  write_reference_artifacts(refs, bundle_dir);
  record_refs(manifest, config, features);
  manifest.save(manifest_path);
}

void run_swap(const PairPaths& paths, const BlenderConfig& config, const FeatureSource& features,
              const fs::path& output, bool keep_intermediates) {
  config.validate();
  const PairInputs pair = in_stage("load", [&] { return load_pair(paths); });
  const SwapResult r = swap_images(pair, config, features);
  if (output.has_parent_path()) ensure_directory(output.parent_path());
  write_rgb_png(r.blended, output);
  if (keep_intermediates) {
    const fs::path dir = output.parent_path() / (output.stem().string() + "_intermediates");
    ensure_directory(dir);
    write_preprocess_artifacts(r.pre, dir);
    write_reference_artifacts(r.refs, dir);
    write_rgb_png(r.recolored_head, artifact(dir, bundle::kRecoloredHead));
    write_rgb_png(r.band_fill, artifact(dir, bundle::kBandFill));
    KeyValueDocument manifest = make_manifest(paths, config, pair.target.height());
    record_refs(manifest, config, features);
    manifest.set("artifact.recolored_head", std::string(bundle::kRecoloredHead));
    manifest.set("artifact.band_fill", std::string(bundle::kBandFill));
    manifest.set("output", fs::absolute(output).lexically_normal().string());
    manifest.save(artifact(dir, bundle::kManifest));
  }
}

LabelMap synthetic_region_labels(int size, double fraction, int regions, std::uint32_t seed) {
  static constexpr std::uint8_t kRepresentative[6] = {1, 10, 4, 6, 7, 9};
  if (size < 1) throw InvalidArgument("bench size must be positive");
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("region fraction must be in [0, 1]");
  }
  if (regions < 1 || regions > 6) throw InvalidArgument("region count must be in 1..6");
  const std::size_t n = static_cast<std::size_t>(size) * size;
  const auto labelled = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  const auto order = shuffled_pixels(n, seed);
  std::vector<std::uint8_t> labels(n, 0);
  for (std::size_t i = 0; i < labelled; ++i) {
    labels[order[i]] = kRepresentative[i % static_cast<std::size_t>(regions)];
  }
  return LabelMap(size, size, std::move(labels));
}

bool BenchReport::all_match() const {
  return std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.counts_match; });
}

BenchReport run_bench(const BenchOptions& options) {
  if (options.repetitions < 1) throw InvalidArgument("bench repetitions must be >= 1");
  if (options.sizes.empty()) throw InvalidArgument("bench needs at least one size");
  constexpr int kChannels = 8;
  constexpr double kEpsilon = 1e-8;
  const bool portrait = options.layout == BenchOptions::Layout::kPortrait;
  const std::vector<double> fractions =
      portrait ? std::vector<double>{0.0} : options.fractions;
  if (fractions.empty()) throw InvalidArgument("bench needs at least one region fraction");

  BenchReport report;
  for (int size : options.sizes) {
    if (size < 1) throw InvalidArgument("bench size must be positive");
    for (double fraction : fractions) {
      LabelMap animated_labels, target_labels;
      if (portrait) {
        animated_labels = make_synthetic_portrait(size, options.seed).labels;
        target_labels = make_synthetic_portrait(size, options.seed + 1).labels;
      } else {
        animated_labels = synthetic_region_labels(size, fraction, options.regions, options.seed);
        target_labels = synthetic_region_labels(size, fraction, options.regions, options.seed + 1);
      }
      const auto animated_regions = label_regions(animated_labels);
      const auto target_regions = label_regions(target_labels);
      const Size frame{size, size};
      const MemoryReport predicted = memory_report(animated_regions, target_regions, frame);

      BenchRow row;
      row.size = size;
      row.fraction = fraction;
      row.layout = portrait ? "portrait" : "random";
      row.naive_entries = predicted.naive_entries;
      row.predicted_entries = predicted.restricted_entries;
      row.ratio = predicted.ratio;

      const FeatureMap fa = random_features(frame, kChannels, options.seed * 7919u + size);
      const FeatureMap ft = random_features(frame, kChannels, options.seed * 7919u + size + 1);

      if (predicted.restricted_entries <= options.block_entry_cap) {
        double best = 0.0;
        for (int rep = 0; rep < options.repetitions; ++rep) {
          const std::uint64_t base = CorrelationMemory::current();
          CorrelationMemory::reset_peak();
          const auto start = std::chrono::steady_clock::now();
          std::uint64_t measured = 0;
          {
            const auto blocks = correlate_regions(fa, ft, animated_regions, target_regions, kEpsilon);
            measured = CorrelationMemory::peak() - base;
          }
          const double ms = elapsed_ms(start);
          best = rep == 0 ? ms : std::min(best, ms);
          row.measured_entries = measured;
          if (measured != row.predicted_entries) row.counts_match = false;
        }
        row.block_ms = best;
      }

      if (frame.pixel_count() <= options.naive_pixel_cap) {
        double best = 0.0;
        for (int rep = 0; rep < options.repetitions; ++rep) {
          const std::uint64_t base = CorrelationMemory::current();
          CorrelationMemory::reset_peak();
          const auto start = std::chrono::steady_clock::now();
          std::uint64_t measured = 0;
          {
            const auto full = naive_full_correlation(fa, ft, kEpsilon, options.naive_pixel_cap);
            measured = CorrelationMemory::peak() - base;
          }
          const double ms = elapsed_ms(start);
          best = rep == 0 ? ms : std::min(best, ms);
          row.naive_measured = measured;
          if (measured != row.naive_entries) row.counts_match = false;
        }
        row.naive_ms = best;
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

std::string BenchReport::to_text() const {
  std::ostringstream os;
  os << std::left << std::setw(10) << "frame" << std::setw(10) << "layout" << std::setw(10)
     << "fraction" << std::setw(14) << "naive" << std::setw(16) << "naive_measured"
     << std::setw(12) << "naive_ms" << std::setw(14) << "restricted" << std::setw(16)
     << "restr_measured" << std::setw(12) << "block_ms" << std::setw(12) << "ratio"
     << "match\n";
  for (const BenchRow& r : rows) {
    const std::string frame = std::to_string(r.size) + "x" + std::to_string(r.size);
    os << std::setw(10) << frame << std::setw(10) << r.layout << std::setw(10)
       << (r.layout == "portrait" ? std::string("-") : format_fixed(r.fraction, 3))
       << std::setw(14) << r.naive_entries << std::setw(16)
       << (r.naive_measured ? std::to_string(*r.naive_measured) : "skipped(cap)")
       << std::setw(12) << (r.naive_ms ? format_fixed(*r.naive_ms, 2) : "-") << std::setw(14)
       << r.predicted_entries << std::setw(16)
       << (r.measured_entries ? std::to_string(*r.measured_entries) : "skipped(cap)")
       << std::setw(12) << (r.block_ms ? format_fixed(*r.block_ms, 2) : "-") << std::setw(12)
       << (r.ratio ? format_fixed(*r.ratio, 3) : "undefined") << (r.counts_match ? "yes" : "NO")
       << "\n";
  }
  return os.str();
}

std::string BenchReport::to_kv() const {
  std::ostringstream os;
  os << "bench.rows = " << rows.size() << "\n";
  os << "bench.all_match = " << (all_match() ? "true" : "false") << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const BenchRow& r = rows[i];
    const std::string p = "bench." + std::to_string(i) + ".";
    os << p << "size = " << r.size << "\n";
    os << p << "layout = " << r.layout << "\n";
    os << p << "fraction = " << format_double(r.fraction) << "\n";
    os << p << "naive_entries = " << r.naive_entries << "\n";
    os << p << "naive_measured = "
       << (r.naive_measured ? std::to_string(*r.naive_measured) : "skipped(cap)") << "\n";
    os << p << "naive_ms = " << (r.naive_ms ? format_fixed(*r.naive_ms, 3) : "skipped(cap)")
       << "\n";
    os << p << "restricted_entries = " << r.predicted_entries << "\n";
    os << p << "restricted_measured = "
       << (r.measured_entries ? std::to_string(*r.measured_entries) : "skipped(cap)") << "\n";
    os << p << "block_ms = " << (r.block_ms ? format_fixed(*r.block_ms, 3) : "skipped(cap)")
       << "\n";
    os << p << "ratio = " << (r.ratio ? format_double(*r.ratio) : "undefined") << "\n";
    os << p << "counts_match = " << (r.counts_match ? "true" : "false") << "\n";
  }
  return os.str();
}

CycleCheckResult run_cycle_check(
    const PairPaths& paths, const std::optional<std::pair<fs::path, fs::path>>& second,
    const FeatureSource& features, const BlenderConfig& config) {
  config.validate();
  if (second && features.kind == FeatureSource::Kind::kFile) {
    throw InvalidArgument("a second target needs pyramid features");
  }
  const PairInputs pair = load_pair(paths);
  const PreprocessResult pre = preprocess(pair.animated, pair.animated_labels, pair.target,
                                          pair.target_labels, config);
  const FeaturePair f = compute_features(pair.animated, pair.target, config, features);

  CycleCheckResult result;
  result.tau = config.tau;
  try {
    result.primary = cycle_check(f.animated, pair.animated_labels, f.target, pair.target_labels,
                                 pair.target, pair.target, config, &pre.animated_inpaint,
                                 &pre.target_inpaint);
  } catch (const EmptyDomain&) {
    result.primary.reset();
  }

  if (second) {
    result.has_cross = true;
    const RgbImage second_image = read_rgb_png(second->first);
    const LabelMap second_labels = read_label_png(second->second);
    if (second_image.size() != second_labels.size() || second_image.size() != pair.target.size()) {
      throw InvalidArgument(second->first.string() + ": second target must match the target size " +
                            to_string(pair.target.size()));
    }
    const FeatureMap f_second = centralize(
        extract_pyramid_features(second_image, config.feature_levels, config.patch_radius));
    try {
      result.cross = cross_pair_cycle_loss(f.animated, pair.animated_labels, f_second,
                                           second_labels, second_image, pair.target, config);
    } catch (const EmptyDomain&) {
      result.cross.reset();
    }
  }
  return result;
}

std::string CycleCheckResult::to_text() const {
  std::ostringstream os;
  os << "cycle consistency (tau=" << format_double(tau) << ")\n";
  if (primary) {
    os << cycle_region_text(*primary, "L_c");
  } else {
    os << "  empty cycle domain in every region; L_c undefined\n";
  }
  if (has_cross) {
    os << "cross-pair cycle consistency\n";
    if (cross) {
      os << cycle_region_text(*cross, "L_c'");
    } else {
      os << "  empty cycle domain in every region; L_c' undefined\n";
    }
  }
  return os.str();
}

std::string CycleCheckResult::to_kv() const {
  std::ostringstream os;
  os << "tau = " << format_double(tau) << "\n";
  cycle_region_kv(os, "l_c", primary);
  if (has_cross) cycle_region_kv(os, "l_c_prime", cross);
  return os.str();
}

}  // namespace headblend
