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

#include "headblend/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "headblend/preprocessing.hpp"
#include "parallel.hpp"

namespace headblend {

void CorrelationMemory::record_allocate(std::size_t n) {
  const std::uint64_t now = current_.fetch_add(n) + n;
  std::uint64_t seen = peak_.load();
  while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
  }
}

namespace {

double dot(const float* a, const float* b, int channels) {
  double s = 0.0;
  for (int k = 0; k < channels; ++k) s += static_cast<double>(a[k]) * static_cast<double>(b[k]);
  return s;
}

double guarded_norm(std::span<const float> v, double epsilon) {
  return std::max(std::sqrt(dot(v.data(), v.data(), static_cast<int>(v.size()))), epsilon);
}

// Every correlation entry, whichever path computes it, goes through here.
double entry(double inner, double norm_a, double norm_b) {
  return std::clamp(inner / (norm_a * norm_b), -1.0, 1.0);
}

std::vector<double> guarded_norms(const FeatureMap& f, std::span<const std::uint32_t> pixels,
                                  double epsilon) {
  std::vector<double> norms(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) norms[i] = guarded_norm(f.pixel(pixels[i]), epsilon);
  return norms;
}

void check_operands(const FeatureMap& animated, const FeatureMap& target,
                    const RegionIndex& rows, const RegionIndex& cols, double epsilon) {
  if (animated.channels() != target.channels()) {
    throw InvalidArgument("feature channel mismatch: " + std::to_string(animated.channels()) +
                          " vs " + std::to_string(target.channels()));
  }
  require_same_size(rows.frame(), animated.size(), "row region vs animated features");
  require_same_size(cols.frame(), target.size(), "column region vs target features");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
}

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be positive");
}

Rgb blend(std::span<const double> weights, const RgbImage& colors,
          std::span<const std::uint32_t> pixels) {
  double acc[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const Rgb c = colors.pixel(pixels[i]);
    acc[0] += weights[i] * c[0];
    acc[1] += weights[i] * c[1];
    acc[2] += weights[i] * c[2];
  }
  Rgb out;
  for (int k = 0; k < 3; ++k) {
    out[k] = static_cast<std::uint8_t>(std::clamp(std::lround(acc[k]), 0L, 255L));
  }
  return out;
}

// Scratch reused by the worker that owns it.
std::vector<double>& scratch(std::size_t n) {
  thread_local std::vector<double> buffer;
  buffer.resize(n);
  return buffer;
}

std::vector<double>& scratch2(std::size_t n) {
  thread_local std::vector<double> buffer;
  buffer.resize(n);
  return buffer;
}

void merge_into(ReferenceImage& out, const ReferenceImage& part) {
  for (std::size_t i = 0; i < part.valid.pixel_count(); ++i) {
    if (part.valid.test(i)) {
      out.colors.set_pixel(i, part.colors.pixel(i));
      out.valid.set(i);
    }
  }
}

double l1_over(const ReferenceImage& cycled, const RgbImage& compare_to, std::size_t& pixels) {
  double sum = 0.0;
  pixels = 0;
  for (std::size_t i = 0; i < cycled.valid.pixel_count(); ++i) {
    if (!cycled.valid.test(i)) continue;
    const Rgb a = cycled.colors.pixel(i);
    const Rgb b = compare_to.pixel(i);
    for (int k = 0; k < 3; ++k) sum += std::abs(static_cast<int>(a[k]) - static_cast<int>(b[k]));
    ++pixels;
  }
  return pixels == 0 ? 0.0 : sum / (255.0 * 3.0 * static_cast<double>(pixels));
}

std::string format_ratio(const std::optional<double>& ratio) {
  if (!ratio) return "undefined";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << *ratio;
  return os.str();
}

}  // namespace

double cosine_similarity(std::span<const float> a, std::span<const float> b, double epsilon) {
  if (a.size() != b.size()) throw InvalidArgument("cosine_similarity: length mismatch");
  return entry(dot(a.data(), b.data(), static_cast<int>(a.size())), guarded_norm(a, epsilon),
               guarded_norm(b, epsilon));
}

void softmax(std::span<const double> scores, double tau, std::span<double> weights) {
  if (scores.empty()) return;
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    weights[i] = std::exp((scores[i] - top) / tau);
    total += weights[i];
  }
  for (std::size_t i = 0; i < scores.size(); ++i) weights[i] /= total;
}

CorrelationBlock region_correlation(const FeatureMap& animated, const FeatureMap& target,
                                    const RegionIndex& rows, const RegionIndex& cols,
                                    double epsilon) {
  check_operands(animated, target, rows, cols, epsilon);
  const int c = animated.channels();
  const auto row_pixels = rows.pixels();
  const auto col_pixels = cols.pixels();
  const auto row_norms = guarded_norms(animated, row_pixels, epsilon);
  const auto col_norms = guarded_norms(target, col_pixels, epsilon);

  CorrelationBlock block{rows, cols, CorrelationStorage(rows.size() * cols.size())};
  double* values = block.values.data();
  const std::size_t nc = cols.size();
  detail::parallel_for(rows.size(), [&](std::size_t r) {
    const float* a = animated.pixel(row_pixels[r]).data();
    double* out = values + r * nc;
    for (std::size_t j = 0; j < nc; ++j) {
      out[j] = entry(dot(a, target.pixel(col_pixels[j]).data(), c), row_norms[r], col_norms[j]);
    }
  });
  return block;
}

AttentionRow attention_row(const CorrelationBlock& block, std::size_t row, double tau) {
  check_tau(tau);
  if (row >= block.row_count()) throw InvalidArgument("attention_row: row out of range");
  AttentionRow out{block.rows.pixels()[row], std::vector<double>(block.col_count())};
  softmax(block.row(row), tau, out.weights);
  return out;
}

ReferenceImage softmax_warp(const CorrelationBlock& block, const RgbImage& target, double tau) {
  check_tau(tau);
  require_same_size(target.size(), block.cols.frame(), "softmax_warp target colours");
  ReferenceImage out = ReferenceImage::empty(block.rows.frame());
  if (block.col_count() == 0) return out;
  const auto row_pixels = block.rows.pixels();
  const auto col_pixels = block.cols.pixels();
  std::vector<Rgb> colors(block.row_count());
  detail::parallel_for(block.row_count(), [&](std::size_t r) {
    auto& weights = scratch(block.col_count());
    softmax(block.row(r), tau, weights);
    colors[r] = blend(weights, target, col_pixels);
  });
  for (std::size_t r = 0; r < row_pixels.size(); ++r) {
    out.colors.set_pixel(row_pixels[r], colors[r]);
    out.valid.set(row_pixels[r]);
  }
  return out;
}

ReferenceImage softmax_warp_transposed(const CorrelationBlock& block, const RgbImage& source,
                                       double tau) {
  check_tau(tau);
  require_same_size(source.size(), block.rows.frame(), "transposed warp source colours");
  ReferenceImage out = ReferenceImage::empty(block.cols.frame());
  if (block.row_count() == 0) return out;
  const auto row_pixels = block.rows.pixels();
  const auto col_pixels = block.cols.pixels();
  std::vector<Rgb> colors(block.col_count());
  detail::parallel_for(block.col_count(), [&](std::size_t j) {
    auto& scores = scratch(block.row_count());
    auto& weights = scratch2(block.row_count());
    for (std::size_t r = 0; r < block.row_count(); ++r) scores[r] = block.at(r, j);
    softmax(scores, tau, weights);
    colors[j] = blend(weights, source, row_pixels);
  });
  for (std::size_t j = 0; j < col_pixels.size(); ++j) {
    out.colors.set_pixel(col_pixels[j], colors[j]);
    out.valid.set(col_pixels[j]);
  }
  return out;
}

ReferenceImage warp_region(const FeatureMap& animated, const FeatureMap& target,
                           const RegionIndex& rows, const RegionIndex& cols,
                           const RgbImage& target_colors, double tau, double epsilon) {
  check_operands(animated, target, rows, cols, epsilon);
  check_tau(tau);
  require_same_size(target_colors.size(), target.size(), "warp target colours");
  ReferenceImage out = ReferenceImage::empty(animated.size());
  if (cols.empty()) return out;
  const int c = animated.channels();
  const auto row_pixels = rows.pixels();
  const auto col_pixels = cols.pixels();
  const auto row_norms = guarded_norms(animated, row_pixels, epsilon);
  const auto col_norms = guarded_norms(target, col_pixels, epsilon);
  std::vector<Rgb> colors(rows.size());
  detail::parallel_for(rows.size(), [&](std::size_t r) {
    auto& scores = scratch(cols.size());
    auto& weights = scratch2(cols.size());
    const float* a = animated.pixel(row_pixels[r]).data();
    for (std::size_t j = 0; j < cols.size(); ++j) {
      scores[j] = entry(dot(a, target.pixel(col_pixels[j]).data(), c), row_norms[r], col_norms[j]);
    }
    softmax(scores, tau, weights);
    colors[r] = blend(weights, target_colors, col_pixels);
  }, 8);
  for (std::size_t r = 0; r < row_pixels.size(); ++r) {
    out.colors.set_pixel(row_pixels[r], colors[r]);
    out.valid.set(row_pixels[r]);
  }
  return out;
}

ReferenceImage warp_region_transposed(const FeatureMap& animated, const FeatureMap& target,
                                      const RegionIndex& rows, const RegionIndex& cols,
                                      const RgbImage& source_colors, double tau, double epsilon) {
  check_operands(animated, target, rows, cols, epsilon);
  check_tau(tau);
  require_same_size(source_colors.size(), animated.size(), "transposed warp source colours");
  ReferenceImage out = ReferenceImage::empty(target.size());
  if (rows.empty()) return out;
  const int c = animated.channels();
  const auto row_pixels = rows.pixels();
  const auto col_pixels = cols.pixels();
  const auto row_norms = guarded_norms(animated, row_pixels, epsilon);
  const auto col_norms = guarded_norms(target, col_pixels, epsilon);
  std::vector<Rgb> colors(cols.size());
  detail::parallel_for(cols.size(), [&](std::size_t j) {
    auto& scores = scratch(rows.size());
    auto& weights = scratch2(rows.size());
    const float* t = target.pixel(col_pixels[j]).data();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      scores[r] = entry(dot(animated.pixel(row_pixels[r]).data(), t, c), row_norms[r], col_norms[j]);
    }
    softmax(scores, tau, weights);
    colors[j] = blend(weights, source_colors, row_pixels);
  }, 8);
  for (std::size_t j = 0; j < col_pixels.size(); ++j) {
    out.colors.set_pixel(col_pixels[j], colors[j]);
    out.valid.set(col_pixels[j]);
  }
  return out;
}

ReferenceImage create_head_color_reference(const FeatureMap& animated,
                                           const LabelMap& animated_labels,
                                           const FeatureMap& target, const LabelMap& target_labels,
                                           const RgbImage& target_colors,
                                           const BlenderConfig& config) {
  config.validate();
  require_same_size(animated.size(), animated_labels.size(), "animated features vs labels");
  require_same_size(target.size(), target_labels.size(), "target features vs labels");
  require_same_size(target_colors.size(), target.size(), "target colours vs features");

  ReferenceImage out = ReferenceImage::empty(animated.size());
  std::optional<RegionIndex> global_head;
  for (const RegionSpec& spec : default_region_specs()) {
    if (spec.labels.empty()) continue;
    const RegionIndex rows = RegionIndex::from_labels(animated_labels, spec);
    if (rows.empty()) continue;
    RegionIndex cols = RegionIndex::from_labels(target_labels, spec);
    if (cols.empty()) {
      if (config.fallback == FallbackPolicy::kSkip) continue;
      if (!global_head) {
        global_head = RegionIndex::from_mask(spec.region, head_mask(target_labels));
      }
      cols = RegionIndex(spec.region, global_head->frame(),
                         {global_head->pixels().begin(), global_head->pixels().end()});
      if (cols.empty()) continue;
    }
    merge_into(out, warp_region(animated, target, rows, cols, target_colors, config.tau,
                                config.epsilon));
  }
  return out;
}

ReferenceImage create_inpainting_reference(const FeatureMap& animated,
                                           const BinaryMask& animated_band,
                                           const FeatureMap& target, const BinaryMask& target_band,
                                           const RgbImage& target_colors,
                                           const BlenderConfig& config,
                                           const BinaryMask* fallback_cols) {
  config.validate();
  require_same_size(animated.size(), animated_band.size(), "animated features vs band");
  require_same_size(target.size(), target_band.size(), "target features vs band");
  const RegionIndex rows = RegionIndex::from_mask(Region::kInpainting, animated_band);
  RegionIndex cols = RegionIndex::from_mask(Region::kInpainting, target_band);
  if (cols.empty() && config.fallback == FallbackPolicy::kGlobalHead && fallback_cols) {
    require_same_size(fallback_cols->size(), target.size(), "fallback columns");
    cols = RegionIndex::from_mask(Region::kInpainting, *fallback_cols);
  }
  if (rows.empty() || cols.empty()) return ReferenceImage::empty(animated.size());
  return warp_region(animated, target, rows, cols, target_colors, config.tau, config.epsilon);
}

CycleResult cycle_warp_and_loss(std::span<const CorrelationBlock> blocks,
                                const ReferenceImage& forward, const RgbImage& compare_to,
                                double tau) {
  check_tau(tau);
  CycleResult result{ReferenceImage::empty(compare_to.size()), 0.0, 0};
  for (const CorrelationBlock& block : blocks) {
    if (block.row_count() == 0 || block.col_count() == 0) continue;
    require_same_size(block.cols.frame(), compare_to.size(), "cycle comparison image");
    merge_into(result.cycled, softmax_warp_transposed(block, forward.colors, tau));
  }
  result.loss = l1_over(result.cycled, compare_to, result.pixels);
  if (result.pixels == 0) throw EmptyDomain("empty cycle domain");
  return result;
}

CycleReport cycle_check(const FeatureMap& animated, const LabelMap& animated_labels,
                        const FeatureMap& target, const LabelMap& target_labels,
                        const RgbImage& target_colors, const RgbImage& compare_to,
                        const BlenderConfig& config, const BinaryMask* animated_band,
                        const BinaryMask* target_band) {
  config.validate();
  require_same_size(animated.size(), animated_labels.size(), "animated features vs labels");
  require_same_size(target.size(), target_labels.size(), "target features vs labels");
  require_same_size(target_colors.size(), target.size(), "target colours vs features");
  require_same_size(compare_to.size(), target.size(), "comparison image vs target");

  std::vector<std::pair<RegionIndex, RegionIndex>> pairs;
  for (const RegionSpec& spec : default_region_specs()) {
    if (spec.labels.empty()) continue;
    pairs.emplace_back(RegionIndex::from_labels(animated_labels, spec),
                       RegionIndex::from_labels(target_labels, spec));
  }
  if (animated_band && target_band) {
    pairs.emplace_back(RegionIndex::from_mask(Region::kInpainting, *animated_band),
                       RegionIndex::from_mask(Region::kInpainting, *target_band));
  }

  CycleReport report;
  double weighted = 0.0;
  for (const auto& [rows, cols] : pairs) {
    RegionCycleLoss entry_loss{rows.region(), 0, std::nullopt};
    if (!rows.empty() && !cols.empty()) {
      const ReferenceImage forward =
          warp_region(animated, target, rows, cols, target_colors, config.tau, config.epsilon);
      const ReferenceImage back = warp_region_transposed(animated, target, rows, cols,
                                                         forward.colors, config.tau,
                                                         config.epsilon);
      std::size_t n = 0;
      const double loss = l1_over(back, compare_to, n);
      entry_loss.pixels = n;
      entry_loss.loss = loss;
      weighted += loss * static_cast<double>(n);
      report.pixels += n;
    }
    report.regions.push_back(entry_loss);
  }
  if (report.pixels == 0) throw EmptyDomain("empty cycle domain");
  report.aggregate = weighted / static_cast<double>(report.pixels);
  return report;
}

CycleReport cycle_consistency(const FeatureMap& animated, const LabelMap& animated_labels,
                              const FeatureMap& target, const LabelMap& target_labels,
                              const RgbImage& target_colors, const BlenderConfig& config) {
  return cycle_check(animated, animated_labels, target, target_labels, target_colors,
                     target_colors, config);
}

CycleReport cross_pair_cycle_loss(const FeatureMap& animated, const LabelMap& animated_labels,
                                  const FeatureMap& second_target,
                                  const LabelMap& second_labels,
                                  const RgbImage& second_colors, const RgbImage& original_target,
                                  const BlenderConfig& config) {
  return cycle_check(animated, animated_labels, second_target, second_labels, second_colors,
                     original_target, config);
}

GrayImage accumulated_attention(const CorrelationBlock& block, double tau) {
  check_tau(tau);
  const Size frame = block.rows.frame();
  GrayImage out(frame.width, frame.height);
  if (block.col_count() == 0) return out;
  std::vector<double> weights(block.col_count());
  for (std::size_t r = 0; r < block.row_count(); ++r) {
    softmax(block.row(r), tau, weights);
    double total = 0.0;
    for (double w : weights) total += w;
    out[block.rows.pixels()[r]] =
        static_cast<std::uint8_t>(std::clamp(std::lround(255.0 * total), 0L, 255L));
  }
  return out;
}

FullCorrelation naive_full_correlation(const FeatureMap& animated, const FeatureMap& target,
                                       double epsilon, std::size_t pixel_cap) {
  require_same_size(animated.size(), target.size(), "naive_full_correlation");
  if (animated.channels() != target.channels()) {
    throw InvalidArgument("feature channel mismatch");
  }
  const std::size_t n = animated.pixel_count();
  if (n > pixel_cap) {
    throw CapExceeded("naive correlation of a " + to_string(animated.size()) + " frame needs " +
                      std::to_string(static_cast<unsigned long long>(n) * n) +
                      " entries; cap is " + std::to_string(pixel_cap) + " pixels (" +
                      std::to_string(static_cast<unsigned long long>(pixel_cap) * pixel_cap) +
                      " entries)");
  }
  std::vector<std::uint32_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<std::uint32_t>(i);
  const auto norms_a = guarded_norms(animated, all, epsilon);
  const auto norms_t = guarded_norms(target, all, epsilon);
  const int c = animated.channels();
  FullCorrelation full{animated.size(), CorrelationStorage(n * n)};
  double* values = full.values.data();
  detail::parallel_for(n, [&](std::size_t u) {
    const float* a = animated.pixel(u).data();
    for (std::size_t v = 0; v < n; ++v) {
      values[u * n + v] = entry(dot(a, target.pixel(v).data(), c), norms_a[u], norms_t[v]);
    }
  });
  return full;
}

MemoryReport memory_report(std::span<const RegionIndex> animated,
                           std::span<const RegionIndex> target, Size frame) {
  MemoryReport report;
  report.frame = frame;
  const std::uint64_t n = frame.pixel_count();
  report.naive_entries = n * n;
  auto find = [](std::span<const RegionIndex> list, Region region) -> const RegionIndex* {
    for (const RegionIndex& r : list) {
      if (r.region() == region) return &r;
    }
    return nullptr;
  };
  for (const RegionIndex& a : animated) {
    require_same_size(a.frame(), frame, "animated region frame");
    const RegionIndex* t = find(target, a.region());
    RegionEntries e{a.region(), a.size(), t ? t->size() : 0};
    report.restricted_entries += e.entries();
    report.regions.push_back(e);
  }
  for (const RegionIndex& t : target) {
    require_same_size(t.frame(), frame, "target region frame");
    if (!find(animated, t.region())) report.regions.push_back({t.region(), 0, t.size()});
  }
  if (report.restricted_entries > 0) {
    report.ratio = static_cast<double>(report.naive_entries) /
                   static_cast<double>(report.restricted_entries);
  }
  return report;
}

std::vector<CorrelationBlock> correlate_regions(const FeatureMap& animated,
                                                const FeatureMap& target,
                                                std::span<const RegionIndex> animated_regions,
                                                std::span<const RegionIndex> target_regions,
                                                double epsilon) {
  std::vector<CorrelationBlock> blocks;
  blocks.reserve(animated_regions.size());
  for (const RegionIndex& a : animated_regions) {
    for (const RegionIndex& t : target_regions) {
      if (t.region() == a.region()) {
        blocks.push_back(region_correlation(animated, target, a, t, epsilon));
        break;
      }
    }
  }
  return blocks;
}

MemoryReport measured_memory_report(const FeatureMap& animated, const FeatureMap& target,
                                    std::span<const RegionIndex> animated_regions,
                                    std::span<const RegionIndex> target_regions, double epsilon) {
  MemoryReport report = memory_report(animated_regions, target_regions, animated.size());
  const std::uint64_t base = CorrelationMemory::current();
  CorrelationMemory::reset_peak();
  {
    const auto blocks =
        correlate_regions(animated, target, animated_regions, target_regions, epsilon);
    report.measured_peak_entries = CorrelationMemory::peak() - base;
  }
  return report;
}

std::vector<RegionIndex> label_regions(const LabelMap& labels) {
  std::vector<RegionIndex> out;
  for (const RegionSpec& spec : default_region_specs()) {
    if (!spec.labels.empty()) out.push_back(RegionIndex::from_labels(labels, spec));
  }
  return out;
}

std::string MemoryReport::to_text() const {
  std::ostringstream os;
  os << "correlation memory report\n";
  os << "frame: " << to_string(frame) << "\n";
  os << "naive entries: " << naive_entries << "\n";
  os << "restricted entries: " << restricted_entries << "\n";
  os << "ratio: " << format_ratio(ratio) << "\n";
  os << "measured peak entries: "
     << (measured_peak_entries ? std::to_string(*measured_peak_entries) : "not measured") << "\n";
  for (const RegionEntries& r : regions) {
    os << "region " << region_name(r.region) << ": " << r.animated << " x " << r.target << " = "
       << r.entries() << "\n";
  }
  return os.str();
}

std::string MemoryReport::to_kv() const {
  std::ostringstream os;
  os << "frame.width = " << frame.width << "\n";
  os << "frame.height = " << frame.height << "\n";
  os << "naive_entries = " << naive_entries << "\n";
  os << "restricted_entries = " << restricted_entries << "\n";
  os << "ratio = " << format_ratio(ratio) << "\n";
  os << "measured_peak_entries = "
     << (measured_peak_entries ? std::to_string(*measured_peak_entries) : "not-measured") << "\n";
  for (const RegionEntries& r : regions) {
    const auto name = region_name(r.region);
    os << "region." << name << ".animated = " << r.animated << "\n";
    os << "region." << name << ".target = " << r.target << "\n";
    os << "region." << name << ".entries = " << r.entries() << "\n";
  }
  return os.str();
}

}  // namespace headblend
