/*
 * Copyright 2026 The glassboost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "glassboost/binning.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include "glassboost/error.hpp"

namespace glassboost {
namespace {

std::string format_edge(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Cut between two adjacent distinct values a < b with a <= cut < b.
double midpoint_cut(double a, double b) {
  double mid = a + (b - a) / 2.0;
  if (!(mid < b)) mid = a;
  return mid;
}

}  // namespace

std::size_t BinDefinition::bin_count() const {
  if (kind == ColumnKind::kNumeric) return 2 + cut_points.size();
  std::size_t max_bin = 0;
  for (auto b : category_bins) max_bin = std::max(max_bin, b);
  if (has_overflow_bin) return std::max<std::size_t>(max_bin + 2, 2);
  return max_bin + 1;
}

std::size_t BinDefinition::numeric_bin(double value) const {
  if (is_missing(value)) return kMissingBin;
  const auto it = std::lower_bound(cut_points.begin(), cut_points.end(), value);
  return 1 + static_cast<std::size_t>(it - cut_points.begin());
}

std::size_t BinDefinition::category_bin(std::string_view label) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == label) return category_bins[i];
  }
  return has_overflow_bin ? overflow_bin() : kMissingBin;
}

std::string BinDefinition::bin_label(std::size_t bin) const {
  if (bin == kMissingBin) return "missing";
  if (kind == ColumnKind::kNumeric) {
    const std::size_t k = bin - 1;
    const std::string lo = k == 0 ? "-inf" : format_edge(cut_points[k - 1]);
    const std::string hi = k == cut_points.size() ? "inf" : format_edge(cut_points[k]);
    return "(" + lo + ", " + hi + "]";
  }
  if (has_overflow_bin && bin == overflow_bin()) return "other";
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (category_bins[i] == bin) return categories[i];
  }
  return "unused";
}

std::vector<double> quantile_cuts(std::span<const double> values, std::size_t max_bins) {
  require(max_bins >= 2, ErrorCode::kInvalidArgument, "max_bins must be >= 2");
  std::vector<double> sorted;
  sorted.reserve(values.size());
  for (double v : values) {
    if (!is_missing(v)) sorted.push_back(v);
  }
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cuts;
  if (sorted.empty()) return cuts;

  std::vector<double> distinct;
  std::vector<std::size_t> run_end;  // exclusive end index in `sorted` of each distinct value
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (distinct.empty() || sorted[i] != distinct.back()) {
      if (!distinct.empty()) run_end.push_back(i);
      distinct.push_back(sorted[i]);
    }
  }
  run_end.push_back(sorted.size());

  if (distinct.size() <= max_bins) {
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
      cuts.push_back(midpoint_cut(distinct[i], distinct[i + 1]));
    }
    return cuts;
  }

  // For each target rank k*n/max_bins pick the boundary between distinct
  // value runs closest to it; duplicates collapse.
  const std::size_t n = sorted.size();
  std::size_t last_boundary = 0;  // index into distinct of the run left of the last cut, +1
  for (std::size_t k = 1; k < max_bins; ++k) {
    const double target_rank = static_cast<double>(k) * static_cast<double>(n) /
                               static_cast<double>(max_bins);
    // First run whose end is >= target rank.
    const auto it = std::lower_bound(run_end.begin(), run_end.end(),
                                     static_cast<std::size_t>(std::ceil(target_rank)));
    std::size_t run = static_cast<std::size_t>(it - run_end.begin());
    if (run >= distinct.size() - 1) run = distinct.size() - 2;
    // Candidate boundaries: after run-1 or after run.
    std::size_t choice = run;
    if (run > 0) {
      const double below = static_cast<double>(run_end[run - 1]);
      const double above = static_cast<double>(run_end[run]);
      if (std::abs(target_rank - below) <= std::abs(above - target_rank)) choice = run - 1;
    }
    if (choice + 1 <= last_boundary) continue;
    cuts.push_back(midpoint_cut(distinct[choice], distinct[choice + 1]));
    last_boundary = choice + 1;
  }
  return cuts;
}

BinDefinition build_bin(const TabularFrame& frame, std::size_t column, std::size_t max_bins) {
  require(max_bins >= 2, ErrorCode::kInvalidArgument, "max_bins must be >= 2");
  const ColumnSchema& schema = frame.column(column);
  BinDefinition bin;
  bin.feature = column;
  bin.name = schema.name;
  bin.kind = schema.kind;
  if (schema.kind == ColumnKind::kNumeric) {
    bin.cut_points = quantile_cuts(frame.values(column), max_bins);
    return bin;
  }

  std::vector<std::size_t> counts(schema.categories.size(), 0);
  for (double v : frame.values(column)) {
    if (!is_missing(v)) ++counts[static_cast<std::size_t>(v)];
  }
  std::vector<std::size_t> observed;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) observed.push_back(i);
  }
  std::vector<std::size_t> kept = observed;
  if (observed.size() > max_bins - 1) {
    // Keep the most frequent max_bins - 1 categories; the rest share the overflow bin.
    std::stable_sort(kept.begin(), kept.end(),
                     [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
    kept.resize(max_bins - 1);
    std::sort(kept.begin(), kept.end());
    bin.has_overflow_bin = true;
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    bin.categories.push_back(schema.categories[kept[i]]);
    bin.category_bins.push_back(i + 1);
  }
  return bin;
}

std::vector<BinDefinition> build_bins(const TabularFrame& frame, std::size_t max_bins) {
  std::vector<BinDefinition> bins;
  bins.reserve(frame.cols());
  for (std::size_t c = 0; c < frame.cols(); ++c) bins.push_back(build_bin(frame, c, max_bins));
  return bins;
}

std::vector<std::uint16_t> apply_bin(const BinDefinition& bin, const TabularFrame& frame) {
  const auto column = frame.find_column(bin.name);
  require(column.has_value(), ErrorCode::kData, "dataset lacks feature '" + bin.name + "'");
  require(bin.bin_count() <= 65535, ErrorCode::kInvalidArgument, "too many bins");
  const ColumnSchema& schema = frame.column(*column);
  const auto values = frame.values(*column);
  std::vector<std::uint16_t> out(values.size(), kMissingBin);

  if (bin.kind == ColumnKind::kNumeric) {
    if (schema.kind == ColumnKind::kNumeric) {
      for (std::size_t r = 0; r < values.size(); ++r) {
        out[r] = static_cast<std::uint16_t>(bin.numeric_bin(values[r]));
      }
    } else {
      // Categorical column against a numeric definition: parse labels.
      std::vector<std::uint16_t> lut(schema.categories.size(), kMissingBin);
      for (std::size_t i = 0; i < lut.size(); ++i) {
        const auto& s = schema.categories[i];
        double v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && p == s.data() + s.size()) {
          lut[i] = static_cast<std::uint16_t>(bin.numeric_bin(v));
        }
      }
      for (std::size_t r = 0; r < values.size(); ++r) {
        if (!is_missing(values[r])) out[r] = lut[static_cast<std::size_t>(values[r])];
      }
    }
    return out;
  }

  if (schema.kind == ColumnKind::kCategorical) {
    std::vector<std::uint16_t> lut(schema.categories.size());
    for (std::size_t i = 0; i < lut.size(); ++i) {
      lut[i] = static_cast<std::uint16_t>(bin.category_bin(schema.categories[i]));
    }
    for (std::size_t r = 0; r < values.size(); ++r) {
      if (!is_missing(values[r])) out[r] = lut[static_cast<std::size_t>(values[r])];
    }
  } else {
    std::unordered_map<double, std::uint16_t> cache;
    for (std::size_t r = 0; r < values.size(); ++r) {
      if (is_missing(values[r])) continue;
      auto it = cache.find(values[r]);
      if (it == cache.end()) {
        it = cache.emplace(values[r], static_cast<std::uint16_t>(
                                          bin.category_bin(format_edge(values[r])))).first;
      }
      out[r] = it->second;
    }
  }
  return out;
}

}  // namespace glassboost
