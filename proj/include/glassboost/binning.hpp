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

#ifndef GLASSBOOST_BINNING_HPP_
#define GLASSBOOST_BINNING_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glassboost/frame.hpp"

namespace glassboost {

inline constexpr std::size_t kMissingBin = 0;

// Discretization of one feature. Bin 0 is always the missing bin.
//  numeric:     bin 1 + #{cut < x}, i.e. bin k covers (cut[k-2], cut[k-1]]
//  categorical: categories[i] maps to category_bins[i]; unseen labels go to
//               the overflow bin when there is one, otherwise to bin 0.
struct BinDefinition {
  std::size_t feature = 0;
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  std::vector<double> cut_points;
  std::vector<std::string> categories;
  std::vector<std::size_t> category_bins;
  bool has_missing_bin = true;
  bool has_overflow_bin = false;

  std::size_t bin_count() const;
  std::size_t numeric_bin(double value) const;
  std::size_t category_bin(std::string_view label) const;
  std::size_t overflow_bin() const { return bin_count() - 1; }
  // Display label of a bin ("(1.5, 2.5]", "Male", "missing", "other").
  std::string bin_label(std::size_t bin) const;

  friend bool operator==(const BinDefinition&, const BinDefinition&) = default;
};

// Quantile cut points over the non-missing values. At most max_bins - 1 cuts;
// a column with <= max_bins distinct values gets one bin per value.
std::vector<double> quantile_cuts(std::span<const double> values, std::size_t max_bins);

BinDefinition build_bin(const TabularFrame& frame, std::size_t column, std::size_t max_bins);
std::vector<BinDefinition> build_bins(const TabularFrame& frame, std::size_t max_bins);

// Bin indices of every row of `frame` for `bin`, matching the column by name
// and categories by label.
std::vector<std::uint16_t> apply_bin(const BinDefinition& bin, const TabularFrame& frame);

}  // namespace glassboost

#endif  // GLASSBOOST_BINNING_HPP_
