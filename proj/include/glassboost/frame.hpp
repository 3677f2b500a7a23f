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

#ifndef GLASSBOOST_FRAME_HPP_
#define GLASSBOOST_FRAME_HPP_

#include <cmath>
#include <limits>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace glassboost {

enum class ColumnKind { kNumeric, kCategorical };

const char* column_kind_name(ColumnKind kind);
ColumnKind parse_column_kind(std::string_view name);

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  // Categorical only, in first-appearance order. Cell values index into it.
  std::vector<std::string> categories;
  std::size_t missing_count = 0;
};

// Group labels of the sensitive attribute, one group id per row.
struct SensitiveAttribute {
  std::string column;
  std::vector<std::string> groups;
  std::vector<int> group_of_row;
};

struct TargetLabels {
  std::string column;
  std::string negative;
  std::string positive;
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double cell) { return std::isnan(cell); }

// Column-typed binary-classification dataset. Cells are stored column-major:
// numeric cells hold the value, categorical cells hold the category index,
// and missing cells hold NaN.
class TabularFrame {
 public:
  TabularFrame() = default;
  TabularFrame(std::vector<ColumnSchema> columns, std::vector<std::vector<double>> values,
               std::vector<std::uint8_t> target, TargetLabels labels,
               std::optional<SensitiveAttribute> sensitive = std::nullopt);

  std::size_t rows() const { return target_.size(); }
  std::size_t cols() const { return columns_.size(); }

  const std::vector<ColumnSchema>& columns() const { return columns_; }
  const ColumnSchema& column(std::size_t c) const { return columns_.at(c); }
  std::optional<std::size_t> find_column(std::string_view name) const;

  std::span<const double> values(std::size_t c) const { return values_.at(c); }
  double cell(std::size_t row, std::size_t c) const { return values_[c][row]; }
  std::string cell_text(std::size_t row, std::size_t c) const;

  std::span<const std::uint8_t> target() const { return target_; }
  const TargetLabels& target_labels() const { return labels_; }
  std::size_t positives() const;

  bool has_sensitive() const { return sensitive_.has_value(); }
  const SensitiveAttribute& sensitive() const;

  // Rows in the given order; schema (including category lists) is kept.
  TabularFrame subset(std::span<const std::size_t> rows) const;

  // Same rows with a different sensitive attribute taken from a feature column.
  TabularFrame with_sensitive(std::string_view column) const;

  friend bool operator==(const TabularFrame& a, const TabularFrame& b);

 private:
  std::vector<ColumnSchema> columns_;
  std::vector<std::vector<double>> values_;
  std::vector<std::uint8_t> target_;
  TargetLabels labels_;
  std::optional<SensitiveAttribute> sensitive_;
};

struct CsvLoadOptions {
  std::string target_column;
  std::optional<std::string> sensitive_column;
  // Labels mapped to 1. Empty: the lexicographically larger of the two
  // distinct labels is positive.
  std::vector<std::string> positive_labels;
  std::map<std::string, ColumnKind> kind_overrides;
  std::vector<std::string> drop_columns;
};

// RFC-4180 reader. Unquoted cells are whitespace-trimmed; "" and "?" are missing.
TabularFrame load_csv(const std::filesystem::path& path, const CsvLoadOptions& options);
TabularFrame parse_csv(std::string_view text, const CsvLoadOptions& options);
void write_csv(const TabularFrame& frame, const std::filesystem::path& path);
std::string to_csv(const TabularFrame& frame);

nlohmann::json schema_to_json(const TabularFrame& frame);

struct SplitSpec {
  double test_fraction = 0.25;
  std::size_t n_repeats = 3;
  std::uint64_t seed = 1337;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per-class holdout of `domain` (row ids into target): each class is shuffled
// with its own stream derived from (stream_seed, class) and the first
// round(fraction * class size) rows are held out. Both outputs are sorted.
Split stratified_holdout(std::span<const std::uint8_t> target,
                         std::span<const std::size_t> domain, double holdout_fraction,
                         std::uint64_t stream_seed);

std::vector<Split> stratified_splits(const TabularFrame& frame, const SplitSpec& spec);

std::vector<std::size_t> stratified_label_subset(const TabularFrame& frame,
                                                 std::size_t n_labels, std::uint64_t seed);
std::vector<std::size_t> stratified_label_subset(std::span<const std::uint8_t> target,
                                                 std::span<const std::size_t> domain,
                                                 std::size_t n_labels, std::uint64_t seed);

nlohmann::json splits_to_json(const std::vector<Split>& splits);
std::vector<Split> splits_from_json(const nlohmann::json& j);

std::vector<std::size_t> iota_indices(std::size_t n);

}  // namespace glassboost

#endif  // GLASSBOOST_FRAME_HPP_
