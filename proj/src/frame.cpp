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

#include "glassboost/frame.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "glassboost/error.hpp"
#include "glassboost/random.hpp"

namespace glassboost {
namespace {

struct RawCell {
  std::string text;
  bool quoted = false;
};

using RawRecord = std::vector<RawCell>;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splits RFC-4180 text into records. Quoted fields may contain separators,
// doubled quotes and line breaks.
std::vector<RawRecord> tokenize(std::string_view text) {
  std::vector<RawRecord> records;
  RawRecord record;
  std::string field;
  bool quoted = false;
  bool in_quotes = false;
  bool record_has_content = false;

  auto end_field = [&] {
    RawCell cell;
    cell.quoted = quoted;
    cell.text = quoted ? field : std::string(trim(field));
    record.push_back(std::move(cell));
    field.clear();
    quoted = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && !record[0].quoted && record[0].text.empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
    record_has_content = false;
  };

  std::size_t i = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;  // UTF-8 BOM
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (trim(field).empty()) {
          field.clear();
          quoted = true;
          in_quotes = true;
        } else {
          field.push_back(ch);
        }
        break;
      case ',':
        end_field();
        break;
      case '\n':
        end_record();
        break;
      case '\r':
        break;
      default:
        field.push_back(ch);
        record_has_content = true;
    }
  }
  require(!in_quotes, ErrorCode::kData, "unterminated quoted field");
  if (record_has_content || !record.empty() || quoted) end_record();
  return records;
}

bool is_missing_token(const RawCell& cell) {
  return cell.text.empty() || (!cell.quoted && cell.text == "?");
}

std::optional<double> parse_real(std::string_view token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string& s) {
  const bool needs = s.empty() || s == "?" || s.find_first_of(",\"\n\r") != std::string::npos ||
                     s.front() == ' ' || s.back() == ' ' || s.front() == '\t' ||
                     s.back() == '\t';
  if (!needs) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

const char* column_kind_name(ColumnKind kind) {
  return kind == ColumnKind::kNumeric ? "numeric" : "categorical";
}

ColumnKind parse_column_kind(std::string_view name) {
  if (name == "numeric") return ColumnKind::kNumeric;
  if (name == "categorical") return ColumnKind::kCategorical;
  fail(ErrorCode::kConfig, "unknown column kind '" + std::string(name) + "'");
}

TabularFrame::TabularFrame(std::vector<ColumnSchema> columns,
                           std::vector<std::vector<double>> values,
                           std::vector<std::uint8_t> target, TargetLabels labels,
                           std::optional<SensitiveAttribute> sensitive)
    : columns_(std::move(columns)),
      values_(std::move(values)),
      target_(std::move(target)),
      labels_(std::move(labels)),
      sensitive_(std::move(sensitive)) {
  require(columns_.size() == values_.size(), ErrorCode::kInvalidArgument,
          "column schema count does not match value columns");
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    require(values_[c].size() == target_.size(), ErrorCode::kInvalidArgument,
            "column '" + columns_[c].name + "' length differs from target length");
    const auto& col = columns_[c];
    if (col.kind == ColumnKind::kNumeric) {
      require(col.categories.empty(), ErrorCode::kInvalidArgument,
              "numeric column '" + col.name + "' has categories");
    } else {
      std::set<std::string> unique(col.categories.begin(), col.categories.end());
      require(unique.size() == col.categories.size(), ErrorCode::kInvalidArgument,
              "duplicate category labels in column '" + col.name + "'");
    }
  }
  for (auto t : target_) {
    require(t <= 1, ErrorCode::kInvalidArgument, "target must be 0/1");
  }
  if (sensitive_) {
    require(sensitive_->group_of_row.size() == target_.size(), ErrorCode::kInvalidArgument,
            "sensitive attribute length differs from target length");
  }
}

std::optional<std::size_t> TabularFrame::find_column(std::string_view name) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].name == name) return c;
  }
  return std::nullopt;
}

std::string TabularFrame::cell_text(std::size_t row, std::size_t c) const {
  const double v = values_.at(c).at(row);
  if (is_missing(v)) return {};
  if (columns_[c].kind == ColumnKind::kNumeric) return format_real(v);
  return columns_[c].categories.at(static_cast<std::size_t>(v));
}

std::size_t TabularFrame::positives() const {
  return static_cast<std::size_t>(std::count(target_.begin(), target_.end(), 1));
}

const SensitiveAttribute& TabularFrame::sensitive() const {
  require(sensitive_.has_value(), ErrorCode::kData, "dataset has no sensitive attribute");
  return *sensitive_;
}

TabularFrame TabularFrame::subset(std::span<const std::size_t> rows) const {
  std::vector<std::vector<double>> values(values_.size());
  std::vector<ColumnSchema> columns = columns_;
  for (std::size_t c = 0; c < values_.size(); ++c) {
    values[c].reserve(rows.size());
    std::size_t missing = 0;
    for (auto r : rows) {
      values[c].push_back(values_[c].at(r));
      missing += is_missing(values_[c][r]) ? 1 : 0;
    }
    columns[c].missing_count = missing;
  }
  std::vector<std::uint8_t> target;
  target.reserve(rows.size());
  for (auto r : rows) target.push_back(target_.at(r));
  std::optional<SensitiveAttribute> sensitive;
  if (sensitive_) {
    sensitive = SensitiveAttribute{sensitive_->column, sensitive_->groups, {}};
    sensitive->group_of_row.reserve(rows.size());
    for (auto r : rows) sensitive->group_of_row.push_back(sensitive_->group_of_row[r]);
  }
  return TabularFrame(std::move(columns), std::move(values), std::move(target), labels_,
                      std::move(sensitive));
}

TabularFrame TabularFrame::with_sensitive(std::string_view column) const {
  const auto c = find_column(column);
  require(c.has_value(), ErrorCode::kData,
          "sensitive column '" + std::string(column) + "' not found");
  SensitiveAttribute s{std::string(column), {}, {}};
  std::unordered_map<std::string, int> ids;
  for (std::size_t r = 0; r < rows(); ++r) {
    std::string label = is_missing(cell(r, *c)) ? std::string("<missing>") : cell_text(r, *c);
    auto [it, inserted] = ids.emplace(label, static_cast<int>(s.groups.size()));
    if (inserted) s.groups.push_back(label);
    s.group_of_row.push_back(it->second);
  }
  TabularFrame out = *this;
  out.sensitive_ = std::move(s);
  return out;
}

bool operator==(const TabularFrame& a, const TabularFrame& b) {
  if (a.columns_.size() != b.columns_.size() || a.target_ != b.target_) return false;
  for (std::size_t c = 0; c < a.columns_.size(); ++c) {
    const auto& x = a.columns_[c];
    const auto& y = b.columns_[c];
    if (x.name != y.name || x.kind != y.kind || x.categories != y.categories ||
        x.missing_count != y.missing_count) {
      return false;
    }
    for (std::size_t r = 0; r < a.rows(); ++r) {
      const double u = a.values_[c][r];
      const double v = b.values_[c][r];
      if (is_missing(u) != is_missing(v)) return false;
      if (!is_missing(u) && u != v) return false;
    }
  }
  if (a.sensitive_.has_value() != b.sensitive_.has_value()) return false;
  if (a.sensitive_) {
    if (a.sensitive_->groups != b.sensitive_->groups ||
        a.sensitive_->group_of_row != b.sensitive_->group_of_row) {
      return false;
    }
  }
  return a.labels_.positive == b.labels_.positive && a.labels_.negative == b.labels_.negative;
}

TabularFrame parse_csv(std::string_view text, const CsvLoadOptions& options) {
  std::vector<RawRecord> records = tokenize(text);
  require(!records.empty(), ErrorCode::kData, "CSV input is empty");
  const RawRecord header = records.front();
  const std::size_t width = header.size();
  require(records.size() > 1, ErrorCode::kData, "CSV input has a header but no rows");

  std::optional<std::size_t> target_index;
  std::optional<std::size_t> sensitive_index;
  for (std::size_t c = 0; c < width; ++c) {
    if (header[c].text == options.target_column) target_index = c;
    if (options.sensitive_column && header[c].text == *options.sensitive_column) {
      sensitive_index = c;
    }
  }
  require(target_index.has_value(), ErrorCode::kData,
          "target column '" + options.target_column + "' not found in header");
  require(!options.sensitive_column || sensitive_index.has_value(), ErrorCode::kData,
          "sensitive column '" + options.sensitive_column.value_or("") + "' not found in header");

  const std::size_t n_rows = records.size() - 1;
  for (std::size_t r = 1; r < records.size(); ++r) {
    require(records[r].size() == width, ErrorCode::kData,
            "record " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                " fields, header has " + std::to_string(width));
  }

  // Target.
  std::vector<std::uint8_t> target(n_rows);
  TargetLabels labels;
  labels.column = options.target_column;
  {
    std::vector<std::string> distinct;
    for (std::size_t r = 0; r < n_rows; ++r) {
      const RawCell& cell = records[r + 1][*target_index];
      require(!is_missing_token(cell), ErrorCode::kData,
              "missing target value on record " + std::to_string(r + 2));
      if (std::find(distinct.begin(), distinct.end(), cell.text) == distinct.end()) {
        distinct.push_back(cell.text);
      }
    }
    std::set<std::string> positive_set(options.positive_labels.begin(),
                                       options.positive_labels.end());
    if (positive_set.empty()) {
      require(distinct.size() == 2, ErrorCode::kData,
              "target column '" + options.target_column + "' has " +
                  std::to_string(distinct.size()) +
                  " distinct values; expected 2 or a positive-label override");
      labels.positive = std::max(distinct[0], distinct[1]);
      labels.negative = std::min(distinct[0], distinct[1]);
      positive_set.insert(labels.positive);
    } else {
      for (const auto& d : distinct) {
        if (positive_set.count(d)) {
          if (labels.positive.empty()) labels.positive = d;
        } else if (labels.negative.empty()) {
          labels.negative = d;
        }
      }
      require(!labels.positive.empty() && !labels.negative.empty(), ErrorCode::kData,
              "target column '" + options.target_column + "' is single-class under the override");
    }
    for (std::size_t r = 0; r < n_rows; ++r) {
      target[r] = positive_set.count(records[r + 1][*target_index].text) ? 1 : 0;
    }
  }

  // Features.
  std::set<std::string> dropped(options.drop_columns.begin(), options.drop_columns.end());
  std::vector<ColumnSchema> columns;
  std::vector<std::vector<double>> values;
  for (std::size_t c = 0; c < width; ++c) {
    if (c == *target_index || dropped.count(header[c].text)) continue;
    ColumnSchema schema;
    schema.name = header[c].text;
    std::vector<double> column(n_rows, kMissing);

    bool numeric = true;
    if (auto it = options.kind_overrides.find(schema.name); it != options.kind_overrides.end()) {
      numeric = it->second == ColumnKind::kNumeric;
    } else {
      for (std::size_t r = 0; r < n_rows && numeric; ++r) {
        const RawCell& cell = records[r + 1][c];
        if (!is_missing_token(cell) && !parse_real(cell.text)) numeric = false;
      }
    }
    schema.kind = numeric ? ColumnKind::kNumeric : ColumnKind::kCategorical;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < n_rows; ++r) {
      const RawCell& cell = records[r + 1][c];
      if (is_missing_token(cell)) {
        ++schema.missing_count;
        continue;
      }
      if (numeric) {
        auto v = parse_real(cell.text);
        if (v) {
          column[r] = *v;
        } else {
          ++schema.missing_count;  // unparsable under a numeric override
        }
      } else {
        auto [it, inserted] = index.emplace(cell.text, schema.categories.size());
        if (inserted) schema.categories.push_back(cell.text);
        column[r] = static_cast<double>(it->second);
      }
    }
    columns.push_back(std::move(schema));
    values.push_back(std::move(column));
  }

  std::optional<SensitiveAttribute> sensitive;
  if (sensitive_index) {
    SensitiveAttribute s{header[*sensitive_index].text, {}, {}};
    std::unordered_map<std::string, int> ids;
    for (std::size_t r = 0; r < n_rows; ++r) {
      const RawCell& cell = records[r + 1][*sensitive_index];
      std::string label = is_missing_token(cell) ? std::string("<missing>") : cell.text;
      auto [it, inserted] = ids.emplace(label, static_cast<int>(s.groups.size()));
      if (inserted) s.groups.push_back(label);
      s.group_of_row.push_back(it->second);
    }
    sensitive = std::move(s);
  }
  return TabularFrame(std::move(columns), std::move(values), std::move(target),
                      std::move(labels), std::move(sensitive));
}

TabularFrame load_csv(const std::filesystem::path& path, const CsvLoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_csv(buffer.str(), options);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string to_csv(const TabularFrame& frame) {
  std::ostringstream out;
  const auto& sensitive_column =
      frame.has_sensitive() ? frame.sensitive().column : std::string();
  const bool extra_sensitive =
      frame.has_sensitive() && !frame.find_column(sensitive_column).has_value();
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    out << quote_if_needed(frame.column(c).name) << ',';
  }
  if (extra_sensitive) out << quote_if_needed(sensitive_column) << ',';
  out << quote_if_needed(frame.target_labels().column) << '\n';
  for (std::size_t r = 0; r < frame.rows(); ++r) {
    for (std::size_t c = 0; c < frame.cols(); ++c) {
      if (!is_missing(frame.cell(r, c))) out << quote_if_needed(frame.cell_text(r, c));
      out << ',';
    }
    if (extra_sensitive) {
      const auto& s = frame.sensitive();
      const auto& label = s.groups[static_cast<std::size_t>(s.group_of_row[r])];
      if (label != "<missing>") out << quote_if_needed(label);
      out << ',';
    }
    const auto& labels = frame.target_labels();
    out << quote_if_needed(frame.target()[r] ? labels.positive : labels.negative) << '\n';
  }
  return out.str();
}

void write_csv(const TabularFrame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << to_csv(frame);
  require(static_cast<bool>(out), ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

nlohmann::json schema_to_json(const TabularFrame& frame) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : frame.columns()) {
    nlohmann::json j{{"name", c.name},
                     {"kind", column_kind_name(c.kind)},
                     {"missing_count", c.missing_count}};
    if (c.kind == ColumnKind::kCategorical) j["categories"] = c.categories;
    cols.push_back(std::move(j));
  }
  nlohmann::json out{{"rows", frame.rows()},
                     {"columns", std::move(cols)},
                     {"target",
                      {{"column", frame.target_labels().column},
                       {"positive_label", frame.target_labels().positive},
                       {"negative_label", frame.target_labels().negative},
                       {"positives", frame.positives()}}}};
  if (frame.has_sensitive()) {
    const auto& s = frame.sensitive();
    std::vector<std::size_t> counts(s.groups.size(), 0);
    for (int g : s.group_of_row) ++counts[static_cast<std::size_t>(g)];
    out["sensitive"] = {{"column", s.column}, {"groups", s.groups}, {"counts", counts}};
  }
  return out;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

Split stratified_holdout(std::span<const std::uint8_t> target,
                         std::span<const std::size_t> domain, double holdout_fraction,
                         std::uint64_t stream_seed) {
  require(holdout_fraction >= 0.0 && holdout_fraction < 1.0, ErrorCode::kInvalidArgument,
          "holdout fraction must be in [0, 1)");
  Split split;
  for (std::uint8_t cls = 0; cls <= 1; ++cls) {
    std::vector<std::size_t> members;
    for (auto r : domain) {
      if (target[r] == cls) members.push_back(r);
    }
    std::sort(members.begin(), members.end());
    CounterRng rng = CounterRng::stream(stream_seed, {cls});
    rng.shuffle(std::span<std::size_t>(members));
    const double wanted = holdout_fraction * static_cast<double>(members.size());
    auto k = static_cast<std::size_t>(std::floor(wanted + 0.5));
    if (holdout_fraction > 0.0 && members.size() >= 2) {
      k = std::clamp<std::size_t>(k, 1, members.size() - 1);
    } else if (members.size() < 2) {
      k = 0;
    }
    split.test.insert(split.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
    split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<Split> stratified_splits(const TabularFrame& frame, const SplitSpec& spec) {
  require(spec.test_fraction > 0.0 && spec.test_fraction < 1.0, ErrorCode::kInvalidArgument,
          "test_fraction must be in (0, 1)");
  require(spec.n_repeats >= 1, ErrorCode::kInvalidArgument, "n_repeats must be >= 1");
  const std::size_t pos = frame.positives();
  require(pos >= 2 && frame.rows() - pos >= 2, ErrorCode::kData,
          "stratified splitting needs at least 2 rows of each class");
  const auto all = iota_indices(frame.rows());
  std::vector<Split> splits;
  for (std::size_t r = 0; r < spec.n_repeats; ++r) {
    splits.push_back(stratified_holdout(frame.target(), all, spec.test_fraction,
                                        CounterRng::derive(spec.seed, {0x5e17, r})));
  }
  return splits;
}

std::vector<std::size_t> stratified_label_subset(std::span<const std::uint8_t> target,
                                                 std::span<const std::size_t> domain,
                                                 std::size_t n_labels, std::uint64_t seed) {
  require(n_labels >= 2, ErrorCode::kInvalidArgument, "n_labels must be >= 2");
  require(n_labels <= domain.size(), ErrorCode::kInvalidArgument,
          "n_labels (" + std::to_string(n_labels) + ") exceeds row count (" +
              std::to_string(domain.size()) + ")");
  std::vector<std::size_t> by_class[2];
  for (auto r : domain) by_class[target[r]].push_back(r);
  require(!by_class[0].empty() && !by_class[1].empty(), ErrorCode::kData,
          "label subset needs both classes present");
  const double rate = static_cast<double>(by_class[1].size()) / static_cast<double>(domain.size());
  auto n_pos = static_cast<std::size_t>(std::floor(rate * static_cast<double>(n_labels) + 0.5));
  n_pos = std::clamp<std::size_t>(n_pos, 1, n_labels - 1);
  n_pos = std::min(n_pos, by_class[1].size());
  if (n_labels - n_pos > by_class[0].size()) n_pos = n_labels - by_class[0].size();
  const std::size_t take[2] = {n_labels - n_pos, n_pos};
  std::vector<std::size_t> out;
  for (std::uint8_t cls = 0; cls <= 1; ++cls) {
    auto& members = by_class[cls];
    std::sort(members.begin(), members.end());
    CounterRng rng = CounterRng::stream(seed, {0x1abe1, cls});
    rng.shuffle(std::span<std::size_t>(members));
    out.insert(out.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take[cls]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> stratified_label_subset(const TabularFrame& frame,
                                                 std::size_t n_labels, std::uint64_t seed) {
  const auto all = iota_indices(frame.rows());
  return stratified_label_subset(frame.target(), all, n_labels, seed);
}

nlohmann::json splits_to_json(const std::vector<Split>& splits) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t r = 0; r < splits.size(); ++r) {
    out.push_back({{"repeat", r}, {"train", splits[r].train}, {"test", splits[r].test}});
  }
  return out;
}

std::vector<Split> splits_from_json(const nlohmann::json& j) {
  std::vector<Split> out;
  for (const auto& s : j) {
    out.push_back(Split{s.at("train").get<std::vector<std::size_t>>(),
                        s.at("test").get<std::vector<std::size_t>>()});
  }
  return out;
}

}  // namespace glassboost
