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

#include "glassboost/explain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "glassboost/error.hpp"

namespace glassboost {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void bin_edges(const BinDefinition& bin, std::size_t b, double& lower, double& upper) {
  lower = kNaN;
  upper = kNaN;
  if (bin.kind != ColumnKind::kNumeric || b == kMissingBin) return;
  const std::size_t k = b - 1;
  const double inf = std::numeric_limits<double>::infinity();
  lower = k == 0 ? -inf : bin.cut_points[k - 1];
  upper = k == bin.cut_points.size() ? inf : bin.cut_points[k];
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

const TermImportance& GlobalExplanation::find(std::string_view name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e;
  }
  fail(ErrorCode::kInvalidArgument, "unknown term '" + std::string(name) + "'");
}

GlobalExplanation explain_global(const EbmModel& model, const TabularFrame& reference) {
  require(reference.rows() > 0, ErrorCode::kInvalidArgument, "reference dataset is empty");
  const BinnedFrame binned(model, reference);
  GlobalExplanation g;
  const double n = static_cast<double>(reference.rows());
  for (std::size_t t = 0; t < model.terms.size(); ++t) {
    double sum = 0.0;
    for (auto c : binned.cells(t)) sum += std::abs(model.terms[t].scores[c]);
    g.entries.push_back({t, model.term_name(t), sum / n, 0});
  }
  std::vector<std::size_t> order(g.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return g.entries[a].importance > g.entries[b].importance;
  });
  for (std::size_t r = 0; r < order.size(); ++r) g.entries[order[r]].rank = r + 1;
  return g;
}

LocalExplanation explain_local(const EbmModel& model, const BinnedFrame& binned, std::size_t row) {
  LocalExplanation e;
  e.intercept = model.intercept;
  e.total = model.intercept;
  e.contributions.reserve(model.terms.size());
  for (std::size_t t = 0; t < model.terms.size(); ++t) {
    const double c = model.terms[t].scores[binned.cell(t, row)];
    e.contributions.push_back(c);
    e.total += c;
  }
  return e;
}

LocalExplanation explain_local(const EbmModel& model, const TabularFrame& frame, std::size_t row) {
  const std::size_t r = row;
  const TabularFrame one = frame.subset(std::span<const std::size_t>(&r, 1));
  return explain_local(model, BinnedFrame(model, one), 0);
}

ShapeFunction export_shape_function(const EbmModel& model, std::string_view term) {
  const std::size_t t = model.find_term(term);
  const auto& tm = model.terms[t];
  ShapeFunction s;
  s.term = model.term_name(t);
  s.shape = tm.shape;
  for (auto f : tm.features) s.features.push_back(model.feature_names[f]);
  const auto& density = model.training_meta.term_density;
  const bool has_density = t < density.size() && density[t].size() == tm.scores.size();
  const std::size_t axes = tm.features.size();
  for (std::size_t k = 0; k < tm.scores.size(); ++k) {
    ShapeCell cell;
    std::size_t rest = k;
    cell.bins.resize(axes);
    for (std::size_t a = axes; a-- > 0;) {
      cell.bins[a] = rest % tm.shape[a];
      rest /= tm.shape[a];
    }
    for (std::size_t a = 0; a < axes; ++a) {
      const auto& def = model.term_bin(t, a);
      double lo = 0.0;
      double hi = 0.0;
      bin_edges(def, cell.bins[a], lo, hi);
      cell.labels.push_back(def.bin_label(cell.bins[a]));
      cell.lower.push_back(lo);
      cell.upper.push_back(hi);
    }
    cell.score = tm.scores[k];
    cell.density = has_density ? density[t][k] : 0.0;
    s.cells.push_back(std::move(cell));
  }
  return s;
}

nlohmann::json to_json(const GlobalExplanation& global) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : global.entries) {
    arr.push_back({{"term", e.name}, {"importance", e.importance}, {"rank", e.rank}});
  }
  return arr;
}

nlohmann::json to_json(const ShapeFunction& shape) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : shape.cells) {
    nlohmann::json lo = nlohmann::json::array();
    nlohmann::json hi = nlohmann::json::array();
    for (double v : c.lower) lo.push_back(number_or_null(v));
    for (double v : c.upper) hi.push_back(number_or_null(v));
    cells.push_back({{"bins", c.bins},
                     {"labels", c.labels},
                     {"lower", lo},
                     {"upper", hi},
                     {"score", c.score},
                     {"density", c.density}});
  }
  return {{"term", shape.term}, {"features", shape.features}, {"shape", shape.shape},
          {"cells", cells}};
}

nlohmann::json explanation_json(const EbmModel& model, const GlobalExplanation& global) {
  nlohmann::json shapes = nlohmann::json::array();
  for (std::size_t t = 0; t < model.terms.size(); ++t) {
    shapes.push_back(to_json(export_shape_function(model, model.term_name(t))));
  }
  return {{"intercept", model.intercept}, {"global", to_json(global)}, {"shapes", shapes}};
}

std::string shapes_to_csv(const EbmModel& model) {
  std::string out = "term,bin_x,bin_y,label_x,label_y,lower_x,upper_x,lower_y,upper_y,score,density\n";
  for (std::size_t t = 0; t < model.terms.size(); ++t) {
    const auto shape = export_shape_function(model, model.term_name(t));
    for (const auto& c : shape.cells) {
      const bool pair = c.bins.size() == 2;
      out += csv_text(shape.term) + ',' + std::to_string(c.bins[0]) + ',' +
             (pair ? std::to_string(c.bins[1]) : "") + ',' + csv_text(c.labels[0]) + ',' +
             (pair ? csv_text(c.labels[1]) : "") + ',' + csv_number(c.lower[0]) + ',' +
             csv_number(c.upper[0]) + ',' + (pair ? csv_number(c.lower[1]) : "") + ',' +
             (pair ? csv_number(c.upper[1]) : "") + ',' + csv_number(c.score) + ',' +
             csv_number(c.density) + '\n';
    }
  }
  return out;
}

}  // namespace glassboost
