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

#include "glassboost/ebm.hpp"

#include <algorithm>
#include <cmath>

#include "glassboost/error.hpp"

namespace glassboost {

double sigmoid(double raw) {
  const double x = std::clamp(raw, -kRawScoreClamp, kRawScoreClamp);
  return 1.0 / (1.0 + std::exp(-x));
}

double logit(double p) { return std::log(p / (1.0 - p)); }

std::string EbmModel::term_name(std::size_t term) const {
  const auto& t = terms.at(term);
  std::string name = feature_names.at(t.features[0]);
  for (std::size_t i = 1; i < t.features.size(); ++i) name += " & " + feature_names.at(t.features[i]);
  return name;
}

std::size_t EbmModel::find_term(std::string_view name) const {
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (term_name(t) == name) return t;
  }
  fail(ErrorCode::kInvalidArgument, "unknown term '" + std::string(name) + "'");
}

const BinDefinition& EbmModel::term_bin(std::size_t term, std::size_t axis) const {
  const auto& t = terms.at(term);
  const std::size_t f = t.features.at(axis);
  if (t.is_pair() && !pair_bins.empty()) return pair_bins.at(f);
  return bins.at(f);
}

BinnedFrame::BinnedFrame(const EbmModel& model, const TabularFrame& frame) : rows_(frame.rows()) {
  cells_.resize(model.terms.size());
  for (std::size_t t = 0; t < model.terms.size(); ++t) {
    const auto& term = model.terms[t];
    auto& cells = cells_[t];
    cells.assign(rows_, 0);
    std::uint32_t stride = 1;
    for (std::size_t a = term.features.size(); a-- > 0;) {
      const auto bins = apply_bin(model.term_bin(t, a), frame);
      require(term.shape[a] == model.term_bin(t, a).bin_count(), ErrorCode::kData,
              "term '" + model.term_name(t) + "' does not match its bin definition");
      for (std::size_t r = 0; r < rows_; ++r) cells[r] += bins[r] * stride;
      stride *= static_cast<std::uint32_t>(term.shape[a]);
    }
  }
}

double raw_score(const EbmModel& model, const BinnedFrame& binned, std::size_t row) {
  double s = model.intercept;
  for (std::size_t t = 0; t < model.terms.size(); ++t) s += model.terms[t].scores[binned.cell(t, row)];
  return s;
}

double raw_score(const EbmModel& model, const TabularFrame& frame, std::size_t row) {
  const std::size_t r = row;
  const TabularFrame one = frame.subset(std::span<const std::size_t>(&r, 1));
  return raw_score(model, BinnedFrame(model, one), 0);
}

std::vector<double> raw_scores(const EbmModel& model, const TabularFrame& frame,
                               std::span<const double> base) {
  require(base.empty() || base.size() == frame.rows(), ErrorCode::kInvalidArgument,
          "base length must equal the row count");
  const BinnedFrame binned(model, frame);
  std::vector<double> out(frame.rows());
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = raw_score(model, binned, r);
    if (!base.empty()) out[r] += base[r];
  }
  return out;
}

std::vector<double> predict_proba(const EbmModel& model, const TabularFrame& frame,
                                  std::span<const double> base) {
  auto p = raw_scores(model, frame, base);
  for (auto& v : p) v = sigmoid(v);
  return p;
}

double log_loss(std::span<const std::uint8_t> y, std::span<const double> p) {
  require(y.size() == p.size(), ErrorCode::kInvalidArgument, "length mismatch");
  const double lo = sigmoid(-kRawScoreClamp);
  const double hi = sigmoid(kRawScoreClamp);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double q = std::clamp(p[i], lo, hi);
    s -= y[i] ? std::log(q) : std::log1p(-q);
  }
  return y.empty() ? 0.0 : s / static_cast<double>(y.size());
}

}  // namespace glassboost
