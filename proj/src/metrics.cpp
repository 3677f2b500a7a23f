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

#include "glassboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glassboost/error.hpp"

namespace glassboost {
namespace {

void check_lengths(std::size_t a, std::size_t b) {
  require(a == b, ErrorCode::kInvalidArgument, "metric inputs differ in length");
}

double max_gap(const std::map<int, double>& rates) {
  if (rates.size() < 2) return 0.0;
  double lo = rates.begin()->second;
  double hi = lo;
  for (const auto& [g, r] : rates) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return hi - lo;
}

struct GroupCounts {
  std::size_t n = 0;
  std::size_t predicted = 0;
  std::size_t pos = 0;
  std::size_t tp = 0;
  std::size_t neg = 0;
  std::size_t fp = 0;
};

std::map<int, GroupCounts> count_groups(std::span<const std::uint8_t> y,
                                        std::span<const std::uint8_t> yhat,
                                        std::span<const int> groups) {
  std::map<int, GroupCounts> out;
  for (std::size_t i = 0; i < yhat.size(); ++i) {
    auto& c = out[groups[i]];
    ++c.n;
    c.predicted += yhat[i];
    if (y.empty()) continue;
    if (y[i]) {
      ++c.pos;
      c.tp += yhat[i];
    } else {
      ++c.neg;
      c.fp += yhat[i];
    }
  }
  return out;
}

}  // namespace

double roc_auc(std::span<const std::uint8_t> y, std::span<const double> p) {
  check_lengths(y.size(), p.size());
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  // Each positive scores one half-win per tied negative, two per lower negative.
  unsigned long long half_wins = 0;
  unsigned long long neg_below = 0;
  unsigned long long n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    unsigned long long pos = 0;
    unsigned long long neg = 0;
    while (j < order.size() && p[order[j]] == p[order[i]]) {
      (y[order[j]] ? pos : neg) += 1;
      ++j;
    }
    half_wins += pos * (2 * neg_below + neg);
    neg_below += neg;
    n_pos += pos;
    i = j;
  }
  require(n_pos > 0 && neg_below > 0, ErrorCode::kInvalidArgument,
          "roc_auc needs both classes present");
  return static_cast<double>(half_wins) / (2.0 * static_cast<double>(n_pos) *
                                           static_cast<double>(neg_below));
}

std::vector<std::uint8_t> threshold(std::span<const double> p, double cut) {
  std::vector<std::uint8_t> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= cut ? 1 : 0;
  return out;
}

ConfusionMatrix confusion_from_labels(std::span<const std::uint8_t> y,
                                      std::span<const std::uint8_t> yhat) {
  check_lengths(y.size(), yhat.size());
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i]) {
      (yhat[i] ? cm.tp : cm.fn) += 1;
    } else {
      (yhat[i] ? cm.fp : cm.tn) += 1;
    }
  }
  return cm;
}

ConfusionMatrix confusion(std::span<const std::uint8_t> y, std::span<const double> p, double cut) {
  check_lengths(y.size(), p.size());
  return confusion_from_labels(y, threshold(p, cut));
}

double f1(const ConfusionMatrix& cm) {
  const std::size_t denom = 2 * cm.tp + cm.fp + cm.fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double f1(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat) {
  return f1(confusion_from_labels(y, yhat));
}

FairnessReport fairness_report(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat,
                               std::span<const int> groups) {
  check_lengths(yhat.size(), groups.size());
  if (!y.empty()) check_lengths(y.size(), yhat.size());
  FairnessReport rep;
  for (const auto& [g, c] : count_groups(y, yhat, groups)) {
    rep.group_positive_rate[g] = static_cast<double>(c.predicted) / static_cast<double>(c.n);
    if (c.pos > 0) rep.group_tpr[g] = static_cast<double>(c.tp) / static_cast<double>(c.pos);
    if (c.neg > 0) rep.group_fpr[g] = static_cast<double>(c.fp) / static_cast<double>(c.neg);
  }
  rep.dp = max_gap(rep.group_positive_rate);
  rep.eod = std::max(max_gap(rep.group_tpr), max_gap(rep.group_fpr));
  return rep;
}

double demographic_parity(std::span<const std::uint8_t> yhat, std::span<const int> groups) {
  return fairness_report({}, yhat, groups).dp;
}

double equalized_odds(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat,
                      std::span<const int> groups) {
  return fairness_report(y, yhat, groups).eod;
}

std::vector<GroupCalibration> calibration_bins(std::span<const std::uint8_t> y,
                                               std::span<const double> p,
                                               std::span<const int> groups, std::size_t n_bins) {
  require(n_bins >= 1, ErrorCode::kInvalidArgument, "n_bins must be >= 1");
  check_lengths(y.size(), p.size());
  if (!groups.empty()) check_lengths(groups.size(), p.size());

  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < p.size(); ++i) members[groups.empty() ? -1 : groups[i]].push_back(i);
  if (members.empty()) members[-1] = {};

  std::vector<GroupCalibration> out;
  for (const auto& [g, rows] : members) {
    GroupCalibration curve;
    curve.group = g;
    curve.bins.resize(n_bins);
    std::vector<double> sum_p(n_bins, 0.0);
    std::vector<double> sum_y(n_bins, 0.0);
    for (auto i : rows) {
      auto b = static_cast<std::size_t>(std::clamp(p[i], 0.0, 1.0) * static_cast<double>(n_bins));
      b = std::min(b, n_bins - 1);
      sum_p[b] += p[i];
      sum_y[b] += y[i];
      ++curve.bins[b].count;
    }
    for (std::size_t b = 0; b < n_bins; ++b) {
      auto& bin = curve.bins[b];
      bin.lower = static_cast<double>(b) / static_cast<double>(n_bins);
      bin.upper = static_cast<double>(b + 1) / static_cast<double>(n_bins);
      if (bin.count > 0) {
        bin.mean_p = sum_p[b] / static_cast<double>(bin.count);
        bin.rate = sum_y[b] / static_cast<double>(bin.count);
      }
    }
    out.push_back(std::move(curve));
  }
  return out;
}

EvalReport evaluate_predictions(std::span<const std::uint8_t> y, std::span<const double> p,
                                std::span<const int> groups,
                                const std::vector<std::string>& group_names,
                                std::size_t calibration_bins_count) {
  EvalReport rep;
  rep.rows = y.size();
  rep.roc_auc = roc_auc(y, p);
  const auto yhat = threshold(p);
  rep.confusion = confusion_from_labels(y, yhat);
  rep.f1 = f1(rep.confusion);
  if (!groups.empty()) {
    const auto fr = fairness_report(y, yhat, groups);
    rep.has_fairness = true;
    rep.dp = fr.dp;
    rep.eod = fr.eod;
    rep.group_names = group_names;
  }
  rep.calibration = calibration_bins(y, p, groups, calibration_bins_count);
  return rep;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["roc_auc"] = report.roc_auc;
  j["f1"] = report.f1;
  j["confusion"] = {{"tp", report.confusion.tp},
                    {"tn", report.confusion.tn},
                    {"fp", report.confusion.fp},
                    {"fn", report.confusion.fn}};
  j["dp"] = report.has_fairness ? nlohmann::json(report.dp) : nlohmann::json(nullptr);
  j["eod"] = report.has_fairness ? nlohmann::json(report.eod) : nlohmann::json(nullptr);
  j["rows"] = report.rows;
  nlohmann::json cal = nlohmann::json::array();
  for (const auto& curve : report.calibration) {
    nlohmann::json c;
    if (curve.group < 0) {
      c["group"] = "all";
    } else if (static_cast<std::size_t>(curve.group) < report.group_names.size()) {
      c["group"] = report.group_names[static_cast<std::size_t>(curve.group)];
    } else {
      c["group"] = curve.group;
    }
    c["bins"] = nlohmann::json::array();
    for (const auto& b : curve.bins) {
      c["bins"].push_back({{"lower", b.lower},
                           {"upper", b.upper},
                           {"mean_p", b.mean_p},
                           {"rate", b.rate},
                           {"count", b.count}});
    }
    cal.push_back(std::move(c));
  }
  j["calibration"] = std::move(cal);
  j["fit_time_seconds"] = report.fit_time_seconds;
  return j;
}

}  // namespace glassboost
