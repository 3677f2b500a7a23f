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

#ifndef GLASSBOOST_METRICS_HPP_
#define GLASSBOOST_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace glassboost {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Midrank ROC AUC. Computed from integer half-win counts so the result equals
// (2 * wins + ties) / (2 * P * N) exactly.
double roc_auc(std::span<const std::uint8_t> y, std::span<const double> p);

std::vector<std::uint8_t> threshold(std::span<const double> p, double cut = 0.5);
ConfusionMatrix confusion(std::span<const std::uint8_t> y, std::span<const double> p,
                          double cut = 0.5);
ConfusionMatrix confusion_from_labels(std::span<const std::uint8_t> y,
                                      std::span<const std::uint8_t> yhat);
// Returns 0 when there are no predicted or actual positives.
double f1(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat);
double f1(const ConfusionMatrix& cm);

// Max pairwise gap in positive-prediction rate across groups; 0 for one group.
double demographic_parity(std::span<const std::uint8_t> yhat, std::span<const int> groups);

// Max over |TPR gap| and |FPR gap| across groups. A group without positives
// (negatives) takes no part in the TPR (FPR) gap.
double equalized_odds(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat,
                      std::span<const int> groups);

struct FairnessReport {
  double dp = 0.0;
  double eod = 0.0;
  std::map<int, double> group_positive_rate;
  std::map<int, double> group_tpr;
  std::map<int, double> group_fpr;
};

FairnessReport fairness_report(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat,
                               std::span<const int> groups);

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  double mean_p = 0.0;
  double rate = 0.0;
  std::size_t count = 0;
};

struct GroupCalibration {
  int group = -1;  // -1: all rows
  std::vector<CalibrationBin> bins;
};

// Equal-width bins over [0, 1]; p = 1 falls in the last bin. Empty groups
// argument: one curve over all rows.
std::vector<GroupCalibration> calibration_bins(std::span<const std::uint8_t> y,
                                               std::span<const double> p,
                                               std::span<const int> groups, std::size_t n_bins);

struct EvalReport {
  double roc_auc = 0.0;
  double f1 = 0.0;
  ConfusionMatrix confusion;
  bool has_fairness = false;
  double dp = 0.0;
  double eod = 0.0;
  std::vector<std::string> group_names;
  std::vector<GroupCalibration> calibration;
  double fit_time_seconds = 0.0;
  std::size_t rows = 0;
};

// groups may be empty (no fairness metrics); group_names label group ids.
EvalReport evaluate_predictions(std::span<const std::uint8_t> y, std::span<const double> p,
                                std::span<const int> groups,
                                const std::vector<std::string>& group_names,
                                std::size_t calibration_bins_count = 10);

nlohmann::json to_json(const EvalReport& report);

}  // namespace glassboost

#endif  // GLASSBOOST_METRICS_HPP_
