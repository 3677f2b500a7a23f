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

#ifndef GLASSBOOST_VALIDATE_HPP_
#define GLASSBOOST_VALIDATE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glassboost/ebm.hpp"
#include "glassboost/metrics.hpp"
#include "glassboost/pretrain.hpp"
#include "json.hpp"

namespace glassboost {

struct SignificanceResult {
  double statistic = 0.0;  // W = min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_value = 1.0;    // two-sided
  std::size_t n_effective = 0;
  bool exact = true;
};

// Paired signed-rank test on a - b. Zero differences are dropped and tied
// magnitudes get midranks. n <= 20: exact p from the distribution of W+ over
// all sign assignments; otherwise the normal approximation with continuity
// and tie corrections.
SignificanceResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

struct PerturbationOptions {
  double noise_scale = 0.05;
  std::size_t n_draws = 10;
  std::uint64_t seed = 1337;
  std::optional<std::string> feature;  // targeted mode: only this column is perturbed
};

struct PerturbationResult {
  double mean_abs_delta = 0.0;
  double max_abs_delta = 0.0;
  double flip_rate = 0.0;  // fraction of (draw, row) whose 0.5-threshold label changes
};

// Adds Gaussian noise with sd noise_scale * (training stddev of the feature)
// to numeric, non-missing cells and compares predictions with the clean ones.
PerturbationResult perturbation_sensitivity(const EbmModel& model, const TabularFrame& frame,
                                            const PerturbationOptions& options);

enum class ConfigKind { kBaseline, kPerfHpo, kFairHpo, kInitOnly, kInitHpo };
const char* config_kind_name(ConfigKind kind);
ConfigKind parse_config_kind(std::string_view name);

struct RunConfiguration {
  std::string name;
  ConfigKind kind = ConfigKind::kBaseline;
  EbmHyperparams hyperparams;
  bool warm_start = false;
  PretrainConfig pretrain;
  // Autoencoder on all rows (features only) or on the training partition only.
  bool transductive = true;
  // Fit the EBM on the head's labeled rows only (low-label regime).
  bool labeled_rows_only = false;
};

struct RunCell {
  std::size_t config = 0;
  std::size_t repeat = 0;
  EvalReport report;
};

struct RunSummary {
  std::string name;
  std::size_t repeats = 0;
  double roc_mean = 0.0;
  double roc_std = 0.0;  // population
  double f1_mean = 0.0;
  double dp_mean = 0.0;
  double eod_mean = 0.0;
  double fit_time_mean = 0.0;
  double fit_time_std = 0.0;
  ConfusionMatrix confusion_total;
  bool has_fairness = false;
};

struct RunMatrix {
  std::vector<RunConfiguration> configurations;
  std::vector<Split> splits;
  std::vector<RunCell> cells;  // config-major, then repeat
  std::vector<RunSummary> summaries;

  std::vector<double> roc_by_repeat(std::size_t config) const;
};

struct RunMatrixOptions {
  std::size_t n_threads = 1;
  std::function<void(const RunCell&)> on_cell;
};

// Evaluates every configuration on every split repeat of `frame`.
RunMatrix run_matrix(const TabularFrame& frame, const std::vector<RunConfiguration>& configs,
                     const SplitSpec& spec, const RunMatrixOptions& options = {});

RunSummary summarize(const std::string& name, std::span<const EvalReport> reports);

nlohmann::json to_json(const SignificanceResult& r);
nlohmann::json to_json(const RunMatrix& m);
// Per-configuration table plus signed-rank tests of each configuration
// against the first one.
std::string render_markdown(const RunMatrix& m, const std::string& title);

}  // namespace glassboost

#endif  // GLASSBOOST_VALIDATE_HPP_
