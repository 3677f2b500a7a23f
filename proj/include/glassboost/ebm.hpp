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

#ifndef GLASSBOOST_EBM_HPP_
#define GLASSBOOST_EBM_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glassboost/binning.hpp"
#include "glassboost/frame.hpp"

namespace glassboost {

// Raw scores are clamped to this range before the sigmoid.
inline constexpr double kRawScoreClamp = 30.0;

double sigmoid(double raw);
double logit(double p);

struct EbmHyperparams {
  // Tuned by the hyperparameter search.
  double learning_rate = 0.01;
  std::size_t max_bins = 256;
  std::size_t max_leaves = 3;
  std::size_t max_rounds = 1000;
  std::size_t interactions = 10;
  std::size_t outer_bags = 8;
  std::size_t inner_bags = 0;
  double greedy_ratio = 1.5;
  std::uint64_t random_state = 1337;

  // Not searched.
  std::size_t max_interaction_bins = 32;
  std::size_t early_stopping_rounds = 50;
  double validation_size = 0.15;  // per outer bag; 0 disables early stopping
  double early_stopping_tolerance = 0.0;
  std::size_t min_samples_leaf = 1;

  void validate() const;
  friend bool operator==(const EbmHyperparams&, const EbmHyperparams&) = default;
};

// One additive term: a main effect (1 feature) or a pair (2 features).
// Scores are log-odds, row-major over the term's bin grid.
struct TermModel {
  std::vector<std::size_t> features;
  std::vector<std::size_t> shape;
  std::vector<double> scores;

  bool is_pair() const { return features.size() == 2; }
  friend bool operator==(const TermModel&, const TermModel&) = default;
};

struct TrainingMeta {
  std::uint64_t seed = 0;
  std::size_t n_train_rows = 0;
  // Training-row count per cell of each term's grid.
  std::vector<std::vector<double>> term_density;
  // Population stddev of each numeric feature over the training rows (0 for categoricals).
  std::vector<double> feature_stddev;
  std::string fit_started;
  std::string fit_finished;
  double fit_time_seconds = 0.0;
};

struct EbmModel {
  double intercept = 0.0;
  std::vector<TermModel> terms;
  std::vector<BinDefinition> bins;       // main-effect bins, one per feature
  std::vector<BinDefinition> pair_bins;  // coarser bins used by pair terms, one per feature
  EbmHyperparams hyperparams;
  std::vector<std::string> feature_names;
  TrainingMeta training_meta;

  std::string term_name(std::size_t term) const;
  std::size_t find_term(std::string_view name) const;  // throws on unknown names
  const BinDefinition& term_bin(std::size_t term, std::size_t axis) const;
};

// Per-row cell index of every term on some dataset.
class BinnedFrame {
 public:
  BinnedFrame(const EbmModel& model, const TabularFrame& frame);

  std::size_t rows() const { return rows_; }
  std::uint32_t cell(std::size_t term, std::size_t row) const { return cells_[term][row]; }
  std::span<const std::uint32_t> cells(std::size_t term) const { return cells_[term]; }

 private:
  std::size_t rows_ = 0;
  std::vector<std::vector<std::uint32_t>> cells_;
};

// Intercept + sum of term lookups, accumulated in term order.
double raw_score(const EbmModel& model, const BinnedFrame& binned, std::size_t row);
double raw_score(const EbmModel& model, const TabularFrame& frame, std::size_t row);

// base (if non-empty) is a per-row offset such as init scores.
std::vector<double> raw_scores(const EbmModel& model, const TabularFrame& frame,
                               std::span<const double> base = {});
std::vector<double> predict_proba(const EbmModel& model, const TabularFrame& frame,
                                  std::span<const double> base = {});

struct FitOptions {
  std::span<const double> init_scores;  // per training row, log-odds; empty for none
  bool fit_intercept = true;
  std::size_t n_threads = 1;
  bool record_training_loss = false;
};

struct BagDiagnostics {
  std::size_t main_epochs = 0;
  std::size_t best_main_epoch = 0;
  std::size_t pair_epochs = 0;
  std::vector<double> training_loss;    // per main-stage epoch (if recorded)
  std::vector<double> validation_loss;  // per main-stage epoch
};

struct FeaturePair {
  std::size_t first = 0;
  std::size_t second = 0;
  double gain = 0.0;
  friend bool operator==(const FeaturePair&, const FeaturePair&) = default;
};

struct FitResult {
  EbmModel model;
  std::vector<BagDiagnostics> bags;
  std::vector<FeaturePair> pairs;
};

FitResult fit_detailed(const TabularFrame& frame, const EbmHyperparams& hp,
                       const FitOptions& options = {});
EbmModel fit(const TabularFrame& frame, const EbmHyperparams& hp,
             const FitOptions& options = {});

// Ranks feature pairs by the gain of the best four-quadrant split of the
// residuals of `main_model` on `frame`; returns the top k, ties broken by
// (first, second). k is clamped to the number of pairs.
std::vector<FeaturePair> detect_interactions(const TabularFrame& frame, const EbmModel& main_model,
                                             std::size_t k, std::span<const double> base = {});

// Mean logistic loss of probabilities clamped like predict_proba.
double log_loss(std::span<const std::uint8_t> y, std::span<const double> p);

}  // namespace glassboost

#endif  // GLASSBOOST_EBM_HPP_
