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

#ifndef GLASSBOOST_PRETRAIN_HPP_
#define GLASSBOOST_PRETRAIN_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glassboost/frame.hpp"
#include "json.hpp"

namespace glassboost {

// Dense numeric view of a frame: numeric columns standardized, categoricals
// one-hot, and a 0/1 missing indicator for every column that had missing
// cells when the encoder was fitted (missing cells encode as 0).
struct FeatureEncoder {
  struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::kNumeric;
    double mean = 0.0;
    double stddev = 1.0;  // population; 1 for constant columns
    std::vector<std::string> categories;
    bool missing_indicator = false;
  };
  std::vector<Column> columns;

  std::size_t width() const;
};

FeatureEncoder fit_encoder(const TabularFrame& frame);
Eigen::MatrixXd encode(const FeatureEncoder& encoder, const TabularFrame& frame);
Eigen::MatrixXd encode_features(const TabularFrame& frame);  // fit_encoder + encode

enum class Activation { kRelu, kLinear };

struct AutoencoderConfig {
  std::size_t hidden = 0;      // 0: min(64, 2d)
  std::size_t bottleneck = 0;  // 0: max(2, ceil(d/4))
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1337;
  Activation hidden_activation = Activation::kRelu;
  // Full-data loss may not rise by more than this fraction between epochs
  // when learning_rate <= 1e-3; a larger rise aborts training.
  double monotone_tolerance = 1e-3;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
  Activation activation = Activation::kLinear;
};

// d -> h -> k -> h -> d; layers[1] output is the embedding.
struct AutoencoderModel {
  std::vector<DenseLayer> layers;
  std::vector<double> epoch_loss;  // full-data MSE after each epoch
  double initial_loss = 0.0;

  std::size_t input_dim() const { return static_cast<std::size_t>(layers.front().weight.cols()); }
  std::size_t bottleneck_dim() const { return static_cast<std::size_t>(layers[1].weight.rows()); }
  double final_loss() const { return epoch_loss.empty() ? initial_loss : epoch_loss.back(); }
};

// Glorot-uniform weights and zero biases drawn from the config seed.
AutoencoderModel init_autoencoder(std::size_t input_dim, const AutoencoderConfig& config);
AutoencoderModel train_autoencoder(const Eigen::MatrixXd& x, const AutoencoderConfig& config);

Eigen::MatrixXd reconstruct(const AutoencoderModel& model, const Eigen::MatrixXd& x);
Eigen::MatrixXd embed(const AutoencoderModel& model, const Eigen::MatrixXd& x);
double reconstruction_loss(const AutoencoderModel& model, const Eigen::MatrixXd& x);

// Analytic gradient of the mean squared reconstruction error, per layer.
struct LayerGradient {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};
std::vector<LayerGradient> loss_gradient(const AutoencoderModel& model, const Eigen::MatrixXd& x,
                                         double* loss = nullptr);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // perturbation crossed a ReLU kink
};

// Central differences with step 1e-5 against loss_gradient. Relative error is
// |a - n| / max(|a|, |n|, 1e-6); parameters whose +-step flips any ReLU
// activation on the batch are skipped.
GradientCheckResult gradient_check(const AutoencoderModel& model, const Eigen::MatrixXd& x);

struct LogisticHead {
  Eigen::VectorXd weight;
  double bias = 0.0;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
};

// Minimizes mean logistic loss + l2/2 |w|^2 (bias unpenalized) by full-batch
// gradient descent until |grad| <= 1e-6 or 10000 iterations. Weights and bias
// take separate steps of 1/(2 L_block).
LogisticHead fit_head(const Eigen::MatrixXd& z, std::span<const std::uint8_t> y, double l2);
Eigen::VectorXd head_proba(const LogisticHead& head, const Eigen::MatrixXd& z);
double head_loss(const LogisticHead& head, const Eigen::MatrixXd& z,
                 std::span<const std::uint8_t> y, double l2);

inline constexpr double kInitProbClamp = 1e-6;
// logit(clamp(p, 1e-6, 1 - 1e-6)).
std::vector<double> probabilities_to_init_scores(std::span<const double> p);

struct PretrainConfig {
  AutoencoderConfig autoencoder;
  double head_l2 = 0.1;
  std::size_t n_labels = 0;         // 0: label_fraction of the training rows
  double label_fraction = 0.1;
  std::uint64_t label_subset_seed = 1337;
};

struct InitScorePipeline {
  FeatureEncoder encoder;
  AutoencoderModel autoencoder;
  LogisticHead head;
  PretrainConfig config;
  std::vector<std::size_t> labeled_rows;  // into the labeled frame
};

// Autoencoder on every row of `unlabeled` (labels unused); head on the
// stratified label subset of `labeled`.
InitScorePipeline train_pipeline(const TabularFrame& unlabeled, const TabularFrame& labeled,
                                 const PretrainConfig& config);
// Head fitted on exactly the given rows of `labeled`.
InitScorePipeline train_pipeline_on_rows(const TabularFrame& unlabeled, const TabularFrame& labeled,
                                         std::span<const std::size_t> label_rows,
                                         const PretrainConfig& config);

std::vector<double> head_probabilities(const InitScorePipeline& pipeline, const TabularFrame& frame);
std::vector<double> make_init_scores(const InitScorePipeline& pipeline, const TabularFrame& frame);

nlohmann::json pipeline_to_json(const InitScorePipeline& pipeline);
InitScorePipeline pipeline_from_json(const nlohmann::json& j);

std::string init_scores_to_csv(std::span<const double> scores);
std::vector<double> init_scores_from_csv(const std::string& text);

}  // namespace glassboost

#endif  // GLASSBOOST_PRETRAIN_HPP_
