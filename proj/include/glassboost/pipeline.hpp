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

#ifndef GLASSBOOST_PIPELINE_HPP_
#define GLASSBOOST_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glassboost/ebm.hpp"
#include "glassboost/hpo.hpp"
#include "glassboost/pretrain.hpp"
#include "glassboost/validate.hpp"
#include "json.hpp"

namespace glassboost {

// Everything a command needs. Built from defaults, then a config file, then
// command-line flags (later layers win); see run_config_from_json.
struct RunConfig {
  std::filesystem::path dataset;
  std::string target_column;
  std::optional<std::string> sensitive_column;
  std::vector<std::string> positive_labels;
  std::vector<std::string> drop_columns;
  std::map<std::string, ColumnKind> kind_overrides;
  std::size_t subsample_rows = 0;  // 0: all rows; else a stratified subsample

  std::uint64_t seed = 1337;
  SplitSpec split;
  EbmHyperparams hyperparams;
  std::filesystem::path out_dir = "out";
  bool quiet = false;
  std::size_t threads = 1;

  ObjectiveKind objective = ObjectiveKind::kPerformance;
  std::size_t trials = 50;
  bool resume = false;
  double validation_fraction = 0.2;

  PretrainConfig pretrain;
  bool train_only_pretrain = false;

  std::filesystem::path model_path;
  // Per-row log-odds offsets aligned to the dataset rows (or, for evaluate,
  // to the evaluated rows). train uses them as init scores and adds them back
  // on the test rows.
  std::filesystem::path init_scores_path;
  bool fit_intercept = true;
  std::string rows = "test";  // evaluate: test | train | all
  std::size_t repeat = 0;
  std::optional<std::size_t> explain_row;

  double noise_scale = 0.05;
  std::size_t noise_draws = 10;
  std::optional<std::string> perturb_feature;
  std::vector<ConfigKind> configurations;
  bool dry_run = false;
};

// Applies the keys present in `j` on top of `base`. Unknown keys are errors.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
nlohmann::json run_config_to_json(const RunConfig& config);

using LogSink = std::function<void(const std::string&)>;

// Each command writes its artifacts under config.out_dir and returns a JSON
// summary listing them.
nlohmann::json cmd_ingest(const RunConfig& config, const LogSink& log = {});
nlohmann::json cmd_split(const RunConfig& config, const LogSink& log = {});
nlohmann::json cmd_train(const RunConfig& config, const LogSink& log = {});
nlohmann::json cmd_tune(const RunConfig& config, const LogSink& log = {});
nlohmann::json cmd_pretrain(const RunConfig& config, const LogSink& log = {});
nlohmann::json cmd_evaluate(const RunConfig& config, const LogSink& log = {});
nlohmann::json cmd_explain(const RunConfig& config, const LogSink& log = {});
nlohmann::json cmd_validate(const RunConfig& config, const LogSink& log = {});
nlohmann::json cmd_benchmark(const RunConfig& config, const LogSink& log = {});

// Dispatches on the subcommand name.
nlohmann::json run_command(const std::string& command, const RunConfig& config,
                           const LogSink& log = {});

// Loads config.dataset with the configured column options and subsample.
TabularFrame load_dataset(const RunConfig& config);

}  // namespace glassboost

#endif  // GLASSBOOST_PIPELINE_HPP_
