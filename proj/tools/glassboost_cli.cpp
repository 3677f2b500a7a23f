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

// glassboost command-line front end. Flags are collected into a JSON patch
// that is layered over the --config file and handed to the shared library.

#include <CLI11.hpp>

#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "glassboost/glassboost.h"
#include "json.hpp"

namespace {

using nlohmann::json;

// Exit codes, one per error class.
enum Exit : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitData = 4,
  kExitNumeric = 5,
};

int exit_code(gb_status s) {
  switch (s) {
    case GB_OK: return kExitOk;
    case GB_ERR_INVALID_ARGUMENT:
    case GB_ERR_CONFIG: return kExitUsage;
    case GB_ERR_IO: return kExitIo;
    case GB_ERR_DATA: return kExitData;
    case GB_ERR_NUMERIC: return kExitNumeric;
    case GB_ERR_INTERNAL: break;
  }
  return kExitInternal;
}

enum class Kind { kString, kUint, kReal, kBool, kList, kKinds };

struct Binding {
  CLI::Option* option = nullptr;
  json::json_pointer ptr;
  Kind kind = Kind::kString;
  std::string value;
  std::vector<std::string> values;
  bool flag = false;
};

class FlagSet {
 public:
  CLI::Option* value(CLI::App* app, const std::string& name, const std::string& pointer, Kind kind,
                     const std::string& help) {
    Binding& b = bindings_.emplace_back();
    b.ptr = json::json_pointer(pointer);
    b.kind = kind;
    if (kind == Kind::kList || kind == Kind::kKinds) {
      b.option = app->add_option(name, b.values, help)->delimiter(',');
    } else {
      b.option = app->add_option(name, b.value, help);
      if (kind == Kind::kUint) b.option->check(CLI::NonNegativeNumber);
      if (kind == Kind::kReal) b.option->check(CLI::Number);
    }
    return b.option;
  }

  void flag(CLI::App* app, const std::string& name, const std::string& pointer, bool value,
            const std::string& help) {
    Binding& b = bindings_.emplace_back();
    b.ptr = json::json_pointer(pointer);
    b.kind = Kind::kBool;
    b.flag = value;
    b.option = app->add_flag(name, help);
  }

  json patch() const {
    json out = json::object();
    for (const auto& b : bindings_) {
      if (b.option->count() == 0) continue;
      switch (b.kind) {
        case Kind::kString: out[b.ptr] = b.value; break;
        case Kind::kUint: out[b.ptr] = std::stoull(b.value); break;
        case Kind::kReal: out[b.ptr] = std::stod(b.value); break;
        case Kind::kBool: out[b.ptr] = b.flag; break;
        case Kind::kList: out[b.ptr] = b.values; break;
        case Kind::kKinds:
          for (const auto& col : b.values) out[b.ptr][col] = b.ptr.back() == "cat" ? "categorical" : "numeric";
          break;
      }
    }
    // Categorical/numeric overrides are staged under /kinds/{cat,num}; merge them.
    if (out.contains("kinds")) {
      json kinds = json::object();
      for (const auto& [group, cols] : out["kinds"].items()) {
        for (const auto& [col, kind] : cols.items()) kinds[col] = kind;
      }
      out["kinds"] = kinds;
    }
    return out;
  }

 private:
  std::deque<Binding> bindings_;
};

void dataset_flags(CLI::App* app, FlagSet& f) {
  f.value(app, "--data", "/dataset", Kind::kString, "CSV dataset path");
  f.value(app, "--target", "/target", Kind::kString, "target column");
  f.value(app, "--sensitive-column", "/sensitive", Kind::kString, "sensitive attribute column");
  f.value(app, "--positive-label", "/positive_labels", Kind::kList, "labels mapped to class 1");
  f.value(app, "--drop", "/drop_columns", Kind::kList, "columns to ignore");
  f.value(app, "--categorical", "/kinds/cat", Kind::kKinds, "force columns categorical");
  f.value(app, "--numeric", "/kinds/num", Kind::kKinds, "force columns numeric");
  f.value(app, "--subsample", "/subsample", Kind::kUint, "stratified row subsample (0 = all)");
  f.value(app, "--test-fraction", "/split/test_fraction", Kind::kReal, "test share per repeat");
  f.value(app, "--repeats", "/split/repeats", Kind::kUint, "stratified split repeats");
  f.value(app, "--threads", "/threads", Kind::kUint, "worker threads for bag fitting");
}

void hyperparam_flags(CLI::App* app, FlagSet& f) {
  f.value(app, "--learning-rate", "/hyperparams/learning_rate", Kind::kReal, "boosting learning rate");
  f.value(app, "--max-bins", "/hyperparams/max_bins", Kind::kUint, "bins per main-effect feature");
  f.value(app, "--max-leaves", "/hyperparams/max_leaves", Kind::kUint, "leaves per tree");
  f.value(app, "--max-rounds", "/hyperparams/max_rounds", Kind::kUint, "boosting epochs");
  f.value(app, "--interactions", "/hyperparams/interactions", Kind::kUint, "pair terms to add");
  f.value(app, "--outer-bags", "/hyperparams/outer_bags", Kind::kUint, "outer bags");
  f.value(app, "--inner-bags", "/hyperparams/inner_bags", Kind::kUint, "inner bags per step");
  f.value(app, "--greedy-ratio", "/hyperparams/greedy_ratio", Kind::kReal, "greedy steps per epoch");
  f.value(app, "--random-state", "/hyperparams/random_state", Kind::kUint, "model seed (defaults to --seed)");
  f.value(app, "--early-stopping-rounds", "/hyperparams/early_stopping_rounds", Kind::kUint,
          "early-stopping patience in epochs");
  f.value(app, "--validation-size", "/hyperparams/validation_size", Kind::kReal,
          "per-bag early-stopping holdout (0 disables)");
  f.value(app, "--max-interaction-bins", "/hyperparams/max_interaction_bins", Kind::kUint,
          "bins per feature in pair terms");
}

void tuning_flags(CLI::App* app, FlagSet& f) {
  f.value(app, "--objective", "/tune/objective", Kind::kString, "performance | fairness");
  f.value(app, "--trials", "/tune/trials", Kind::kUint, "trials per study");
  f.flag(app, "--resume", "/tune/resume", true, "continue a persisted study");
  f.value(app, "--validation-fraction", "/tune/validation_fraction", Kind::kReal,
          "validation share of the training partition");
}

void pretrain_flags(CLI::App* app, FlagSet& f) {
  f.value(app, "--labels", "/pretrain/labels", Kind::kUint, "labeled rows for the head (0 = use --label-fraction)");
  f.value(app, "--label-fraction", "/pretrain/label_fraction", Kind::kReal, "labeled share of training rows");
  f.value(app, "--epochs", "/pretrain/epochs", Kind::kUint, "autoencoder epochs");
  f.value(app, "--batch-size", "/pretrain/batch_size", Kind::kUint, "autoencoder batch size");
  f.value(app, "--ae-learning-rate", "/pretrain/learning_rate", Kind::kReal, "autoencoder learning rate");
  f.value(app, "--hidden", "/pretrain/hidden", Kind::kUint, "hidden width (0 = auto)");
  f.value(app, "--bottleneck", "/pretrain/bottleneck", Kind::kUint, "embedding width (0 = auto)");
  f.value(app, "--head-l2", "/pretrain/head_l2", Kind::kReal, "L2 penalty of the logistic head");
  f.flag(app, "--train-only-pretrain", "/pretrain/train_only", true,
         "fit the autoencoder on training rows only");
}

void print_summary(const json& result) {
  if (result.contains("plan")) {
    for (const auto& step : result["plan"]) std::cout << "plan: " << step.get<std::string>() << "\n";
  }
  if (result.contains("artifacts")) {
    for (const auto& a : result["artifacts"]) std::cout << "wrote " << a.get<std::string>() << "\n";
  }
}

void log_line(const char* line, void*) { std::cerr << line << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glassboost: explainable boosting with fairness-aware tuning and warm starts"};
  app.require_subcommand(1);
  app.fallthrough();

  FlagSet flags;
  std::string config_path;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  flags.value(&app, "--seed", "/seed", Kind::kUint, "global seed (splits, models, samplers)");
  flags.value(&app, "--out-dir", "/out_dir", Kind::kString, "artifact directory");
  app.add_flag("-q,--quiet", quiet, "suppress progress output");

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"ingest", "load a CSV and write its inferred schema"},
      {"split", "write the stratified repeat splits"},
      {"train", "fit the default model on every repeat and report test scores"},
      {"tune", "run a TPE study and refit the best configuration"},
      {"pretrain", "train the autoencoder and logistic head; write init scores"},
      {"evaluate", "score a saved model"},
      {"explain", "global importances, shape functions and an optional local breakdown"},
      {"validate", "repeated-split run matrix, significance and perturbation checks"},
      {"benchmark", "five-configuration comparison table"},
  };
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    dataset_flags(sub, flags);
    const std::string name = cmd.name;
    if (name == "train" || name == "tune" || name == "validate" || name == "benchmark") {
      hyperparam_flags(sub, flags);
    }
    if (name == "train") {
      flags.value(sub, "--init-scores", "/init_scores", Kind::kString, "per-row init scores (CSV)");
      flags.flag(sub, "--no-intercept", "/fit_intercept", false, "keep the intercept at 0");
    }
    if (name == "tune" || name == "validate" || name == "benchmark") tuning_flags(sub, flags);
    if (name == "pretrain" || name == "validate" || name == "benchmark") pretrain_flags(sub, flags);
    if (name == "tune" || name == "pretrain" || name == "evaluate" || name == "explain") {
      flags.value(sub, "--repeat", "/repeat", Kind::kUint, "split repeat to use");
    }
    if (name == "evaluate" || name == "explain") {
      flags.value(sub, "--model", "/model", Kind::kString, "model JSON file")->check(CLI::ExistingFile);
    }
    if (name == "evaluate") {
      flags.value(sub, "--init-scores", "/init_scores", Kind::kString, "init scores added to the raw scores");
      flags.value(sub, "--rows", "/rows", Kind::kString, "test | train | all");
    }
    if (name == "explain") flags.value(sub, "--row", "/row", Kind::kUint, "dataset row for a local explanation");
    if (name == "validate") {
      flags.value(sub, "--noise-scale", "/validate/noise_scale", Kind::kReal, "noise in training stddevs");
      flags.value(sub, "--draws", "/validate/draws", Kind::kUint, "perturbation draws");
      flags.value(sub, "--perturb-feature", "/validate/feature", Kind::kString, "perturb only this feature");
    }
    if (name == "validate" || name == "benchmark") {
      flags.value(sub, "--configs", "/benchmark/configs", Kind::kList,
                  "baseline,perf-hpo,fair-hpo,init-only,init+hpo");
    }
    if (name == "benchmark") flags.flag(sub, "--dry-run", "/benchmark/dry_run", true, "print the plan only");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  json config = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      config = json::parse(ss.str());
    } catch (const json::exception& e) {
      std::cerr << "error: " << config_path << ": " << e.what() << "\n";
      return kExitUsage;
    }
    if (!config.is_object()) {
      std::cerr << "error: " << config_path << ": expected a JSON object\n";
      return kExitUsage;
    }
  }
  config.merge_patch(flags.patch());
  if (quiet) config["quiet"] = true;
  const bool silent = config.value("quiet", false);

  const std::string command = app.get_subcommands().front()->get_name();
  char* result = nullptr;
  const gb_status status = gb_run_command(command.c_str(), config.dump().c_str(),
                                          silent ? nullptr : log_line, nullptr, &result);
  if (status != GB_OK) {
    std::cerr << "error (" << gb_status_name(status) << "): " << gb_last_error() << "\n";
    return exit_code(status);
  }
  const json summary = json::parse(result);
  gb_string_free(result);
  if (!silent) print_summary(summary);
  return kExitOk;
}
