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

#include "glassboost/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "glassboost/error.hpp"

namespace glassboost {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

void strip_wall_clock(json& j) {
  auto& meta = j["training_meta"];
  meta.erase("fit_started");
  meta.erase("fit_finished");
  meta.erase("fit_time_seconds");
}

}  // namespace

json hyperparams_to_json(const EbmHyperparams& hp) {
  return json{{"learning_rate", hp.learning_rate},
              {"max_bins", hp.max_bins},
              {"max_leaves", hp.max_leaves},
              {"max_rounds", hp.max_rounds},
              {"interactions", hp.interactions},
              {"outer_bags", hp.outer_bags},
              {"inner_bags", hp.inner_bags},
              {"greedy_ratio", hp.greedy_ratio},
              {"random_state", hp.random_state},
              {"max_interaction_bins", hp.max_interaction_bins},
              {"early_stopping_rounds", hp.early_stopping_rounds},
              {"validation_size", hp.validation_size},
              {"early_stopping_tolerance", hp.early_stopping_tolerance},
              {"min_samples_leaf", hp.min_samples_leaf}};
}

EbmHyperparams hyperparams_from_json(const json& j, EbmHyperparams hp) {
  require(j.is_object(), ErrorCode::kConfig, "hyperparameters must be a JSON object");
  static const char* const kKnown[] = {
      "learning_rate", "max_bins", "max_leaves", "max_rounds", "interactions",
      "outer_bags", "inner_bags", "greedy_ratio", "random_state", "max_interaction_bins",
      "early_stopping_rounds", "validation_size", "early_stopping_tolerance", "min_samples_leaf"};
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    require(known, ErrorCode::kConfig, "unknown hyperparameter '" + key + "'");
  }
  try {
    hp.learning_rate = get_or(j, "learning_rate", hp.learning_rate);
    hp.max_bins = get_or(j, "max_bins", hp.max_bins);
    hp.max_leaves = get_or(j, "max_leaves", hp.max_leaves);
    hp.max_rounds = get_or(j, "max_rounds", hp.max_rounds);
    hp.interactions = get_or(j, "interactions", hp.interactions);
    hp.outer_bags = get_or(j, "outer_bags", hp.outer_bags);
    hp.inner_bags = get_or(j, "inner_bags", hp.inner_bags);
    hp.greedy_ratio = get_or(j, "greedy_ratio", hp.greedy_ratio);
    hp.random_state = get_or(j, "random_state", hp.random_state);
    hp.max_interaction_bins = get_or(j, "max_interaction_bins", hp.max_interaction_bins);
    hp.early_stopping_rounds = get_or(j, "early_stopping_rounds", hp.early_stopping_rounds);
    hp.validation_size = get_or(j, "validation_size", hp.validation_size);
    hp.early_stopping_tolerance =
        get_or(j, "early_stopping_tolerance", hp.early_stopping_tolerance);
    hp.min_samples_leaf = get_or(j, "min_samples_leaf", hp.min_samples_leaf);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("bad hyperparameter value: ") + e.what());
  }
  return hp;
}

json bin_to_json(const BinDefinition& bin) {
  json j{{"feature", bin.feature},
         {"name", bin.name},
         {"kind", column_kind_name(bin.kind)},
         {"has_missing_bin", bin.has_missing_bin}};
  if (bin.kind == ColumnKind::kNumeric) {
    j["cut_points"] = bin.cut_points;
  } else {
    j["categories"] = bin.categories;
    j["category_bins"] = bin.category_bins;
    j["has_overflow_bin"] = bin.has_overflow_bin;
  }
  return j;
}

BinDefinition bin_from_json(const json& j) {
  BinDefinition bin;
  bin.feature = j.at("feature").get<std::size_t>();
  bin.name = j.at("name").get<std::string>();
  bin.kind = parse_column_kind(j.at("kind").get<std::string>());
  bin.has_missing_bin = get_or(j, "has_missing_bin", true);
  if (bin.kind == ColumnKind::kNumeric) {
    bin.cut_points = j.at("cut_points").get<std::vector<double>>();
    for (std::size_t i = 1; i < bin.cut_points.size(); ++i) {
      require(bin.cut_points[i - 1] < bin.cut_points[i], ErrorCode::kData,
              "cut points of '" + bin.name + "' are not strictly ascending");
    }
  } else {
    bin.categories = j.at("categories").get<std::vector<std::string>>();
    bin.category_bins = j.at("category_bins").get<std::vector<std::size_t>>();
    bin.has_overflow_bin = get_or(j, "has_overflow_bin", false);
    require(bin.categories.size() == bin.category_bins.size(), ErrorCode::kData,
            "category map of '" + bin.name + "' is inconsistent");
  }
  return bin;
}

json model_to_json(const EbmModel& model) {
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["feature_names"] = model.feature_names;
  j["intercept"] = model.intercept;
  j["bins"] = json::array();
  for (const auto& b : model.bins) j["bins"].push_back(bin_to_json(b));
  j["pair_bins"] = json::array();
  for (const auto& b : model.pair_bins) j["pair_bins"].push_back(bin_to_json(b));
  j["terms"] = json::array();
  for (const auto& t : model.terms) {
    j["terms"].push_back({{"features", t.features}, {"shape", t.shape}, {"scores", t.scores}});
  }
  j["hyperparams"] = hyperparams_to_json(model.hyperparams);
  const auto& m = model.training_meta;
  j["training_meta"] = {{"seed", m.seed},
                        {"n_train_rows", m.n_train_rows},
                        {"term_density", m.term_density},
                        {"feature_stddev", m.feature_stddev},
                        {"fit_started", m.fit_started},
                        {"fit_finished", m.fit_finished},
                        {"fit_time_seconds", m.fit_time_seconds}};
  return j;
}

EbmModel model_from_json(const json& j) {
  try {
    require(j.at("schema_version").get<int>() == kModelSchemaVersion, ErrorCode::kData,
            "unsupported model schema version");
    EbmModel model;
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.intercept = j.at("intercept").get<double>();
    for (const auto& b : j.at("bins")) model.bins.push_back(bin_from_json(b));
    if (j.contains("pair_bins")) {
      for (const auto& b : j.at("pair_bins")) model.pair_bins.push_back(bin_from_json(b));
    }
    require(model.bins.size() == model.feature_names.size(), ErrorCode::kData,
            "model needs one bin definition per feature");
    for (const auto& tj : j.at("terms")) {
      TermModel t;
      t.features = tj.at("features").get<std::vector<std::size_t>>();
      t.shape = tj.at("shape").get<std::vector<std::size_t>>();
      t.scores = tj.at("scores").get<std::vector<double>>();
      require(!t.features.empty() && t.features.size() <= 2 && t.shape.size() == t.features.size(),
              ErrorCode::kData, "malformed term");
      std::size_t cells = 1;
      for (auto d : t.shape) cells *= d;
      require(cells == t.scores.size(), ErrorCode::kData, "term table size does not match shape");
      for (auto f : t.features) {
        require(f < model.feature_names.size(), ErrorCode::kData, "term feature out of range");
      }
      for (double s : t.scores) require(std::isfinite(s), ErrorCode::kData, "non-finite score");
      model.terms.push_back(std::move(t));
    }
    model.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    const auto& mj = j.at("training_meta");
    auto& m = model.training_meta;
    m.seed = mj.at("seed").get<std::uint64_t>();
    m.n_train_rows = get_or<std::size_t>(mj, "n_train_rows", 0);
    m.term_density = get_or(mj, "term_density", std::vector<std::vector<double>>{});
    m.feature_stddev = get_or(mj, "feature_stddev", std::vector<double>{});
    m.fit_started = get_or<std::string>(mj, "fit_started", "");
    m.fit_finished = get_or<std::string>(mj, "fit_finished", "");
    m.fit_time_seconds = get_or(mj, "fit_time_seconds", 0.0);
    return model;
  } catch (const json::exception& e) {
    fail(ErrorCode::kData, std::string("malformed model JSON: ") + e.what());
  }
}

std::string model_payload(const EbmModel& model) {
  json j = model_to_json(model);
  strip_wall_clock(j);
  return j.dump();
}

void save_model(const EbmModel& model, const std::filesystem::path& path) {
  write_text_file(path, model_to_json(model).dump(1) + "\n");
}

EbmModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_json_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  // Write-then-rename so readers never see a partial file.
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::kIo, "cannot write '" + path.string() + "'");
    out << text;
    out.flush();
    require(out.good(), ErrorCode::kIo, "write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorCode::kIo, "cannot replace '" + path.string() + "': " + ec.message());
}

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kData, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace glassboost
