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

#ifndef GLASSBOOST_HPO_HPP_
#define GLASSBOOST_HPO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "glassboost/ebm.hpp"
#include "json.hpp"

namespace glassboost {

enum class ParamKind { kUniform, kLogUniform, kInteger };

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::kUniform;
  double low = 0.0;
  double high = 1.0;
  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

struct SearchSpace {
  std::vector<ParamSpec> params;

  void validate() const;
  std::size_t index_of(const std::string& name) const;  // throws on unknown names
  friend bool operator==(const SearchSpace&, const SearchSpace&) = default;
};

// The EBM space; the fairness space appends lambda in [0, 5].
SearchSpace default_space(bool fairness = false);

enum class ObjectiveKind { kPerformance, kFairness };
const char* objective_kind_name(ObjectiveKind kind);
ObjectiveKind parse_objective_kind(std::string_view name);

enum class SamplerKind { kTpe, kRandom };

struct TpeConfig {
  std::size_t n_startup = 10;
  std::size_t n_candidates = 24;
  double gamma_cap = 0.25;    // good fraction = min(gamma_cap, gamma_scale / sqrt(n))
  double gamma_scale = 25.0;
  double prior_weight = 1.0;  // weight of the wide prior kernel relative to one observation
  friend bool operator==(const TpeConfig&, const TpeConfig&) = default;
};

struct TrialRecord {
  std::size_t index = 0;
  std::vector<double> values;  // in SearchSpace order
  double objective = 0.0;
  nlohmann::json user_attrs = nlohmann::json::object();
};

struct Study {
  SearchSpace space;
  std::uint64_t sampler_seed = 0;
  ObjectiveKind objective_kind = ObjectiveKind::kPerformance;
  SamplerKind sampler = SamplerKind::kTpe;
  TpeConfig tpe;
  std::vector<TrialRecord> trials;

  // Lowest objective; the earliest trial wins ties. Throws when empty.
  const TrialRecord& best_trial() const;
};

// Parameter values for trial `trial_index` given the trials already in the
// study. Each parameter draws from its own stream (seed, trial, parameter),
// so a resumed study repeats an uninterrupted one exactly.
std::vector<double> tpe_suggest(const Study& study, std::size_t trial_index);
std::vector<double> random_suggest(const Study& study, std::size_t trial_index);
std::vector<double> suggest(const Study& study, std::size_t trial_index);

double objective_performance(double roc);
double objective_fairness(double roc, double dp, double lambda);

// Minimizes fn over the space for n_trials (resuming whatever trials the
// study already holds).
using TrialFunction = std::function<double(const std::vector<double>& values, nlohmann::json& attrs)>;
void optimize(Study& study, std::size_t n_trials, const TrialFunction& fn,
              const std::function<void(const Study&)>& after_trial = {});

nlohmann::json study_to_json(const Study& study);
Study study_from_json(const nlohmann::json& j);
// study_to_json without wall-clock attributes (fit_time).
std::string study_payload(const Study& study);
void save_study(const Study& study, const std::filesystem::path& path);
Study load_study(const std::filesystem::path& path);

// Hyperparameters of `base` with the searched EBM parameters replaced.
EbmHyperparams apply_params(const EbmHyperparams& base, const SearchSpace& space,
                            const std::vector<double>& values);
nlohmann::json params_to_json(const SearchSpace& space, const std::vector<double>& values);

struct EbmStudyOptions {
  ObjectiveKind objective = ObjectiveKind::kPerformance;
  std::size_t n_trials = 50;
  std::uint64_t seed = 1337;
  EbmHyperparams base;
  double validation_fraction = 0.2;
  std::size_t n_threads = 1;
  // Persisted after every trial when set.
  std::filesystem::path persist_path;
  // Continue the study already stored at persist_path instead of starting over.
  bool resume = false;
  std::function<void(const TrialRecord&)> on_trial;
};

// Fits one EBM per trial on a fixed stratified split of `train` and scores it
// on the held-out part (ROC, plus DP of the sensitive attribute when present).
Study run_study(const TabularFrame& train, const EbmStudyOptions& options);

}  // namespace glassboost

#endif  // GLASSBOOST_HPO_HPP_
