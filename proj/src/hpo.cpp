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

#include "glassboost/hpo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "glassboost/error.hpp"
#include "glassboost/metrics.hpp"
#include "glassboost/model_io.hpp"
#include "glassboost/random.hpp"

namespace glassboost {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTpeStream = 0x79e;
constexpr std::uint64_t kRandomStream = 0x7a4d;
constexpr std::uint64_t kValidationStream = 0x5a11d;

// Parameters are searched in an internal coordinate: log for log-uniform,
// and a +-0.5 widened interval (rounded back) for integers.
double internal_low(const ParamSpec& p) {
  switch (p.kind) {
    case ParamKind::kLogUniform: return std::log(p.low);
    case ParamKind::kInteger: return p.low - 0.5;
    default: return p.low;
  }
}

double internal_high(const ParamSpec& p) {
  switch (p.kind) {
    case ParamKind::kLogUniform: return std::log(p.high);
    case ParamKind::kInteger: return p.high + 0.5;
    default: return p.high;
  }
}

double to_internal(const ParamSpec& p, double v) {
  return p.kind == ParamKind::kLogUniform ? std::log(v) : v;
}

double from_internal(const ParamSpec& p, double z) {
  switch (p.kind) {
    case ParamKind::kLogUniform: return std::clamp(std::exp(z), p.low, p.high);
    case ParamKind::kInteger: return std::clamp(std::round(z), p.low, p.high);
    default: return std::clamp(z, p.low, p.high);
  }
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Mixture of Gaussians truncated to [lo, hi]: one kernel per observation and
// a wide prior kernel centred on the interval.
class Parzen {
 public:
  Parzen(const std::vector<double>& points, double lo, double hi, double prior_weight)
      : lo_(lo), hi_(hi) {
    const double range = hi - lo;
    const double n = static_cast<double>(points.size());
    double bw = range;
    if (!points.empty()) {
      const double mean = std::accumulate(points.begin(), points.end(), 0.0) / n;
      double var = 0.0;
      for (double x : points) var += (x - mean) * (x - mean);
      const double sd = std::sqrt(var / n);
      const double scott = 1.06 * sd * std::pow(n, -0.2);
      const double floor = range / std::min(100.0, n + 1.0);
      bw = std::clamp(scott, floor, range);
    }
    for (double x : points) add(x, bw, 1.0);
    add(0.5 * (lo + hi), range, prior_weight);
    const double total = std::accumulate(weight_.begin(), weight_.end(), 0.0);
    for (auto& w : weight_) w /= total;
  }

  double log_pdf(double x) const {
    double best = -INFINITY;
    std::vector<double> terms(mu_.size());
    for (std::size_t i = 0; i < mu_.size(); ++i) {
      const double z = (x - mu_[i]) / sigma_[i];
      terms[i] = std::log(weight_[i]) - 0.5 * z * z - std::log(sigma_[i] * mass_[i]);
      best = std::max(best, terms[i]);
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - best);
    return best + std::log(s);
  }

  double sample(CounterRng& rng) const {
    const double u = rng.uniform();
    std::size_t k = 0;
    double acc = weight_[0];
    while (k + 1 < weight_.size() && u >= acc) acc += weight_[++k];
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double x = mu_[k] + sigma_[k] * rng.normal();
      if (x >= lo_ && x <= hi_) return x;
    }
    return std::clamp(mu_[k], lo_, hi_);
  }

 private:
  void add(double mu, double sigma, double w) {
    mu_.push_back(mu);
    sigma_.push_back(sigma);
    weight_.push_back(w);
    mass_.push_back(
        std::max(normal_cdf((hi_ - mu) / sigma) - normal_cdf((lo_ - mu) / sigma), 1e-300));
  }

  double lo_;
  double hi_;
  std::vector<double> mu_;
  std::vector<double> sigma_;
  std::vector<double> weight_;
  std::vector<double> mass_;
};

const char* param_kind_name(ParamKind k) {
  switch (k) {
    case ParamKind::kLogUniform: return "log_uniform";
    case ParamKind::kInteger: return "integer";
    default: return "uniform";
  }
}

ParamKind parse_param_kind(const std::string& s) {
  if (s == "uniform") return ParamKind::kUniform;
  if (s == "log_uniform") return ParamKind::kLogUniform;
  if (s == "integer") return ParamKind::kInteger;
  fail(ErrorCode::kData, "unknown parameter kind '" + s + "'");
}

json strip_fit_time(json j) {
  for (auto& t : j["trials"]) t["user_attrs"].erase("fit_time");
  return j;
}

}  // namespace

void SearchSpace::validate() const {
  require(!params.empty(), ErrorCode::kInvalidArgument, "search space is empty");
  for (const auto& p : params) {
    require(p.low < p.high, ErrorCode::kInvalidArgument, "parameter '" + p.name + "' needs low < high");
    require(p.kind != ParamKind::kLogUniform || p.low > 0.0, ErrorCode::kInvalidArgument,
            "log-uniform parameter '" + p.name + "' needs low > 0");
  }
}

std::size_t SearchSpace::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name == name) return i;
  }
  fail(ErrorCode::kInvalidArgument, "unknown parameter '" + name + "'");
}

SearchSpace default_space(bool fairness) {
  SearchSpace s;
  s.params = {
      {"learning_rate", ParamKind::kLogUniform, 1e-4, 1e-1},
      {"max_bins", ParamKind::kInteger, 64, 512},
      {"max_leaves", ParamKind::kInteger, 2, 64},
      {"max_rounds", ParamKind::kInteger, 50, 2000},
      {"interactions", ParamKind::kInteger, 0, 10},
      {"outer_bags", ParamKind::kInteger, 4, 32},
      {"inner_bags", ParamKind::kInteger, 0, 8},
      {"greedy_ratio", ParamKind::kUniform, 0, 20},
  };
  if (fairness) s.params.push_back({"lambda", ParamKind::kUniform, 0, 5});
  return s;
}

const char* objective_kind_name(ObjectiveKind kind) {
  return kind == ObjectiveKind::kFairness ? "fairness" : "performance";
}

ObjectiveKind parse_objective_kind(std::string_view name) {
  if (name == "performance") return ObjectiveKind::kPerformance;
  if (name == "fairness") return ObjectiveKind::kFairness;
  fail(ErrorCode::kConfig, "unknown objective '" + std::string(name) + "'");
}

const TrialRecord& Study::best_trial() const {
  require(!trials.empty(), ErrorCode::kInvalidArgument, "study has no trials");
  const TrialRecord* best = &trials.front();
  for (const auto& t : trials) {
    if (t.objective < best->objective) best = &t;
  }
  return *best;
}

std::vector<double> random_suggest(const Study& study, std::size_t trial_index) {
  study.space.validate();
  std::vector<double> out;
  for (std::size_t p = 0; p < study.space.params.size(); ++p) {
    const auto& spec = study.space.params[p];
    CounterRng rng = CounterRng::stream(study.sampler_seed, {kRandomStream, trial_index, p});
    const double lo = internal_low(spec);
    const double hi = internal_high(spec);
    out.push_back(from_internal(spec, lo + (hi - lo) * rng.uniform()));
  }
  return out;
}

std::vector<double> tpe_suggest(const Study& study, std::size_t trial_index) {
  study.space.validate();
  const std::size_t n = std::min(trial_index, study.trials.size());
  if (n < std::max<std::size_t>(study.tpe.n_startup, 1)) return random_suggest(study, trial_index);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return study.trials[a].objective < study.trials[b].objective;
  });
  const double nd = static_cast<double>(n);
  const double gamma = std::min(study.tpe.gamma_cap, study.tpe.gamma_scale / std::sqrt(nd));
  const auto n_good = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(gamma * nd)), 1, n);

  std::vector<double> out;
  for (std::size_t p = 0; p < study.space.params.size(); ++p) {
    const auto& spec = study.space.params[p];
    const double lo = internal_low(spec);
    const double hi = internal_high(spec);
    std::vector<double> good;
    std::vector<double> bad;
    for (std::size_t r = 0; r < n; ++r) {
      const double z = to_internal(spec, study.trials[order[r]].values[p]);
      (r < n_good ? good : bad).push_back(z);
    }
    const Parzen l(good, lo, hi, study.tpe.prior_weight);
    const Parzen g(bad, lo, hi, study.tpe.prior_weight);
    CounterRng rng = CounterRng::stream(study.sampler_seed, {kTpeStream, trial_index, p});
    double best_value = 0.0;
    double best_score = -INFINITY;
    for (std::size_t c = 0; c < study.tpe.n_candidates; ++c) {
      const double v = from_internal(spec, l.sample(rng));
      const double z = to_internal(spec, v);
      const double score = l.log_pdf(z) - g.log_pdf(z);
      if (c == 0 || score > best_score) {
        best_score = score;
        best_value = v;
      }
    }
    out.push_back(best_value);
  }
  return out;
}

std::vector<double> suggest(const Study& study, std::size_t trial_index) {
  return study.sampler == SamplerKind::kTpe ? tpe_suggest(study, trial_index)
                                            : random_suggest(study, trial_index);
}

double objective_performance(double roc) { return 1.0 - roc; }

double objective_fairness(double roc, double dp, double lambda) {
  return (1.0 - roc) + lambda * dp;
}

void optimize(Study& study, std::size_t n_trials, const TrialFunction& fn,
              const std::function<void(const Study&)>& after_trial) {
  study.space.validate();
  for (std::size_t i = study.trials.size(); i < n_trials; ++i) {
    TrialRecord t;
    t.index = i;
    t.values = suggest(study, i);
    t.objective = fn(t.values, t.user_attrs);
    require(std::isfinite(t.objective), ErrorCode::kNumeric,
            "trial " + std::to_string(i) + " produced a non-finite objective");
    study.trials.push_back(std::move(t));
    if (after_trial) after_trial(study);
  }
}

json params_to_json(const SearchSpace& space, const std::vector<double>& values) {
  json j = json::object();
  for (std::size_t p = 0; p < space.params.size(); ++p) {
    if (space.params[p].kind == ParamKind::kInteger) {
      j[space.params[p].name] = static_cast<long long>(values[p]);
    } else {
      j[space.params[p].name] = values[p];
    }
  }
  return j;
}

json study_to_json(const Study& study) {
  json space = json::array();
  for (const auto& p : study.space.params) {
    space.push_back({{"name", p.name}, {"kind", param_kind_name(p.kind)}, {"low", p.low}, {"high", p.high}});
  }
  json trials = json::array();
  for (const auto& t : study.trials) {
    trials.push_back({{"index", t.index},
                      {"params", params_to_json(study.space, t.values)},
                      {"objective", t.objective},
                      {"user_attrs", t.user_attrs}});
  }
  json j{{"space", space},
         {"seed", study.sampler_seed},
         {"objective_kind", objective_kind_name(study.objective_kind)},
         {"direction", "minimize"},
         {"sampler", study.sampler == SamplerKind::kTpe ? "tpe" : "random"},
         {"tpe",
          {{"n_startup", study.tpe.n_startup},
           {"n_candidates", study.tpe.n_candidates},
           {"gamma_cap", study.tpe.gamma_cap},
           {"gamma_scale", study.tpe.gamma_scale},
           {"prior_weight", study.tpe.prior_weight}}},
         {"trials", trials}};
  if (!study.trials.empty()) j["best_trial"] = study.best_trial().index;
  return j;
}

Study study_from_json(const json& j) {
  try {
    Study s;
    for (const auto& p : j.at("space")) {
      s.space.params.push_back({p.at("name").get<std::string>(),
                                parse_param_kind(p.at("kind").get<std::string>()),
                                p.at("low").get<double>(), p.at("high").get<double>()});
    }
    s.space.validate();
    s.sampler_seed = j.at("seed").get<std::uint64_t>();
    s.objective_kind = parse_objective_kind(j.at("objective_kind").get<std::string>());
    s.sampler = j.value("sampler", std::string("tpe")) == "random" ? SamplerKind::kRandom
                                                                   : SamplerKind::kTpe;
    if (j.contains("tpe")) {
      const auto& t = j.at("tpe");
      s.tpe.n_startup = t.at("n_startup").get<std::size_t>();
      s.tpe.n_candidates = t.at("n_candidates").get<std::size_t>();
      s.tpe.gamma_cap = t.at("gamma_cap").get<double>();
      s.tpe.gamma_scale = t.at("gamma_scale").get<double>();
      s.tpe.prior_weight = t.at("prior_weight").get<double>();
    }
    for (const auto& tj : j.at("trials")) {
      TrialRecord t;
      t.index = tj.at("index").get<std::size_t>();
      require(t.index == s.trials.size(), ErrorCode::kData, "trial indices must be contiguous");
      for (const auto& p : s.space.params) t.values.push_back(tj.at("params").at(p.name).get<double>());
      t.objective = tj.at("objective").get<double>();
      t.user_attrs = tj.value("user_attrs", json::object());
      s.trials.push_back(std::move(t));
    }
    return s;
  } catch (const json::exception& e) {
    fail(ErrorCode::kData, std::string("malformed study JSON: ") + e.what());
  }
}

std::string study_payload(const Study& study) { return strip_fit_time(study_to_json(study)).dump(); }

void save_study(const Study& study, const std::filesystem::path& path) {
  write_text_file(path, study_to_json(study).dump(1) + "\n");
}

Study load_study(const std::filesystem::path& path) { return study_from_json(read_json_file(path)); }

EbmHyperparams apply_params(const EbmHyperparams& base, const SearchSpace& space,
                            const std::vector<double>& values) {
  require(values.size() == space.params.size(), ErrorCode::kInvalidArgument,
          "parameter vector does not match the space");
  EbmHyperparams hp = base;
  for (std::size_t p = 0; p < values.size(); ++p) {
    const auto& name = space.params[p].name;
    const double v = values[p];
    const auto count = static_cast<std::size_t>(std::llround(v));
    if (name == "learning_rate") hp.learning_rate = v;
    else if (name == "max_bins") hp.max_bins = count;
    else if (name == "max_leaves") hp.max_leaves = count;
    else if (name == "max_rounds") hp.max_rounds = count;
    else if (name == "interactions") hp.interactions = count;
    else if (name == "outer_bags") hp.outer_bags = count;
    else if (name == "inner_bags") hp.inner_bags = count;
    else if (name == "greedy_ratio") hp.greedy_ratio = v;
  }
  return hp;
}

Study run_study(const TabularFrame& train, const EbmStudyOptions& options) {
  require(options.n_trials >= 1, ErrorCode::kInvalidArgument, "n_trials must be >= 1");
  const bool fairness = options.objective == ObjectiveKind::kFairness;
  require(!fairness || train.has_sensitive(), ErrorCode::kConfig,
          "fairness objective needs a sensitive attribute");

  Study study;
  study.space = default_space(fairness);
  study.sampler_seed = options.seed;
  study.objective_kind = options.objective;
  if (options.resume && !options.persist_path.empty() && std::filesystem::exists(options.persist_path)) {
    Study stored = load_study(options.persist_path);
    require(stored.space == study.space && stored.sampler_seed == study.sampler_seed &&
                stored.objective_kind == study.objective_kind,
            ErrorCode::kConfig,
            "stored study '" + options.persist_path.string() + "' does not match the request");
    study = std::move(stored);
  }

  const auto rows = iota_indices(train.rows());
  const Split split = stratified_holdout(train.target(), rows, options.validation_fraction,
                                         CounterRng::derive(options.seed, {kValidationStream}));
  const TabularFrame fit_part = train.subset(split.train);
  const TabularFrame val_part = train.subset(split.test);
  std::span<const int> groups;
  if (val_part.has_sensitive()) groups = val_part.sensitive().group_of_row;

  const TrialFunction fn = [&](const std::vector<double>& values, json& attrs) {
    const EbmHyperparams hp = apply_params(options.base, study.space, values);
    FitOptions fo;
    fo.n_threads = options.n_threads;
    const auto t0 = std::chrono::steady_clock::now();
    const EbmModel model = fit(fit_part, hp, fo);
    const double fit_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto p = predict_proba(model, val_part);
    const double roc = roc_auc(val_part.target(), p);
    attrs["roc"] = roc;
    double dp = 0.0;
    if (!groups.empty()) {
      dp = demographic_parity(threshold(p), groups);
      attrs["dp"] = dp;
    }
    attrs["hyperparams"] = hyperparams_to_json(hp);
    attrs["fit_time"] = fit_time;
    if (!fairness) return objective_performance(roc);
    const double lambda = values[study.space.index_of("lambda")];
    attrs["lambda"] = lambda;
    return objective_fairness(roc, dp, lambda);
  };
  optimize(study, options.n_trials, fn, [&](const Study& s) {
    if (!options.persist_path.empty()) save_study(s, options.persist_path);
    if (options.on_trial) options.on_trial(s.trials.back());
  });
  return study;
}

}  // namespace glassboost
