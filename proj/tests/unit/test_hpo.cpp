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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "glassboost/error.hpp"
#include "glassboost/hpo.hpp"
#include "support.hpp"

using namespace glassboost;
using nlohmann::json;

namespace {

Study unit_study(std::uint64_t seed, SamplerKind sampler = SamplerKind::kTpe) {
  Study s;
  s.space.params = {ParamSpec{"x", ParamKind::kUniform, 0.0, 1.0}};
  s.sampler_seed = seed;
  s.sampler = sampler;
  return s;
}

double best_of(const Study& s) { return s.best_trial().objective; }

}  // namespace

TEST_SUITE("hpo") {

TEST_CASE("default spaces") {
  const SearchSpace perf = default_space(false);
  const SearchSpace fair = default_space(true);
  CHECK(perf.params.size() == 8);
  CHECK(fair.params.size() == 9);
  const auto& lr = perf.params[perf.index_of("learning_rate")];
  CHECK(lr.kind == ParamKind::kLogUniform);
  CHECK(lr.low == 1e-4);
  CHECK(lr.high == 1e-1);
  const auto& lambda = fair.params[fair.index_of("lambda")];
  CHECK(lambda.low == 0.0);
  CHECK(lambda.high == 5.0);
  CHECK(perf.params[perf.index_of("max_rounds")].high == 2000.0);
  CHECK(perf.params[perf.index_of("greedy_ratio")].high == 20.0);
  for (const auto& p : fair.params) CHECK(p.low < p.high);
  CHECK_THROWS_AS(perf.index_of("lambda"), Error);
  SearchSpace empty;
  CHECK_THROWS_AS(empty.validate(), Error);
}

TEST_CASE("objectives") {
  CHECK(objective_performance(1.0) == 0.0);
  CHECK(objective_performance(0.5) == 0.5);
  CHECK(objective_performance(0.929) == doctest::Approx(0.071));
  CHECK(objective_fairness(0.9, 0.2, 2.0) == doctest::Approx(0.5));
  CHECK(objective_fairness(0.8, 0.0, 3.0) == objective_performance(0.8));
  // With lambda = 0 both objectives order any (roc, dp) history identically.
  CounterRng rng(3);
  std::vector<std::pair<double, double>> hist(40);
  for (auto& h : hist) h = {0.5 + 0.5 * rng.uniform(), rng.uniform()};
  for (std::size_t i = 0; i < hist.size(); ++i) {
    for (std::size_t j = 0; j < hist.size(); ++j) {
      const bool a = objective_fairness(hist[i].first, hist[i].second, 0.0) <
                     objective_fairness(hist[j].first, hist[j].second, 0.0);
      const bool b = objective_performance(hist[i].first) < objective_performance(hist[j].first);
      CHECK(a == b);
    }
  }
}

TEST_CASE("suggestions respect bounds and kinds and are reproducible") {
  Study s;
  s.space = default_space(true);
  s.sampler_seed = 17;
  const auto fn = [](const std::vector<double>& v, json&) { return std::fmod(v[0] * 1000.0 + v[1], 1.0); };
  optimize(s, 30, fn);
  for (const auto& t : s.trials) {
    for (std::size_t p = 0; p < s.space.params.size(); ++p) {
      const auto& spec = s.space.params[p];
      CHECK(t.values[p] >= spec.low);
      CHECK(t.values[p] <= spec.high);
      if (spec.kind == ParamKind::kInteger) CHECK(t.values[p] == std::round(t.values[p]));
      if (spec.kind == ParamKind::kLogUniform) CHECK(t.values[p] > 0.0);
    }
  }
  CHECK(tpe_suggest(s, 30) == tpe_suggest(s, 30));
  Study again;
  again.space = s.space;
  again.sampler_seed = 17;
  optimize(again, 30, fn);
  CHECK(study_payload(again) == study_payload(s));
  const auto first = random_suggest(s, 0);
  Study other = s;
  other.sampler_seed = 18;
  CHECK(random_suggest(other, 0) != first);
}

TEST_CASE("TPE favours the good region of a linear history") {
  int near_good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Study s = unit_study(seed);
    for (std::size_t i = 0; i < 12; ++i) {
      TrialRecord t;
      t.index = i;
      t.values = {static_cast<double>(i) / 11.0};
      t.objective = 1.0 - t.values[0];
      s.trials.push_back(t);
    }
    // Independent quantile split of the history.
    std::vector<std::size_t> order(12);
    for (std::size_t i = 0; i < 12; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return s.trials[a].objective < s.trials[b].objective; });
    const auto n_good = static_cast<std::size_t>(std::ceil(std::min(0.25, 25.0 / std::sqrt(12.0)) * 12));
    bool has_one = false;
    double bad_mean = 0.0;
    for (std::size_t r = 0; r < 12; ++r) {
      const double x = s.trials[order[r]].values[0];
      if (r < n_good) {
        has_one = has_one || x == 1.0;
      } else {
        bad_mean += x / static_cast<double>(12 - n_good);
      }
    }
    CHECK(has_one);
    const double x = tpe_suggest(s, 12)[0];
    near_good += std::abs(x - 1.0) < std::abs(x - bad_mean) ? 1 : 0;
  }
  CHECK(near_good >= 80);
}

TEST_CASE("best so far never increases and ties keep the earliest trial") {
  Study s = unit_study(5);
  optimize(s, 40, [](const std::vector<double>& v, json&) { return std::round(10.0 * std::abs(v[0] - 0.6)); });
  double best = INFINITY;
  std::size_t best_index = 0;
  for (const auto& t : s.trials) {
    if (t.objective < best) {
      best = t.objective;
      best_index = t.index;
    }
  }
  CHECK(s.best_trial().index == best_index);
  CHECK(s.best_trial().objective == best);
}

TEST_CASE("resuming a persisted study matches an uninterrupted run") {
  const auto dir = gbtest::scratch_dir("hpo_resume");
  const auto fn = [](const std::vector<double>& v, json& attrs) {
    attrs["echo"] = v[0];
    return (v[0] - 0.3) * (v[0] - 0.3);
  };
  Study full = unit_study(8);
  optimize(full, 25, fn);

  Study part = unit_study(8);
  optimize(part, 12, fn, [&](const Study& s) { save_study(s, dir / "study.json"); });
  Study resumed = load_study(dir / "study.json");
  CHECK(resumed.trials.size() == 12);
  optimize(resumed, 25, fn);
  CHECK(study_payload(resumed) == study_payload(full));
}

TEST_CASE("TPE beats random search on a quadratic") {
  std::vector<double> tpe_best;
  std::vector<double> rnd_best;
  const auto f = [](const std::vector<double>& v, json&) { return (v[0] - 0.3) * (v[0] - 0.3); };
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    Study a = unit_study(seed);
    optimize(a, 30, f);
    tpe_best.push_back(best_of(a));
    Study b = unit_study(seed, SamplerKind::kRandom);
    optimize(b, 30, f);
    rnd_best.push_back(best_of(b));
  }
  std::sort(tpe_best.begin(), tpe_best.end());
  std::sort(rnd_best.begin(), rnd_best.end());
  CHECK(tpe_best[10] + tpe_best[9] < rnd_best[10] + rnd_best[9]);
}

TEST_CASE("study json round trip and malformed files") {
  Study s;
  s.space = default_space(true);
  s.sampler_seed = 4;
  s.objective_kind = ObjectiveKind::kFairness;
  optimize(s, 3, [](const std::vector<double>& v, json& a) {
    a["fit_time"] = 0.5;
    return v[0];
  });
  const Study back = study_from_json(json::parse(study_to_json(s).dump()));
  CHECK(back.space == s.space);
  CHECK(back.objective_kind == ObjectiveKind::kFairness);
  CHECK(study_payload(back) == study_payload(s));
  CHECK(study_payload(s).find("fit_time") == std::string::npos);
  json bad = study_to_json(s);
  bad["trials"][1]["index"] = 5;
  CHECK_THROWS_AS(study_from_json(bad), Error);
  CHECK_THROWS_AS(parse_objective_kind("speed"), Error);
}

TEST_CASE("apply_params maps values onto hyperparameters") {
  const SearchSpace space = default_space(true);
  std::vector<double> v(space.params.size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = space.params[p].low;
  v[space.index_of("max_leaves")] = 7;
  v[space.index_of("learning_rate")] = 0.05;
  EbmHyperparams base;
  base.random_state = 42;
  const EbmHyperparams hp = apply_params(base, space, v);
  CHECK(hp.max_leaves == 7);
  CHECK(hp.learning_rate == 0.05);
  CHECK(hp.random_state == 42);
  CHECK(params_to_json(space, v)["max_leaves"] == 7);
  CHECK_THROWS_AS(apply_params(base, space, {1.0}), Error);
}

TEST_CASE("run_study on a small frame") {
  const TabularFrame f = gbtest::mixed_frame(300, 30);
  const auto dir = gbtest::scratch_dir("hpo_run");
  EbmStudyOptions o;
  o.n_trials = 1;
  o.base.max_rounds = 40;
  o.persist_path = dir / "study.json";
  const Study one = run_study(f, o);
  CHECK(one.trials.size() == 1);
  CHECK(one.best_trial().index == 0);
  CHECK(one.trials[0].user_attrs.contains("roc"));
  CHECK(one.trials[0].user_attrs.contains("hyperparams"));
  CHECK(std::filesystem::exists(o.persist_path));

  o.objective = ObjectiveKind::kFairness;
  o.n_trials = 2;
  o.persist_path = dir / "fair.json";
  const Study fair = run_study(f, o);
  CHECK(fair.trials[1].user_attrs.contains("dp"));
  CHECK(fair.trials[1].user_attrs.contains("lambda"));
  const auto& t = fair.trials[1];
  CHECK(t.objective == doctest::Approx(objective_fairness(t.user_attrs["roc"], t.user_attrs["dp"],
                                                          t.user_attrs["lambda"])));

  o.resume = true;
  o.n_trials = 3;
  const Study more = run_study(f, o);
  CHECK(more.trials.size() == 3);
  CHECK(more.trials[1].values == fair.trials[1].values);

  const TabularFrame plain = gbtest::numeric_frame({{1, 2, 3, 4, 5, 6}}, {0, 1, 0, 1, 0, 1});
  CHECK_THROWS_AS(run_study(plain, o), Error);
}

}  // TEST_SUITE
