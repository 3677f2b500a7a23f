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

#include <cmath>
#include <thread>

#include "glassboost/ebm.hpp"
#include "glassboost/error.hpp"
#include "glassboost/explain.hpp"
#include "glassboost/metrics.hpp"
#include "glassboost/model_io.hpp"
#include "support.hpp"
#include "tree.hpp"

using namespace glassboost;

namespace {

// Single numeric feature with cut points {0, 1} and a hand-written table.
EbmModel handmade_model(double intercept, std::vector<double> scores) {
  EbmModel m;
  m.intercept = intercept;
  BinDefinition b;
  b.name = "x0";
  b.cut_points = {0.0, 1.0};
  m.bins = {b};
  m.pair_bins = {b};
  m.feature_names = {"x0"};
  m.terms.push_back(TermModel{{0}, {4}, std::move(scores)});
  m.training_meta.term_density = {{0, 1, 1, 1}};
  m.training_meta.feature_stddev = {1.0};
  return m;
}

EbmHyperparams quick(std::size_t rounds = 60) {
  EbmHyperparams hp;
  hp.max_rounds = rounds;
  hp.outer_bags = 2;
  hp.interactions = 2;
  hp.learning_rate = 0.05;
  return hp;
}

}  // namespace

TEST_SUITE("ebm") {

TEST_CASE("sigmoid and logit") {
  CHECK(sigmoid(0.0) == 0.5);
  // The clamp keeps saturated scores strictly inside (0, 1): 1 - sigmoid(30) is about 9.4e-14.
  CHECK(sigmoid(1e9) < 1.0);
  CHECK(1.0 - sigmoid(1e9) == doctest::Approx(std::exp(-30.0)).epsilon(1e-3));
  CHECK(sigmoid(1e9) == sigmoid(30.0));
  CHECK(sigmoid(-1e9) > 0.0);
  CHECK(logit(sigmoid(1.25)) == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("raw score is intercept plus table lookups") {
  const TabularFrame f = gbtest::numeric_frame({{-1.0, 0.5, 3.0, kMissing}}, {0, 1, 1, 0});
  const EbmModel zero = handmade_model(0.5, {0, 0, 0, 0});
  for (std::size_t r = 0; r < 4; ++r) CHECK(raw_score(zero, f, r) == 0.5);

  EbmModel two = handmade_model(-1.0, {0.0, 0.3, 0.0, 0.0});
  BinDefinition b1 = two.bins[0];
  b1.name = "x1";
  two.bins.push_back(b1);
  two.pair_bins.push_back(b1);
  two.feature_names.push_back("x1");
  two.terms.push_back(TermModel{{1}, {4}, {0.0, 0.0, -0.2, 0.0}});
  const TabularFrame g = gbtest::numeric_frame({{-1.0}, {0.5}}, {1});
  CHECK(raw_score(two, g, 0) == doctest::Approx(-0.9).epsilon(1e-15));
  const auto p = predict_proba(two, g);
  CHECK(p[0] == sigmoid(raw_score(two, g, 0)));
  const std::vector<double> base{0.4};
  CHECK(raw_scores(two, g, base)[0] == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("unseen categories fall into the overflow or missing bin") {
  std::vector<ColumnSchema> schema(1);
  schema[0].name = "c";
  schema[0].kind = ColumnKind::kCategorical;
  schema[0].categories = {"a", "b", "zzz"};
  const TabularFrame train(schema, {{0, 1, 0, 1}}, {0, 1, 0, 1}, {"y", "0", "1"});
  EbmHyperparams hp = quick(20);
  hp.interactions = 0;
  const EbmModel m = fit(train, hp);
  const TabularFrame novel(schema, {{2, kMissing}}, {0, 1}, {"y", "0", "1"});
  const auto s = raw_scores(m, novel);
  CHECK(s[0] == s[1]);
  CHECK(s[0] == doctest::Approx(m.intercept + m.terms[0].scores[0]));
}

TEST_CASE("histogram tree leaves take clamped Newton steps") {
  detail::Histogram h;
  h.reset({4});
  h.grad = {-4.0, -4.0, 3.0, 3.0};
  h.hess = {1.0, 1.0, 1.0, 1.0};
  h.count = {1.0, 1.0, 1.0, 1.0};
  detail::TreeParams tp;
  tp.max_leaves = 2;
  tp.learning_rate = 0.1;
  auto u = detail::fit_tree(h, tp);
  CHECK(u.leaves == 2);
  CHECK(u.delta[0] == doctest::Approx(0.1 * 4.0));
  CHECK(u.delta[3] == doctest::Approx(-0.1 * 3.0));
  tp.max_leaves = 1;
  u = detail::fit_tree(h, tp);
  CHECK(u.delta[0] == doctest::Approx(-0.1 * (-2.0 / 4.0)));
  // Clamp at 5 before the learning rate.
  h.grad = {-100.0, -100.0, 100.0, 100.0};
  tp.max_leaves = 2;
  u = detail::fit_tree(h, tp);
  CHECK(u.delta[0] == doctest::Approx(0.5));
}

TEST_CASE("2-D lookahead separates an XOR histogram") {
  detail::Histogram h;
  h.reset({2, 2});
  h.grad = {-1.0, 1.0, 1.0, -1.0};
  h.hess = {1.0, 1.0, 1.0, 1.0};
  h.count = {10.0, 10.0, 10.0, 10.0};
  detail::TreeParams tp;
  tp.max_leaves = 4;
  tp.learning_rate = 1.0;
  const auto u = detail::fit_tree(h, tp);
  CHECK(u.delta[0] > 0.0);
  CHECK(u.delta[1] < 0.0);
  CHECK(u.delta[2] < 0.0);
  CHECK(u.delta[3] > 0.0);
}

TEST_CASE("additivity and the local explanation identity on a fitted model") {
  const TabularFrame f = gbtest::mixed_frame(600, 1);
  const FitResult r = fit_detailed(f, quick());
  const EbmModel& m = r.model;
  CHECK(m.terms.size() == 4 + r.pairs.size());
  const BinnedFrame binned(m, f);
  for (std::size_t row = 0; row < f.rows(); ++row) {
    double sum = m.intercept;
    for (std::size_t t = 0; t < m.terms.size(); ++t) sum += m.terms[t].scores[binned.cell(t, row)];
    const double raw = raw_score(m, binned, row);
    CHECK(std::abs(raw - sum) <= 1e-9);
    const auto local = explain_local(m, f, row);
    CHECK(std::abs(local.total - raw) <= 1e-9);
  }
}

TEST_CASE("terms are centred on the training density") {
  const TabularFrame f = gbtest::mixed_frame(500, 2);
  const EbmModel m = fit(f, quick());
  for (std::size_t t = 0; t < m.terms.size(); ++t) {
    const auto& d = m.training_meta.term_density[t];
    double mean = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      mean += d[k] * m.terms[t].scores[k];
      total += d[k];
    }
    CHECK(total == 500.0);
    CHECK(std::abs(mean / total) < 1e-12);
  }
}

TEST_CASE("warm start identity with zero rounds") {
  const TabularFrame f = gbtest::mixed_frame(300, 3);
  CounterRng rng(9);
  std::vector<double> s(f.rows());
  for (auto& v : s) v = 3.0 * rng.normal();
  EbmHyperparams hp;
  hp.max_rounds = 0;
  FitOptions fo;
  fo.init_scores = s;
  fo.fit_intercept = false;
  const EbmModel m = fit(f, hp, fo);
  CHECK(m.intercept == 0.0);
  const auto p = predict_proba(m, f, s);
  for (std::size_t r = 0; r < f.rows(); ++r) CHECK(std::abs(p[r] - sigmoid(s[r])) <= 1e-12);

  // With the intercept fitted it becomes a single offset correction.
  fo.fit_intercept = true;
  const EbmModel c = fit(f, hp, fo);
  const auto q = predict_proba(c, f, s);
  for (std::size_t r = 0; r < f.rows(); ++r) CHECK(q[r] == doctest::Approx(sigmoid(s[r] + c.intercept)));
  double grad = 0.0;
  for (std::size_t r = 0; r < f.rows(); ++r) grad += q[r] - f.target()[r];
  CHECK(std::abs(grad) < 1e-6);
}

TEST_CASE("max_rounds 0 without init scores predicts the base rate") {
  const TabularFrame f = gbtest::mixed_frame(200, 4);
  EbmHyperparams hp;
  hp.max_rounds = 0;
  const EbmModel m = fit(f, hp);
  const double rate = static_cast<double>(f.positives()) / 200.0;
  for (double p : predict_proba(m, f)) CHECK(p == doctest::Approx(rate).epsilon(1e-12));
  CHECK(roc_auc(f.target(), predict_proba(m, f)) == 0.5);
}

TEST_CASE("identical full-data bags average to a single bag") {
  const TabularFrame f = gbtest::mixed_frame(400, 5);
  EbmHyperparams hp = quick(40);
  hp.validation_size = 0.0;
  hp.inner_bags = 0;
  hp.outer_bags = 1;
  const EbmModel one = fit(f, hp);
  hp.outer_bags = 4;
  const EbmModel four = fit(f, hp);
  REQUIRE(one.terms.size() == four.terms.size());
  CHECK(one.intercept == doctest::Approx(four.intercept).epsilon(1e-12));
  for (std::size_t t = 0; t < one.terms.size(); ++t) {
    CHECK(one.terms[t].features == four.terms[t].features);
    for (std::size_t k = 0; k < one.terms[t].scores.size(); ++k) {
      CHECK(std::abs(one.terms[t].scores[k] - four.terms[t].scores[k]) <= 1e-12);
    }
  }
}

TEST_CASE("fits are bitwise identical across worker counts") {
  const TabularFrame f = gbtest::mixed_frame(500, 6);
  EbmHyperparams hp = quick(50);
  hp.outer_bags = 5;
  hp.inner_bags = 2;
  FitOptions fo;
  fo.n_threads = 1;
  const EbmModel a = fit(f, hp, fo);
  fo.n_threads = 4;
  const EbmModel b = fit(f, hp, fo);
  CHECK(model_payload(a) == model_payload(b));
  hp.random_state = 99;
  CHECK(model_payload(fit(f, hp, fo)) != model_payload(a));
}

TEST_CASE("boosting never increases the training loss on full-data bags") {
  const TabularFrame f = gbtest::mixed_frame(500, 7);
  EbmHyperparams hp = quick(150);
  hp.validation_size = 0.0;
  hp.outer_bags = 1;
  hp.learning_rate = 0.05;
  FitOptions fo;
  fo.record_training_loss = true;
  const FitResult r = fit_detailed(f, hp, fo);
  const auto& loss = r.bags[0].training_loss;
  REQUIRE(loss.size() == 150);
  for (std::size_t e = 1; e < loss.size(); ++e) CHECK(loss[e] <= loss[e - 1] + 1e-12);
}

TEST_CASE("early stopping halts before max_rounds on noise") {
  CounterRng rng(31);
  std::vector<double> x(400);
  std::vector<std::uint8_t> y(400);
  for (std::size_t i = 0; i < 400; ++i) {
    x[i] = rng.uniform();
    y[i] = static_cast<std::uint8_t>(rng.uniform_int(2));
  }
  EbmHyperparams hp;
  hp.learning_rate = 0.5;
  hp.max_rounds = 2000;
  hp.outer_bags = 1;
  const FitResult r = fit_detailed(gbtest::numeric_frame({x}, y), hp);
  CHECK(r.bags[0].main_epochs < 2000);
  CHECK(r.bags[0].main_epochs == r.bags[0].best_main_epoch + hp.early_stopping_rounds);
}

TEST_CASE("pairs recover an XOR interaction") {
  const TabularFrame train = gbtest::xor_frame(2000, 1);
  const TabularFrame test = gbtest::xor_frame(1000, 2);
  EbmHyperparams hp;
  hp.interactions = 0;
  hp.max_rounds = 300;
  hp.learning_rate = 0.05;
  hp.outer_bags = 2;
  const EbmModel mains = fit(train, hp);
  CHECK(roc_auc(test.target(), predict_proba(mains, test)) <= 0.6);
  const auto pairs = detect_interactions(train, mains, 1);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].first == 0);
  CHECK(pairs[0].second == 1);
  hp.interactions = 1;
  const EbmModel with_pair = fit(train, hp);
  CHECK(with_pair.term_name(2) == "x0 & x1");
  CHECK(roc_auc(test.target(), predict_proba(with_pair, test)) >= 0.95);
}

TEST_CASE("interaction ranking prefers the planted pair") {
  CounterRng rng(4);
  const std::size_t n = 3000;
  std::vector<std::vector<double>> cols(4, std::vector<double>(n));
  std::vector<std::uint8_t> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto& c : cols) c[r] = rng.uniform();
    const bool parity = (cols[1][r] > 0.5) != (cols[3][r] > 0.5);
    y[r] = rng.uniform() < (parity ? 0.85 : 0.15) ? 1 : 0;
  }
  const TabularFrame f = gbtest::numeric_frame(cols, y);
  EbmHyperparams hp;
  hp.interactions = 0;
  hp.max_rounds = 100;
  hp.outer_bags = 1;
  const EbmModel m = fit(f, hp);
  const auto pairs = detect_interactions(f, m, 100);
  CHECK(pairs.size() == 6);
  CHECK(pairs[0] == FeaturePair{1, 3, pairs[0].gain});
  for (std::size_t i = 1; i < pairs.size(); ++i) CHECK(pairs[i].gain <= pairs[i - 1].gain);
}

TEST_CASE("invalid hyperparameters and data are rejected") {
  const TabularFrame f = gbtest::mixed_frame(100, 8);
  EbmHyperparams hp;
  hp.learning_rate = 0.0;
  CHECK_THROWS_AS(fit(f, hp), Error);
  hp = {};
  hp.max_bins = 1;
  CHECK_THROWS_AS(fit(f, hp), Error);
  hp = {};
  hp.outer_bags = 0;
  CHECK_THROWS_AS(fit(f, hp), Error);
  hp = {};
  const TabularFrame single = gbtest::numeric_frame({{1.0, 2.0}}, {1, 1});
  CHECK_THROWS_AS(fit(single, hp), Error);
  const std::vector<double> short_init{0.0};
  FitOptions fo;
  fo.init_scores = short_init;
  CHECK_THROWS_AS(fit(f, hp, fo), Error);
  const EbmModel m = fit(f, quick(5));
  CHECK_THROWS_AS(m.find_term("nope"), Error);
  CHECK(m.find_term("color") == 3);
}

}  // TEST_SUITE
