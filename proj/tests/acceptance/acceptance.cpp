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

// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
//   glassboost_acceptance            run every criterion
//   glassboost_acceptance 1 6 8      run the listed criteria
//
// Exit status: 0 when every selected criterion passes, 77 when the only
// non-passing criteria were skipped for lack of data, 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "glassboost/ebm.hpp"
#include "glassboost/error.hpp"
#include "glassboost/explain.hpp"
#include "glassboost/hpo.hpp"
#include "glassboost/metrics.hpp"
#include "glassboost/model_io.hpp"
#include "glassboost/pipeline.hpp"
#include "glassboost/pretrain.hpp"
#include "glassboost/random.hpp"
#include "glassboost/validate.hpp"
#include "support.hpp"

using namespace glassboost;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict = Verdict::kFail;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) { return {ok ? Verdict::kPass : Verdict::kFail, std::move(detail)}; }

std::string num(double v, int digits = 5) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const fs::path kData = GLASSBOOST_DATA_DIR;

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "glassboost_acceptance" / name;
  fs::create_directories(dir);
  return dir;
}

std::size_t thread_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// Shared protocol: stratified 75/25 splits, three repeats, seed 1337.
RunConfig protocol(const fs::path& dataset, const std::string& target, const std::string& name) {
  RunConfig c;
  c.dataset = dataset;
  c.target_column = target;
  c.seed = 1337;
  c.split = SplitSpec{0.25, 3, 1337};
  c.hyperparams.random_state = 1337;
  c.out_dir = work_dir(name);
  c.quiet = true;
  c.threads = thread_count();
  return c;
}

RunConfig heart(const std::string& name) { return protocol(kData / "heart.csv", "target", name); }
RunConfig adult(const std::string& name) {
  RunConfig c = protocol(kData / "adult.csv", "income", name);
  c.sensitive_column = "sex";
  return c;
}

bool have(const fs::path& p) { return fs::exists(p); }

Outcome missing(const fs::path& p) { return {Verdict::kSkip, "dataset not found: " + p.string()}; }

// Criterion 1 ---------------------------------------------------------------
Outcome heart_baseline() {
  const RunConfig c = heart("c01");
  if (!have(c.dataset)) return missing(c.dataset);
  const auto t0 = std::chrono::steady_clock::now();
  const json r = cmd_train(c);
  const double elapsed = seconds_since(t0);
  const double mean = r["test_score_mean"];
  const double sd = r["test_score_std"];
  return pass_if(mean >= 0.85 && mean <= 0.92 && elapsed <= 180.0,
                 "rows " + std::to_string(r["rows"].get<std::size_t>()) + ", mean test ROC " + num(mean) + " +- " +
                     num(sd) + " (band [0.85, 0.92]), " + num(elapsed, 1) + " s (limit 180 s)");
}

// Criterion 2 ---------------------------------------------------------------
Outcome adult_baseline() {
  RunConfig full = adult("c02_full");
  if (!have(full.dataset)) return missing(full.dataset);
  auto t0 = std::chrono::steady_clock::now();
  const json r = cmd_train(full);
  const double elapsed = seconds_since(t0);
  const double mean = r["test_score_mean"];

  RunConfig sub = adult("c02_sub");
  sub.subsample_rows = 20000;
  const json rs = cmd_train(sub);
  const double sub_mean = rs["test_score_mean"];
  return pass_if(mean >= 0.915 && elapsed <= 1200.0 && sub_mean >= 0.905,
                 "full " + std::to_string(r["rows"].get<std::size_t>()) + " rows: mean ROC " + num(mean) +
                     " +- " + num(r["test_score_std"].get<double>()) + " (>= 0.915) in " + num(elapsed, 1) +
                     " s (limit 1200 s); 20k subsample: " + num(sub_mean) + " (>= 0.905)");
}

// Criterion 3 ---------------------------------------------------------------
Outcome credit_fraud() {
  RunConfig c = protocol(kData / "creditcard.csv", "Class", "c03");
  if (!have(c.dataset)) return missing(c.dataset);
  RunConfig probe = c;
  const std::size_t rows = load_dataset(probe).rows();
  c.subsample_rows = rows / 5;
  const json r = cmd_train(c);
  const double mean = r["test_score_mean"];
  return pass_if(mean >= 0.95, "20% subsample (" + std::to_string(c.subsample_rows) + " rows): mean ROC " +
                                   num(mean) + " (>= 0.95)");
}

// Criterion 4 ---------------------------------------------------------------
// The study runs on the training partition of repeat 0; the best parameters
// are then refitted on all three repeats and compared with the baseline.
constexpr std::size_t kHeartTrials = 50;

RunConfig heart_study_config() {
  RunConfig c = heart("heart_study");
  c.trials = kHeartTrials;
  c.resume = true;  // reuse a finished study across criteria and reruns
  return c;
}

Outcome heart_hpo() {
  RunConfig c = heart_study_config();
  if (!have(c.dataset)) return missing(c.dataset);
  fs::remove_all(c.out_dir);  // always a fresh study here; criterion 13 may reuse it
  const json tuned = cmd_tune(c);
  RunConfig refit = heart("c04_refit");
  refit.hyperparams = hyperparams_from_json(tuned["best_params"], refit.hyperparams);
  const double tuned_mean = cmd_train(refit)["test_score_mean"];
  const double base_mean = cmd_train(heart("c04_base"))["test_score_mean"];
  return pass_if(tuned["trials"] == kHeartTrials && tuned_mean >= base_mean - 0.005,
                 std::to_string(tuned["trials"].get<std::size_t>()) + " trials, best validation objective " +
                     num(tuned["best_objective"].get<double>()) + "; refit mean ROC " + num(tuned_mean) +
                     " vs baseline " + num(base_mean) + " (need >= " + num(base_mean - 0.005) + ")");
}

// Criterion 5 ---------------------------------------------------------------
// Both studies share one split of a 10k-row stratified Adult subsample and
// the 50-trial budget used for heart; full-size studies take hours on one core.
constexpr std::size_t kFairRows = 10000;
constexpr std::size_t kFairTrials = 50;

Outcome fairness_direction() {
  RunConfig c = adult("c05");
  if (!have(c.dataset)) return missing(c.dataset);
  fs::remove_all(c.out_dir);
  c.subsample_rows = kFairRows;
  c.trials = kFairTrials;
  c.objective = ObjectiveKind::kPerformance;
  const json perf = cmd_tune(c);
  c.objective = ObjectiveKind::kFairness;
  const json fair = cmd_tune(c);
  const double dp_perf = perf["tuned_test"]["dp"];
  const double dp_fair = fair["tuned_test"]["dp"];
  const auto& sp = perf["sensitive_term_after"];
  const auto& sf = fair["sensitive_term_after"];
  const long rank_perf = sp["rank"].is_null() ? -1 : sp["rank"].get<long>();
  const long rank_fair = sf["rank"].is_null() ? -1 : sf["rank"].get<long>();
  const bool rank_worse = rank_fair > rank_perf && rank_perf > 0;
  return pass_if(dp_fair < dp_perf && rank_worse,
                 std::to_string(kFairRows) + " rows, " + std::to_string(kFairTrials) +
                     " trials each: test DP perf " + num(dp_perf, 4) + " -> fair " + num(dp_fair, 4) +
                     "; 'sex' importance " + num(sp["importance"].get<double>(), 4) + " rank " +
                     std::to_string(rank_perf) + " -> " + num(sf["importance"].get<double>(), 4) + " rank " +
                     std::to_string(rank_fair) + "; test ROC " +
                     num(perf["tuned_test"]["roc_auc"].get<double>(), 4) + " -> " +
                     num(fair["tuned_test"]["roc_auc"].get<double>(), 4));
}

// Criterion 6 ---------------------------------------------------------------
Outcome warm_start_identity() {
  const TabularFrame frame = gbtest::mixed_frame(500, 6);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    CounterRng rng = CounterRng::stream(606, {s});
    std::vector<double> init(frame.rows());
    for (auto& v : init) v = (s + 1) * 3.0 * rng.normal();
    EbmHyperparams hp;
    hp.max_rounds = 0;
    FitOptions fo;
    fo.init_scores = init;
    fo.fit_intercept = false;
    const EbmModel m = fit(frame, hp, fo);
    const auto p = predict_proba(m, frame, init);
    for (std::size_t i = 0; i < p.size(); ++i) {
      worst = std::max(worst, std::abs(p[i] - 1.0 / (1.0 + std::exp(-init[i]))));
    }
    if (m.intercept != 0.0) return {Verdict::kFail, "intercept not pinned to 0"};
  }
  return pass_if(worst <= 1e-12, "5 init vectors x 500 rows, max |p - sigmoid(init)| = " + sci(worst) +
                                     " (<= 1e-12)");
}

// Criterion 7 ---------------------------------------------------------------
Outcome additivity() {
  EbmHyperparams hp;
  hp.max_rounds = 300;
  hp.interactions = 3;
  const EbmModel model = fit(gbtest::mixed_frame(1500, 70), hp);
  const TabularFrame pool = gbtest::mixed_frame(3000, 71);
  CounterRng rng(707);
  std::vector<std::size_t> rows(1000);
  for (auto& r : rows) r = static_cast<std::size_t>(rng.uniform_int(pool.rows()));
  const TabularFrame sample = pool.subset(rows);
  const auto raw = raw_scores(model, sample);
  const auto proba = predict_proba(model, sample);
  double worst = 0.0;
  std::size_t mismatched = 0;
  for (std::size_t r = 0; r < sample.rows(); ++r) {
    const LocalExplanation e = explain_local(model, sample, r);
    double total = e.intercept;
    for (double c : e.contributions) total += c;
    worst = std::max(worst, std::abs(raw[r] - total));
    if (sigmoid(e.total) != proba[r]) ++mismatched;
  }
  return pass_if(worst <= 1e-9 && mismatched == 0,
                 std::to_string(model.terms.size()) + " terms, 1000 rows: max |raw - sum| = " + sci(worst) +
                     " (<= 1e-9), sigmoid(total) != proba on " + std::to_string(mismatched) + " rows");
}

// Criterion 8 ---------------------------------------------------------------
double pairwise_auc(const std::vector<std::uint8_t>& y, const std::vector<double>& p) {
  std::uint64_t half_wins = 0;
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? pos : neg) += 1;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j]) continue;
      half_wins += p[i] > p[j] ? 2 : p[i] == p[j] ? 1 : 0;
    }
  }
  return static_cast<double>(half_wins) / static_cast<double>(2 * pos * neg);
}

Outcome auc_oracle() {
  CounterRng rng(808);
  std::size_t equal = 0;
  std::size_t with_ties = 0;
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 2 + rng.uniform_int(499);
    const std::uint64_t levels = 2 + rng.uniform_int(c % 2 == 0 ? 10 : 1000);
    std::vector<std::uint8_t> y(n);
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.uniform() < 0.4 ? 1 : 0;
      p[i] = static_cast<double>(rng.uniform_int(levels)) / static_cast<double>(levels);
    }
    y[0] = 1;
    y[1] = 0;
    std::vector<double> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) ++with_ties;
    if (roc_auc(y, p) == pairwise_auc(y, p)) ++equal;
  }
  return pass_if(equal == 200, std::to_string(equal) + "/200 instances exactly equal (" +
                                   std::to_string(with_ties) + " with tied scores)");
}

// Criterion 9 ---------------------------------------------------------------
double enumerated_wilcoxon(const std::vector<double>& d) {
  std::vector<double> nz;
  for (double v : d) {
    if (v != 0.0) nz.push_back(v);
  }
  const std::size_t n = nz.size();
  if (n == 0) return 1.0;
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double below = 0;
    double same = 0;
    for (std::size_t j = 0; j < n; ++j) {
      below += std::abs(nz[j]) < std::abs(nz[i]) ? 1 : 0;
      same += std::abs(nz[j]) == std::abs(nz[i]) ? 1 : 0;
    }
    rank[i] = below + (same + 1) / 2;
  }
  double total = 0;
  double plus = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    plus += nz[i] > 0 ? rank[i] : 0;
  }
  const double w = std::min(plus, total - plus);
  std::uint64_t extreme = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += (mask >> i & 1) ? rank[i] : 0;
    if (std::min(s, total - s) <= w) ++extreme;
  }
  return std::min(1.0, static_cast<double>(extreme) / std::ldexp(1.0, static_cast<int>(n)));
}

Outcome wilcoxon_oracle() {
  CounterRng rng(909);
  std::size_t equal = 0;
  double worst = 0.0;
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 1 + rng.uniform_int(12);
    const std::uint64_t levels = c % 2 == 0 ? 5 : 1000;
    std::vector<double> a(n);
    std::vector<double> b(n);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng.uniform_int(levels));
      b[i] = static_cast<double>(rng.uniform_int(levels));
      d[i] = a[i] - b[i];
    }
    const double p = wilcoxon_signed_rank(a, b).p_value;
    const double oracle = enumerated_wilcoxon(d);
    worst = std::max(worst, std::abs(p - oracle));
    if (p == oracle) ++equal;
  }
  return pass_if(equal == 200, std::to_string(equal) + "/200 cases (n <= 12) equal to 2^n enumeration, max gap " +
                                   sci(worst));
}

// Criterion 10 --------------------------------------------------------------
Outcome gradient_oracle() {
  CounterRng rng(1010);
  double worst = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  for (std::uint64_t net = 0; net < 50; ++net) {
    AutoencoderConfig cfg;
    cfg.seed = 5000 + net;
    cfg.hidden = 2 + rng.uniform_int(7);
    cfg.bottleneck = 1 + rng.uniform_int(3);
    const std::size_t d = 2 + rng.uniform_int(5);
    AutoencoderModel m = init_autoencoder(d, cfg);
    for (auto& layer : m.layers) {
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = 0.2 * rng.normal();
    }
    const auto rows = static_cast<Eigen::Index>(1 + rng.uniform_int(8));
    Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    const auto r = gradient_check(m, x);
    worst = std::max(worst, r.max_relative_error);
    checked += r.checked;
    skipped += r.skipped;
  }
  return pass_if(worst <= 1e-4, "50 networks, " + std::to_string(checked) + " parameters checked (" +
                                    std::to_string(skipped) + " skipped at ReLU kinks), max relative error " +
                                    sci(worst) + " (<= 1e-4)");
}

// Criterion 11 --------------------------------------------------------------
Outcome interaction_lift() {
  const TabularFrame frame = gbtest::xor_frame(2000, 11);
  const Split split = stratified_splits(frame, SplitSpec{0.25, 1, 1337}).front();
  const TabularFrame train = frame.subset(split.train);
  const TabularFrame test = frame.subset(split.test);
  EbmHyperparams hp;
  hp.interactions = 0;
  const double mains = roc_auc(test.target(), predict_proba(fit(train, hp), test));
  hp.interactions = 1;
  const double pairs = roc_auc(test.target(), predict_proba(fit(train, hp), test));
  return pass_if(mains <= 0.6 && pairs >= 0.95,
                 "XOR n=2000: main effects only " + num(mains, 4) + " (<= 0.6), one pair " + num(pairs, 4) +
                     " (>= 0.95)");
}

// Criterion 12 --------------------------------------------------------------
Outcome tpe_vs_random() {
  auto median_best = [](SamplerKind sampler) {
    std::vector<double> best;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Study s;
      s.space.params = {ParamSpec{"x", ParamKind::kUniform, 0.0, 1.0}};
      s.sampler = sampler;
      s.sampler_seed = seed;
      optimize(s, 30, [](const std::vector<double>& v, json&) { return (v[0] - 0.3) * (v[0] - 0.3); });
      best.push_back(s.best_trial().objective);
    }
    std::sort(best.begin(), best.end());
    return 0.5 * (best[9] + best[10]);
  };
  const double tpe = median_best(SamplerKind::kTpe);
  const double rnd = median_best(SamplerKind::kRandom);
  return pass_if(tpe < rnd, "median best over 20 seeds: TPE " + sci(tpe) + " vs random " + sci(rnd));
}

// Criterion 13 --------------------------------------------------------------
Outcome pretrain_cold_start() {
  RunConfig c = heart("c13");
  if (!have(c.dataset)) return missing(c.dataset);
  const TabularFrame frame = load_dataset(c);

  // Low-label regime: each repeat sees only 30 labeled training rows.
  RunConfiguration scratch;
  scratch.name = "scratch";
  scratch.hyperparams = c.hyperparams;
  scratch.labeled_rows_only = true;
  scratch.pretrain.n_labels = 30;
  RunConfiguration warm = scratch;
  warm.name = "warm";
  warm.warm_start = true;
  RunMatrixOptions mo;
  mo.n_threads = c.threads;
  const RunMatrix m = run_matrix(frame, {scratch, warm}, SplitSpec{0.25, 10, 1337}, mo);
  const RunSummary& s = m.summaries[0];
  const RunSummary& w = m.summaries[1];
  const auto test = wilcoxon_signed_rank(m.roc_by_repeat(1), m.roc_by_repeat(0));
  const bool stable = w.roc_mean >= s.roc_mean - 0.01 && w.roc_std <= s.roc_std + 0.01;

  // Full pipeline: tuned hyperparameters plus warm start on the whole
  // training partition, under the standard three-repeat protocol.
  RunConfig full = heart_study_config();
  full.configurations = {ConfigKind::kInitHpo};
  const json bench = cmd_benchmark(full);
  const double init_hpo = bench["summaries"][0]["test_score_mean"];
  return pass_if(stable && init_hpo >= 0.87,
                 "30 labels x 10 repeats: warm " + num(w.roc_mean, 4) + " +- " + num(w.roc_std, 4) + " vs scratch " +
                     num(s.roc_mean, 4) + " +- " + num(s.roc_std, 4) + " (Wilcoxon p " + num(test.p_value, 3) +
                     "); init+hpo mean ROC " + num(init_hpo) + " (>= 0.87)");
}

// Criterion 14 --------------------------------------------------------------
Outcome determinism() {
  const fs::path heart_csv = kData / "heart.csv";
  if (!have(heart_csv)) return missing(heart_csv);
  auto payloads = [&](const std::string& name) {
    RunConfig c = heart(name);
    fs::remove_all(c.out_dir);
    c.trials = 6;
    cmd_train(c);
    cmd_tune(c);
    std::vector<std::string> out;
    for (int r = 0; r < 3; ++r) {
      out.push_back(model_payload(load_model(c.out_dir / ("model_repeat" + std::to_string(r) + ".json"))));
    }
    out.push_back(model_payload(load_model(c.out_dir / "model_tuned_performance.json")));
    out.push_back(study_payload(load_study(c.out_dir / "study_performance.json")));
    return out;
  };
  const auto a = payloads("c14_a");
  const auto b = payloads("c14_b");
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i] ? 1 : 0;
  return pass_if(same == a.size(), std::to_string(same) + "/" + std::to_string(a.size()) +
                                       " payloads byte-identical (3 train models, tuned model, study)");
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "heart baseline", heart_baseline},
      {2, "adult baseline", adult_baseline},
      {3, "credit-fraud subsample", credit_fraud},
      {4, "performance HPO on heart", heart_hpo},
      {5, "fairness HPO direction on adult", fairness_direction},
      {6, "warm-start identity", warm_start_identity},
      {7, "additivity of explanations", additivity},
      {8, "AUC vs pairwise oracle", auc_oracle},
      {9, "Wilcoxon vs sign enumeration", wilcoxon_oracle},
      {10, "autoencoder gradient check", gradient_oracle},
      {11, "interaction lift on XOR", interaction_lift},
      {12, "TPE vs random search", tpe_vs_random},
      {13, "pretraining cold start", pretrain_cold_start},
      {14, "determinism of train and tune", determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  int failed = 0;
  int skipped = 0;
  int ran = 0;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Verdict::kFail, std::string("error: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::kPass ? "PASS" : o.verdict == Verdict::kSkip ? "SKIP" : "FAIL";
    std::printf("[%s] C%02d %s: %s [%.1f s]\n", tag, c.id, c.name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failed += o.verdict == Verdict::kFail ? 1 : 0;
    skipped += o.verdict == Verdict::kSkip ? 1 : 0;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no matching criteria\n");
    return 1;
  }
  if (failed > 0) return 1;
  return skipped > 0 ? 77 : 0;
}
