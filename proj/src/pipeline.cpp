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

#include "glassboost/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "glassboost/error.hpp"
#include "glassboost/explain.hpp"
#include "glassboost/metrics.hpp"
#include "glassboost/model_io.hpp"
#include "glassboost/random.hpp"

namespace glassboost {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSubsampleStream = 0x5b5;

void say(const LogSink& log, const std::string& msg) {
  if (log) log(msg);
}

template <typename T>
void take(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("config key '") + key + "': " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  require(j.is_object(), ErrorCode::kConfig, where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    require(ok, ErrorCode::kConfig, "unknown config key '" + key + "' in " + where);
  }
}

std::string fmt(double v, int digits = 5) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double pop_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

void require_dataset(const RunConfig& c) {
  require(!c.dataset.empty(), ErrorCode::kConfig, "no dataset given (--data)");
  require(!c.target_column.empty(), ErrorCode::kConfig, "no target column given (--target)");
}

std::vector<Split> make_splits(const RunConfig& c, const TabularFrame& frame) {
  return stratified_splits(frame, c.split);
}

const Split& split_at(const std::vector<Split>& splits, std::size_t repeat) {
  require(repeat < splits.size(), ErrorCode::kConfig,
          "repeat " + std::to_string(repeat) + " out of range");
  return splits[repeat];
}

std::span<const int> groups_of(const TabularFrame& f) {
  if (!f.has_sensitive()) return {};
  return f.sensitive().group_of_row;
}

EvalReport evaluate_on(const EbmModel& model, const TabularFrame& frame, std::span<const double> base) {
  const auto p = predict_proba(model, frame, base);
  std::vector<std::string> names;
  if (frame.has_sensitive()) names = frame.sensitive().groups;
  return evaluate_predictions(frame.target(), p, groups_of(frame), names);
}

fs::path study_path(const RunConfig& c, ObjectiveKind kind) {
  return c.out_dir / (std::string("study_") + objective_kind_name(kind) + ".json");
}

// Runs (or resumes) the study on the training partition of repeat 0.
Study obtain_study(const RunConfig& c, const TabularFrame& train, ObjectiveKind kind,
                   bool resume, const LogSink& log) {
  EbmStudyOptions so;
  so.objective = kind;
  so.n_trials = c.trials;
  so.seed = c.seed;
  so.base = c.hyperparams;
  so.validation_fraction = c.validation_fraction;
  so.n_threads = c.threads;
  so.persist_path = study_path(c, kind);
  so.resume = resume;
  so.on_trial = [&](const TrialRecord& t) {
    std::string line = std::string("[tune:") + objective_kind_name(kind) + "] trial " +
                       std::to_string(t.index + 1) + "/" + std::to_string(c.trials) +
                       " objective=" + fmt(t.objective) + " roc=" + fmt(t.user_attrs.value("roc", 0.0));
    if (t.user_attrs.contains("dp")) line += " dp=" + fmt(t.user_attrs["dp"].get<double>(), 4);
    say(log, line);
  };
  return run_study(train, so);
}

std::optional<TermImportance> sensitive_importance(const EbmModel& model, const TabularFrame& ref,
                                                   const std::optional<std::string>& column) {
  if (!column) return std::nullopt;
  const auto g = explain_global(model, ref);
  for (const auto& e : g.entries) {
    if (e.name == *column) return e;
  }
  return std::nullopt;
}

json importance_json(const std::optional<TermImportance>& e) {
  if (!e) return nullptr;
  return {{"term", e->name}, {"importance", e->importance}, {"rank", e->rank}};
}

}  // namespace

RunConfig run_config_from_json(const json& j, RunConfig c) {
  check_keys(j,
             {"dataset", "target", "sensitive", "positive_labels", "drop_columns", "kinds",
              "subsample", "seed", "split", "hyperparams", "out_dir", "quiet", "threads", "tune",
              "pretrain", "model", "init_scores", "fit_intercept", "rows", "repeat", "row", "validate", "benchmark"},
             "config");
  if (j.contains("seed")) {
    take(j, "seed", c.seed);
    c.split.seed = c.seed;
    c.hyperparams.random_state = c.seed;
    c.pretrain.autoencoder.seed = c.seed;
    c.pretrain.label_subset_seed = c.seed;
  }
  std::string path;
  if (j.contains("dataset")) {
    take(j, "dataset", path);
    c.dataset = path;
  }
  take(j, "target", c.target_column);
  if (j.contains("sensitive")) {
    if (j["sensitive"].is_null()) {
      c.sensitive_column.reset();
    } else {
      std::string s;
      take(j, "sensitive", s);
      c.sensitive_column = s;
    }
  }
  take(j, "positive_labels", c.positive_labels);
  take(j, "drop_columns", c.drop_columns);
  if (j.contains("kinds")) {
    std::map<std::string, std::string> kinds;
    take(j, "kinds", kinds);
    for (const auto& [col, kind] : kinds) c.kind_overrides[col] = parse_column_kind(kind);
  }
  take(j, "subsample", c.subsample_rows);
  take(j, "quiet", c.quiet);
  take(j, "threads", c.threads);
  if (j.contains("out_dir")) {
    take(j, "out_dir", path);
    c.out_dir = path;
  }
  if (j.contains("split")) {
    check_keys(j["split"], {"test_fraction", "repeats"}, "split");
    take(j["split"], "test_fraction", c.split.test_fraction);
    take(j["split"], "repeats", c.split.n_repeats);
  }
  if (j.contains("hyperparams")) c.hyperparams = hyperparams_from_json(j["hyperparams"], c.hyperparams);
  if (j.contains("tune")) {
    const auto& t = j["tune"];
    check_keys(t, {"objective", "trials", "resume", "validation_fraction"}, "tune");
    if (t.contains("objective")) c.objective = parse_objective_kind(t["objective"].get<std::string>());
    take(t, "trials", c.trials);
    take(t, "resume", c.resume);
    take(t, "validation_fraction", c.validation_fraction);
  }
  if (j.contains("pretrain")) {
    const auto& p = j["pretrain"];
    check_keys(p,
               {"labels", "label_fraction", "epochs", "batch_size", "learning_rate", "hidden",
                "bottleneck", "head_l2", "train_only"},
               "pretrain");
    take(p, "labels", c.pretrain.n_labels);
    take(p, "label_fraction", c.pretrain.label_fraction);
    take(p, "epochs", c.pretrain.autoencoder.epochs);
    take(p, "batch_size", c.pretrain.autoencoder.batch_size);
    take(p, "learning_rate", c.pretrain.autoencoder.learning_rate);
    take(p, "hidden", c.pretrain.autoencoder.hidden);
    take(p, "bottleneck", c.pretrain.autoencoder.bottleneck);
    take(p, "head_l2", c.pretrain.head_l2);
    take(p, "train_only", c.train_only_pretrain);
  }
  if (j.contains("model")) {
    take(j, "model", path);
    c.model_path = path;
  }
  if (j.contains("init_scores")) {
    take(j, "init_scores", path);
    c.init_scores_path = path;
  }
  take(j, "fit_intercept", c.fit_intercept);
  take(j, "rows", c.rows);
  take(j, "repeat", c.repeat);
  if (j.contains("row") && !j["row"].is_null()) {
    std::size_t r = 0;
    take(j, "row", r);
    c.explain_row = r;
  }
  if (j.contains("validate")) {
    const auto& v = j["validate"];
    check_keys(v, {"noise_scale", "draws", "feature"}, "validate");
    take(v, "noise_scale", c.noise_scale);
    take(v, "draws", c.noise_draws);
    if (v.contains("feature") && !v["feature"].is_null()) c.perturb_feature = v["feature"].get<std::string>();
  }
  if (j.contains("benchmark")) {
    const auto& b = j["benchmark"];
    check_keys(b, {"configs", "dry_run"}, "benchmark");
    if (b.contains("configs")) {
      c.configurations.clear();
      for (const auto& name : b["configs"]) c.configurations.push_back(parse_config_kind(name.get<std::string>()));
    }
    take(b, "dry_run", c.dry_run);
  }
  require(c.split.test_fraction > 0.0 && c.split.test_fraction < 1.0, ErrorCode::kConfig,
          "test_fraction must be in (0, 1)");
  require(c.split.n_repeats >= 1, ErrorCode::kConfig, "repeats must be >= 1");
  require(c.threads >= 1, ErrorCode::kConfig, "threads must be >= 1");
  return c;
}

json run_config_to_json(const RunConfig& c) {
  json kinds = json::object();
  for (const auto& [col, kind] : c.kind_overrides) kinds[col] = column_kind_name(kind);
  json configs = json::array();
  for (auto k : c.configurations) configs.push_back(config_kind_name(k));
  return {{"dataset", c.dataset.string()},
          {"target", c.target_column},
          {"sensitive", c.sensitive_column ? json(*c.sensitive_column) : json(nullptr)},
          {"positive_labels", c.positive_labels},
          {"drop_columns", c.drop_columns},
          {"kinds", kinds},
          {"subsample", c.subsample_rows},
          {"seed", c.seed},
          {"split", {{"test_fraction", c.split.test_fraction}, {"repeats", c.split.n_repeats}}},
          {"hyperparams", hyperparams_to_json(c.hyperparams)},
          {"out_dir", c.out_dir.string()},
          {"threads", c.threads},
          {"fit_intercept", c.fit_intercept},
          {"tune",
           {{"objective", objective_kind_name(c.objective)},
            {"trials", c.trials},
            {"resume", c.resume},
            {"validation_fraction", c.validation_fraction}}},
          {"pretrain",
           {{"labels", c.pretrain.n_labels},
            {"label_fraction", c.pretrain.label_fraction},
            {"epochs", c.pretrain.autoencoder.epochs},
            {"batch_size", c.pretrain.autoencoder.batch_size},
            {"learning_rate", c.pretrain.autoencoder.learning_rate},
            {"hidden", c.pretrain.autoencoder.hidden},
            {"bottleneck", c.pretrain.autoencoder.bottleneck},
            {"head_l2", c.pretrain.head_l2},
            {"train_only", c.train_only_pretrain}}},
          {"validate",
           {{"noise_scale", c.noise_scale},
            {"draws", c.noise_draws},
            {"feature", c.perturb_feature ? json(*c.perturb_feature) : json(nullptr)}}},
          {"benchmark", {{"configs", configs}, {"dry_run", c.dry_run}}}};
}

TabularFrame load_dataset(const RunConfig& c) {
  require_dataset(c);
  CsvLoadOptions o;
  o.target_column = c.target_column;
  o.sensitive_column = c.sensitive_column;
  o.positive_labels = c.positive_labels;
  o.kind_overrides = c.kind_overrides;
  o.drop_columns = c.drop_columns;
  TabularFrame frame = load_csv(c.dataset, o);
  if (c.subsample_rows > 0 && c.subsample_rows < frame.rows()) {
    const auto rows = stratified_label_subset(frame, c.subsample_rows,
                                              CounterRng::derive(c.seed, {kSubsampleStream}));
    frame = frame.subset(rows);
  }
  return frame;
}

json cmd_ingest(const RunConfig& c, const LogSink& log) {
  const TabularFrame frame = load_dataset(c);
  json schema = schema_to_json(frame);
  const fs::path out = c.out_dir / "schema.json";
  write_text_file(out, schema.dump(1) + "\n");
  say(log, "[ingest] " + std::to_string(frame.rows()) + " rows, " + std::to_string(frame.cols()) +
               " features, " + std::to_string(frame.positives()) + " positive");
  return {{"command", "ingest"}, {"rows", frame.rows()}, {"features", frame.cols()},
          {"positives", frame.positives()}, {"artifacts", {out.string()}}};
}

json cmd_split(const RunConfig& c, const LogSink& log) {
  const TabularFrame frame = load_dataset(c);
  const auto splits = make_splits(c, frame);
  const fs::path out = c.out_dir / "splits.json";
  write_text_file(out, splits_to_json(splits).dump() + "\n");
  for (std::size_t r = 0; r < splits.size(); ++r) {
    say(log, "[split] repeat " + std::to_string(r) + ": train " + std::to_string(splits[r].train.size()) +
                 ", test " + std::to_string(splits[r].test.size()));
  }
  return {{"command", "split"}, {"repeats", splits.size()}, {"artifacts", {out.string()}}};
}

namespace {

std::vector<double> load_init_scores(const fs::path& path, std::size_t expected) {
  std::vector<double> s = init_scores_from_csv(read_text_file(path));
  require(s.size() == expected, ErrorCode::kData,
          "init score file " + path.string() + " has " + std::to_string(s.size()) +
              " rows, expected " + std::to_string(expected));
  return s;
}

std::vector<double> gather(const std::vector<double>& v, std::span<const std::size_t> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(v[r]);
  return out;
}

}  // namespace

json cmd_train(const RunConfig& c, const LogSink& log) {
  const TabularFrame frame = load_dataset(c);
  const auto splits = make_splits(c, frame);
  std::vector<double> init;
  if (!c.init_scores_path.empty()) init = load_init_scores(c.init_scores_path, frame.rows());
  json reports = json::array();
  json artifacts = json::array();
  std::vector<double> scores;
  std::vector<double> times;
  for (std::size_t r = 0; r < splits.size(); ++r) {
    const TabularFrame train = frame.subset(splits[r].train);
    const TabularFrame test = frame.subset(splits[r].test);
    std::vector<double> train_init;
    std::vector<double> test_base;
    if (!init.empty()) {
      train_init = gather(init, splits[r].train);
      test_base = gather(init, splits[r].test);
    }
    FitOptions fo;
    fo.n_threads = c.threads;
    fo.init_scores = train_init;
    fo.fit_intercept = c.fit_intercept;
    const auto t0 = std::chrono::steady_clock::now();
    const EbmModel model = fit(train, c.hyperparams, fo);
    const double fit_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EvalReport rep = evaluate_on(model, test, test_base);
    rep.fit_time_seconds = fit_time;
    const fs::path path = c.out_dir / ("model_repeat" + std::to_string(r) + ".json");
    save_model(model, path);
    artifacts.push_back(path.string());
    scores.push_back(rep.roc_auc);
    times.push_back(fit_time);
    json rj = to_json(rep);
    rj["repeat"] = r;
    rj["model"] = path.string();
    reports.push_back(std::move(rj));
    say(log, "[train] repeat " + std::to_string(r + 1) + "/" + std::to_string(splits.size()) +
                 " roc=" + fmt(scores.back()) + " fit=" + fmt(fit_time, 2) + "s");
  }
  json report{{"command", "train"},
              {"dataset", c.dataset.string()},
              {"rows", frame.rows()},
              {"hyperparams", hyperparams_to_json(c.hyperparams)},
              {"fit_time_mean", mean_of(times)},
              {"fit_time_std", pop_std(times)},
              {"test_score_mean", mean_of(scores)},
              {"test_score_std", pop_std(scores)},
              {"reports", reports}};
  const fs::path out = c.out_dir / "train_report.json";
  write_text_file(out, report.dump(1) + "\n");
  artifacts.push_back(out.string());
  say(log, "[train] test ROC AUC " + fmt(mean_of(scores)) + " ± " + fmt(pop_std(scores)));
  report["artifacts"] = artifacts;
  return report;
}

json cmd_tune(const RunConfig& c, const LogSink& log) {
  const TabularFrame frame = load_dataset(c);
  require(c.objective != ObjectiveKind::kFairness || frame.has_sensitive(), ErrorCode::kConfig,
          "the fairness objective needs --sensitive-column");
  const auto splits = make_splits(c, frame);
  const Split& split = split_at(splits, c.repeat);
  const TabularFrame train = frame.subset(split.train);
  const TabularFrame test = frame.subset(split.test);

  const Study study = obtain_study(c, train, c.objective, c.resume, log);
  const TrialRecord& best = study.best_trial();
  const EbmHyperparams best_hp = apply_params(c.hyperparams, study.space, best.values);

  FitOptions fo;
  fo.n_threads = c.threads;
  auto t0 = std::chrono::steady_clock::now();
  const EbmModel tuned = fit(train, best_hp, fo);
  const double tuned_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  t0 = std::chrono::steady_clock::now();
  const EbmModel baseline = fit(train, c.hyperparams, fo);
  const double baseline_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  EvalReport tuned_rep = evaluate_on(tuned, test, {});
  tuned_rep.fit_time_seconds = tuned_time;
  EvalReport base_rep = evaluate_on(baseline, test, {});
  base_rep.fit_time_seconds = baseline_time;

  const std::string tag = objective_kind_name(c.objective);
  const fs::path model_out = c.out_dir / ("model_tuned_" + tag + ".json");
  save_model(tuned, model_out);

  json report{{"command", "tune"},
              {"objective", tag},
              {"trials", study.trials.size()},
              {"best_trial", best.index},
              {"best_objective", best.objective},
              {"best_params", params_to_json(study.space, best.values)},
              {"best_user_attrs", best.user_attrs},
              {"tuned_test", to_json(tuned_rep)},
              {"baseline_test", to_json(base_rep)}};
  if (frame.has_sensitive()) {
    report["dp_before"] = base_rep.dp;
    report["dp_after"] = tuned_rep.dp;
    const auto& col = frame.sensitive().column;
    report["sensitive_term_before"] = importance_json(sensitive_importance(baseline, train, col));
    report["sensitive_term_after"] = importance_json(sensitive_importance(tuned, train, col));
  }
  const fs::path out = c.out_dir / ("tune_report_" + tag + ".json");
  write_text_file(out, report.dump(1) + "\n");
  say(log, "[tune] best trial " + std::to_string(best.index) + " objective=" + fmt(best.objective) +
               " test roc=" + fmt(tuned_rep.roc_auc) + " (baseline " + fmt(base_rep.roc_auc) + ")");
  report["artifacts"] = {study_path(c, c.objective).string(), model_out.string(), out.string()};
  return report;
}

json cmd_pretrain(const RunConfig& c, const LogSink& log) {
  const TabularFrame frame = load_dataset(c);
  const auto splits = make_splits(c, frame);
  const Split& split = split_at(splits, c.repeat);
  const TabularFrame train = frame.subset(split.train);
  const TabularFrame test = frame.subset(split.test);
  const TabularFrame& unlabeled = c.train_only_pretrain ? train : frame;
  say(log, std::string("[pretrain] autoencoder on ") + std::to_string(unlabeled.rows()) + " rows (" +
               (c.train_only_pretrain ? "training partition" : "all rows, features only") + ")");
  const InitScorePipeline pipeline = train_pipeline(unlabeled, train, c.pretrain);
  say(log, "[pretrain] reconstruction loss " + fmt(pipeline.autoencoder.initial_loss) + " -> " +
               fmt(pipeline.autoencoder.final_loss()) + "; head on " +
               std::to_string(pipeline.labeled_rows.size()) + " labeled rows");

  const fs::path pipe_out = c.out_dir / "pipeline.json";
  write_text_file(pipe_out, pipeline_to_json(pipeline).dump(1) + "\n");
  const fs::path all_out = c.out_dir / "init_scores_all.csv";
  const fs::path train_out = c.out_dir / "init_scores_train.csv";
  const fs::path test_out = c.out_dir / "init_scores_test.csv";
  const auto all_scores = make_init_scores(pipeline, frame);
  write_text_file(all_out, init_scores_to_csv(all_scores));
  write_text_file(train_out, init_scores_to_csv(make_init_scores(pipeline, train)));
  const auto test_scores = make_init_scores(pipeline, test);
  write_text_file(test_out, init_scores_to_csv(test_scores));
  const auto head_p = head_probabilities(pipeline, test);
  return {{"command", "pretrain"},
          {"rows", frame.rows()},
          {"labeled_rows", pipeline.labeled_rows.size()},
          {"initial_loss", pipeline.autoencoder.initial_loss},
          {"final_loss", pipeline.autoencoder.final_loss()},
          {"head_test_roc", roc_auc(test.target(), head_p)},
          {"artifacts", {pipe_out.string(), all_out.string(), train_out.string(), test_out.string()}}};
}

json cmd_evaluate(const RunConfig& c, const LogSink& log) {
  require(!c.model_path.empty(), ErrorCode::kConfig, "no model given (--model)");
  const EbmModel model = load_model(c.model_path);
  const TabularFrame frame = load_dataset(c);
  TabularFrame rows;
  std::vector<std::size_t> picked;
  if (c.rows == "all") {
    rows = frame;
  } else {
    require(c.rows == "test" || c.rows == "train", ErrorCode::kConfig, "rows must be test, train or all");
    const auto splits = make_splits(c, frame);
    const Split& split = split_at(splits, c.repeat);
    picked = c.rows == "test" ? split.test : split.train;
    rows = frame.subset(picked);
  }
  std::vector<double> base;
  if (!c.init_scores_path.empty()) {
    // Either aligned to the evaluated rows or to the whole dataset.
    base = init_scores_from_csv(read_text_file(c.init_scores_path));
    if (!picked.empty() && base.size() == frame.rows() && base.size() != rows.rows()) base = gather(base, picked);
    require(base.size() == rows.rows(), ErrorCode::kData,
            "init score file has " + std::to_string(base.size()) + " rows, expected " +
                std::to_string(rows.rows()));
  }
  EvalReport rep = evaluate_on(model, rows, base);
  rep.fit_time_seconds = model.training_meta.fit_time_seconds;
  json report = to_json(rep);
  report["command"] = "evaluate";
  report["model"] = c.model_path.string();
  report["rows_evaluated"] = c.rows;
  const fs::path out = c.out_dir / "eval_report.json";
  write_text_file(out, report.dump(1) + "\n");
  say(log, "[evaluate] roc=" + fmt(rep.roc_auc) + " f1=" + fmt(rep.f1, 4));
  report["artifacts"] = {out.string()};
  return report;
}

json cmd_explain(const RunConfig& c, const LogSink& log) {
  require(!c.model_path.empty(), ErrorCode::kConfig, "no model given (--model)");
  const EbmModel model = load_model(c.model_path);
  const TabularFrame frame = load_dataset(c);
  const auto splits = make_splits(c, frame);
  const TabularFrame reference = frame.subset(split_at(splits, c.repeat).train);
  const auto global = explain_global(model, reference);
  json doc = explanation_json(model, global);
  if (c.explain_row) {
    require(*c.explain_row < frame.rows(), ErrorCode::kConfig, "row out of range");
    const auto local = explain_local(model, frame, *c.explain_row);
    json contrib = json::object();
    for (std::size_t t = 0; t < model.terms.size(); ++t) contrib[model.term_name(t)] = local.contributions[t];
    doc["local"] = {{"row", *c.explain_row},
                    {"intercept", local.intercept},
                    {"contributions", contrib},
                    {"total", local.total},
                    {"probability", sigmoid(local.total)}};
  }
  const fs::path out = c.out_dir / "explanation.json";
  const fs::path csv = c.out_dir / "shapes.csv";
  write_text_file(out, doc.dump(1) + "\n");
  write_text_file(csv, shapes_to_csv(model));
  std::vector<const TermImportance*> top;
  for (const auto& e : global.entries) top.push_back(&e);
  std::sort(top.begin(), top.end(), [](auto* a, auto* b) { return a->rank < b->rank; });
  for (std::size_t i = 0; i < std::min<std::size_t>(5, top.size()); ++i) {
    say(log, "[explain] #" + std::to_string(top[i]->rank) + " " + top[i]->name + " " + fmt(top[i]->importance, 4));
  }
  return {{"command", "explain"}, {"terms", model.terms.size()}, {"artifacts", {out.string(), csv.string()}}};
}

namespace {

RunConfiguration make_configuration(const RunConfig& c, ConfigKind kind, const EbmHyperparams& hp) {
  RunConfiguration rc;
  rc.kind = kind;
  rc.name = config_kind_name(kind);
  rc.hyperparams = hp;
  rc.warm_start = kind == ConfigKind::kInitOnly || kind == ConfigKind::kInitHpo;
  rc.pretrain = c.pretrain;
  rc.transductive = !c.train_only_pretrain;
  return rc;
}

std::vector<RunConfiguration> resolve_configurations(const RunConfig& c, const TabularFrame& frame,
                                                     const std::vector<ConfigKind>& kinds,
                                                     const LogSink& log) {
  const auto splits = make_splits(c, frame);
  const TabularFrame train = frame.subset(splits.front().train);
  std::optional<EbmHyperparams> perf;
  std::optional<EbmHyperparams> fair;
  auto tuned = [&](ObjectiveKind kind) {
    const Study s = obtain_study(c, train, kind, true, log);
    return apply_params(c.hyperparams, s.space, s.best_trial().values);
  };
  std::vector<RunConfiguration> out;
  for (auto k : kinds) {
    EbmHyperparams hp = c.hyperparams;
    if (k == ConfigKind::kPerfHpo || k == ConfigKind::kInitHpo) {
      if (!perf) perf = tuned(ObjectiveKind::kPerformance);
      hp = *perf;
    } else if (k == ConfigKind::kFairHpo) {
      require(frame.has_sensitive(), ErrorCode::kConfig, "fair-hpo needs --sensitive-column");
      if (!fair) fair = tuned(ObjectiveKind::kFairness);
      hp = *fair;
    }
    out.push_back(make_configuration(c, k, hp));
  }
  return out;
}

json matrix_command(const RunConfig& c, const std::vector<ConfigKind>& kinds, const std::string& name,
                    const LogSink& log, json extra) {
  const TabularFrame frame = load_dataset(c);
  const auto configs = resolve_configurations(c, frame, kinds, log);
  RunMatrixOptions mo;
  mo.n_threads = c.threads;
  mo.on_cell = [&](const RunCell& cell) {
    say(log, "[" + name + "] " + configs[cell.config].name + " repeat " + std::to_string(cell.repeat + 1) +
                 " roc=" + fmt(cell.report.roc_auc));
  };
  const RunMatrix m = run_matrix(frame, configs, c.split, mo);
  json report = to_json(m);
  for (auto& [k, v] : extra.items()) report[k] = v;
  if (name == "validate") {
    const TabularFrame train = frame.subset(m.splits.front().train);
    const TabularFrame test = frame.subset(m.splits.front().test);
    FitOptions fo;
    fo.n_threads = c.threads;
    const EbmModel model = fit(train, configs.front().hyperparams, fo);
    PerturbationOptions po;
    po.noise_scale = c.noise_scale;
    po.n_draws = c.noise_draws;
    po.seed = c.seed;
    po.feature = c.perturb_feature;
    const auto pr = perturbation_sensitivity(model, test, po);
    report["perturbation"] = {{"configuration", configs.front().name},
                              {"noise_scale", c.noise_scale},
                              {"draws", c.noise_draws},
                              {"feature", c.perturb_feature ? json(*c.perturb_feature) : json(nullptr)},
                              {"mean_abs_delta", pr.mean_abs_delta},
                              {"max_abs_delta", pr.max_abs_delta},
                              {"flip_rate", pr.flip_rate}};
  }
  std::string md = render_markdown(m, name == "validate" ? "Validation report" : "Benchmark comparison");
  if (report.contains("perturbation")) {
    const auto& p = report["perturbation"];
    md += "\nPerturbation (" + p["configuration"].get<std::string>() + ", noise " +
          fmt(c.noise_scale, 3) + " sd, " + std::to_string(c.noise_draws) + " draws): mean |dp| " +
          fmt(p["mean_abs_delta"].get<double>(), 5) + ", max |dp| " + fmt(p["max_abs_delta"].get<double>(), 5) +
          ", flip rate " + fmt(p["flip_rate"].get<double>(), 5) + "\n";
  }
  const fs::path json_out = c.out_dir / (name + "_report.json");
  const fs::path md_out = c.out_dir / (name + "_report.md");
  write_text_file(json_out, report.dump(1) + "\n");
  write_text_file(md_out, md);
  report["artifacts"] = {json_out.string(), md_out.string()};
  report["command"] = name;
  return report;
}

}  // namespace

json cmd_validate(const RunConfig& c, const LogSink& log) {
  std::vector<ConfigKind> kinds = c.configurations;
  if (kinds.empty()) kinds = {ConfigKind::kBaseline};
  return matrix_command(c, kinds, "validate", log, json::object());
}

json cmd_benchmark(const RunConfig& c, const LogSink& log) {
  std::vector<ConfigKind> kinds = c.configurations;
  if (kinds.empty()) {
    kinds = {ConfigKind::kBaseline, ConfigKind::kPerfHpo, ConfigKind::kFairHpo, ConfigKind::kInitOnly,
             ConfigKind::kInitHpo};
    if (!c.sensitive_column) kinds.erase(kinds.begin() + 2);
  }
  if (c.dry_run) {
    json plan = json::array();
    for (auto k : kinds) {
      std::string step = std::string(config_kind_name(k)) + ": " + std::to_string(c.split.n_repeats) + " repeat(s)";
      if (k == ConfigKind::kPerfHpo || k == ConfigKind::kInitHpo) {
        step += ", performance study (" + std::to_string(c.trials) + " trials, " +
                study_path(c, ObjectiveKind::kPerformance).string() + ")";
      }
      if (k == ConfigKind::kFairHpo) {
        step += ", fairness study (" + std::to_string(c.trials) + " trials, " +
                study_path(c, ObjectiveKind::kFairness).string() + ")";
      }
      if (k == ConfigKind::kInitOnly || k == ConfigKind::kInitHpo) step += ", autoencoder + head per repeat";
      plan.push_back(step);
    }
    return {{"command", "benchmark"}, {"dry_run", true}, {"plan", plan}, {"artifacts", json::array()}};
  }
  return matrix_command(c, kinds, "benchmark", log, json::object());
}

json run_command(const std::string& command, const RunConfig& config, const LogSink& log) {
  if (command == "ingest") return cmd_ingest(config, log);
  if (command == "split") return cmd_split(config, log);
  if (command == "train") return cmd_train(config, log);
  if (command == "tune") return cmd_tune(config, log);
  if (command == "pretrain") return cmd_pretrain(config, log);
  if (command == "evaluate") return cmd_evaluate(config, log);
  if (command == "explain") return cmd_explain(config, log);
  if (command == "validate") return cmd_validate(config, log);
  if (command == "benchmark") return cmd_benchmark(config, log);
  fail(ErrorCode::kConfig, "unknown command '" + command + "'");
}

}  // namespace glassboost
