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

#include "glassboost/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "glassboost/error.hpp"
#include "glassboost/model_io.hpp"
#include "glassboost/random.hpp"

namespace glassboost {

using nlohmann::json;

namespace {

constexpr std::uint64_t kPerturbStream = 0x9e27;
constexpr std::uint64_t kLabelStream = 0x1abe;

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double pop_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

SignificanceResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::kInvalidArgument, "paired samples differ in length");
  require(!a.empty(), ErrorCode::kInvalidArgument, "paired samples are empty");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] - b[i] != 0.0) d.push_back(a[i] - b[i]);
  }
  SignificanceResult r;
  r.n_effective = d.size();
  if (d.empty()) return r;

  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return std::abs(d[i]) < std::abs(d[j]); });
  // Doubled midranks are integers: tie block [i, j) gets i + j + 1.
  std::vector<std::size_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::abs(d[order[j]]) == std::abs(d[order[i]])) ++j;
    for (std::size_t k = i; k < j; ++k) rank2[order[k]] = i + j + 1;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  std::size_t wplus2 = 0;
  std::size_t total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (d[i] > 0) wplus2 += rank2[i];
  }
  const std::size_t w2 = std::min(wplus2, total2 - wplus2);
  r.w_plus = static_cast<double>(wplus2) / 2.0;
  r.w_minus = static_cast<double>(total2 - wplus2) / 2.0;
  r.statistic = static_cast<double>(w2) / 2.0;

  if (n <= 20) {
    // counts[s]: sign assignments whose doubled W+ equals s.
    std::vector<double> counts(total2 + 1, 0.0);
    counts[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t s = reach + 1; s-- > 0;) {
        if (counts[s] != 0.0) counts[s + rank2[i]] += counts[s];
      }
      reach += rank2[i];
    }
    double extreme = 0.0;
    for (std::size_t s = 0; s <= total2; ++s) {
      if (s <= w2 || s >= total2 - w2) extreme += counts[s];
    }
    r.p_value = std::min(1.0, extreme / std::ldexp(1.0, static_cast<int>(n)));
    r.exact = true;
    return r;
  }

  const double nd = static_cast<double>(n);
  const double mean = nd * (nd + 1.0) / 4.0;
  const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
  r.exact = false;
  if (var <= 0.0) return r;
  const double z = std::max(0.0, std::abs(r.statistic - mean) - 0.5) / std::sqrt(var);
  r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

PerturbationResult perturbation_sensitivity(const EbmModel& model, const TabularFrame& frame,
                                            const PerturbationOptions& options) {
  require(options.noise_scale >= 0.0, ErrorCode::kInvalidArgument, "noise_scale must be >= 0");
  require(options.n_draws >= 1, ErrorCode::kInvalidArgument, "n_draws must be >= 1");
  PerturbationResult out;
  if (frame.rows() == 0) return out;
  if (options.feature) {
    require(frame.find_column(*options.feature).has_value(), ErrorCode::kInvalidArgument,
            "unknown feature '" + *options.feature + "'");
  }
  const auto clean = predict_proba(model, frame);

  // Noise scale per frame column, from the model's training statistics.
  std::vector<double> sd(frame.cols(), 0.0);
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    const auto& col = frame.column(c);
    if (col.kind != ColumnKind::kNumeric) continue;
    if (options.feature && col.name != *options.feature) continue;
    const auto it = std::find(model.feature_names.begin(), model.feature_names.end(), col.name);
    if (it == model.feature_names.end()) continue;
    const auto f = static_cast<std::size_t>(it - model.feature_names.begin());
    if (f < model.training_meta.feature_stddev.size()) sd[c] = model.training_meta.feature_stddev[f];
  }

  std::vector<ColumnSchema> columns = frame.columns();
  std::vector<std::uint8_t> target(frame.target().begin(), frame.target().end());
  double sum = 0.0;
  std::size_t flips = 0;
  for (std::size_t draw = 0; draw < options.n_draws; ++draw) {
    std::vector<std::vector<double>> values;
    for (std::size_t c = 0; c < frame.cols(); ++c) {
      const auto src = frame.values(c);
      std::vector<double> col(src.begin(), src.end());
      const double scale = options.noise_scale * sd[c];
      if (scale > 0.0) {
        CounterRng rng = CounterRng::stream(options.seed, {kPerturbStream, draw, c});
        for (auto& v : col) {
          const double e = rng.normal();
          if (!is_missing(v)) v += scale * e;
        }
      }
      values.push_back(std::move(col));
    }
    const TabularFrame noisy(columns, std::move(values), target, frame.target_labels());
    const auto p = predict_proba(model, noisy);
    for (std::size_t r = 0; r < p.size(); ++r) {
      const double delta = std::abs(p[r] - clean[r]);
      sum += delta;
      out.max_abs_delta = std::max(out.max_abs_delta, delta);
      if ((p[r] >= 0.5) != (clean[r] >= 0.5)) ++flips;
    }
  }
  const double cells = static_cast<double>(options.n_draws * frame.rows());
  out.mean_abs_delta = sum / cells;
  out.flip_rate = static_cast<double>(flips) / cells;
  return out;
}

const char* config_kind_name(ConfigKind kind) {
  switch (kind) {
    case ConfigKind::kBaseline: return "baseline";
    case ConfigKind::kPerfHpo: return "perf-hpo";
    case ConfigKind::kFairHpo: return "fair-hpo";
    case ConfigKind::kInitOnly: return "init-only";
    case ConfigKind::kInitHpo: return "init+hpo";
  }
  return "baseline";
}

ConfigKind parse_config_kind(std::string_view name) {
  for (auto k : {ConfigKind::kBaseline, ConfigKind::kPerfHpo, ConfigKind::kFairHpo,
                 ConfigKind::kInitOnly, ConfigKind::kInitHpo}) {
    if (name == config_kind_name(k)) return k;
  }
  fail(ErrorCode::kConfig, "unknown configuration '" + std::string(name) + "'");
}

std::vector<double> RunMatrix::roc_by_repeat(std::size_t config) const {
  std::vector<double> out;
  for (const auto& c : cells) {
    if (c.config == config) out.push_back(c.report.roc_auc);
  }
  return out;
}

RunSummary summarize(const std::string& name, std::span<const EvalReport> reports) {
  RunSummary s;
  s.name = name;
  s.repeats = reports.size();
  std::vector<double> roc;
  std::vector<double> f1s;
  std::vector<double> dps;
  std::vector<double> eods;
  std::vector<double> times;
  for (const auto& r : reports) {
    roc.push_back(r.roc_auc);
    f1s.push_back(r.f1);
    dps.push_back(r.dp);
    eods.push_back(r.eod);
    times.push_back(r.fit_time_seconds);
    s.confusion_total.tp += r.confusion.tp;
    s.confusion_total.tn += r.confusion.tn;
    s.confusion_total.fp += r.confusion.fp;
    s.confusion_total.fn += r.confusion.fn;
    s.has_fairness = s.has_fairness || r.has_fairness;
  }
  s.roc_mean = mean_of(roc);
  s.roc_std = pop_std(roc);
  s.f1_mean = mean_of(f1s);
  s.dp_mean = mean_of(dps);
  s.eod_mean = mean_of(eods);
  s.fit_time_mean = mean_of(times);
  s.fit_time_std = pop_std(times);
  return s;
}

RunMatrix run_matrix(const TabularFrame& frame, const std::vector<RunConfiguration>& configs,
                     const SplitSpec& spec, const RunMatrixOptions& options) {
  require(!configs.empty(), ErrorCode::kInvalidArgument, "no configurations to run");
  RunMatrix m;
  m.configurations = configs;
  m.splits = stratified_splits(frame, spec);
  std::vector<std::string> group_names;
  if (frame.has_sensitive()) group_names = frame.sensitive().groups;

  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    const auto& cfg = configs[ci];
    std::vector<EvalReport> reports;
    for (std::size_t rep = 0; rep < m.splits.size(); ++rep) {
      const auto& split = m.splits[rep];
      TabularFrame train = frame.subset(split.train);
      const TabularFrame test = frame.subset(split.test);
      std::vector<double> train_init;
      std::vector<double> test_init;
      if (cfg.warm_start || cfg.labeled_rows_only) {
        PretrainConfig pc = cfg.pretrain;
        pc.label_subset_seed = CounterRng::derive(cfg.pretrain.label_subset_seed, {kLabelStream, rep});
        std::size_t n_labels = pc.n_labels;
        if (n_labels == 0) {
          n_labels = std::max<std::size_t>(
              2, static_cast<std::size_t>(std::llround(pc.label_fraction * static_cast<double>(train.rows()))));
        }
        const auto labeled = stratified_label_subset(train, n_labels, pc.label_subset_seed);
        if (cfg.warm_start) {
          const TabularFrame& unlabeled = cfg.transductive ? frame : train;
          const auto pipeline = train_pipeline_on_rows(unlabeled, train, labeled, pc);
          train_init = make_init_scores(pipeline, train);
          test_init = make_init_scores(pipeline, test);
        }
        if (cfg.labeled_rows_only) {
          if (!train_init.empty()) {
            std::vector<double> sub;
            for (auto r : labeled) sub.push_back(train_init[r]);
            train_init = std::move(sub);
          }
          train = train.subset(labeled);
        }
      }
      FitOptions fo;
      fo.init_scores = train_init;
      fo.n_threads = options.n_threads;
      const auto t0 = std::chrono::steady_clock::now();
      const EbmModel model = fit(train, cfg.hyperparams, fo);
      const double fit_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const auto p = predict_proba(model, test, test_init);
      std::span<const int> groups;
      if (test.has_sensitive()) groups = test.sensitive().group_of_row;
      RunCell cell;
      cell.config = ci;
      cell.repeat = rep;
      cell.report = evaluate_predictions(test.target(), p, groups, group_names);
      cell.report.fit_time_seconds = fit_time;
      if (options.on_cell) options.on_cell(cell);
      reports.push_back(cell.report);
      m.cells.push_back(std::move(cell));
    }
    m.summaries.push_back(summarize(cfg.name, reports));
  }
  return m;
}

json to_json(const SignificanceResult& r) {
  return {{"statistic", r.statistic}, {"w_plus", r.w_plus},   {"w_minus", r.w_minus},
          {"p_value", r.p_value},     {"n_effective", r.n_effective}, {"exact", r.exact}};
}

json to_json(const RunMatrix& m) {
  json j;
  j["configurations"] = json::array();
  for (const auto& c : m.configurations) {
    j["configurations"].push_back({{"name", c.name},
                                   {"kind", config_kind_name(c.kind)},
                                   {"warm_start", c.warm_start},
                                   {"labeled_rows_only", c.labeled_rows_only},
                                   {"transductive", c.transductive},
                                   {"hyperparams", hyperparams_to_json(c.hyperparams)}});
  }
  j["splits"] = splits_to_json(m.splits);
  j["reports"] = json::array();
  for (const auto& c : m.cells) {
    json r = to_json(c.report);
    r["configuration"] = m.configurations[c.config].name;
    r["repeat"] = c.repeat;
    j["reports"].push_back(std::move(r));
  }
  j["summaries"] = json::array();
  for (const auto& s : m.summaries) {
    json sj{{"name", s.name},
            {"repeats", s.repeats},
            {"test_score_mean", s.roc_mean},
            {"test_score_std", s.roc_std},
            {"f1_mean", s.f1_mean},
            {"fit_time_mean", s.fit_time_mean},
            {"fit_time_std", s.fit_time_std},
            {"confusion_total",
             {{"tp", s.confusion_total.tp}, {"tn", s.confusion_total.tn},
              {"fp", s.confusion_total.fp}, {"fn", s.confusion_total.fn}}}};
    if (s.has_fairness) {
      sj["dp_mean"] = s.dp_mean;
      sj["eod_mean"] = s.eod_mean;
    }
    j["summaries"].push_back(std::move(sj));
  }
  j["significance"] = json::array();
  const auto base = m.roc_by_repeat(0);
  for (std::size_t c = 1; c < m.configurations.size(); ++c) {
    json s = to_json(wilcoxon_signed_rank(m.roc_by_repeat(c), base));
    s["configuration"] = m.configurations[c].name;
    s["against"] = m.configurations[0].name;
    j["significance"].push_back(std::move(s));
  }
  return j;
}

std::string render_markdown(const RunMatrix& m, const std::string& title) {
  std::string md = "# " + title + "\n\n";
  md += "| Configuration | ROC AUC | F1 | DP | EOD | Fit time (s) | TN | FP | FN | TP |\n";
  md += "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& s : m.summaries) {
    md += "| " + s.name + " | " + fixed(s.roc_mean, 5) + " ± " + fixed(s.roc_std, 5) + " | " +
          fixed(s.f1_mean, 4) + " | " + (s.has_fairness ? fixed(s.dp_mean, 4) : "n/a") + " | " +
          (s.has_fairness ? fixed(s.eod_mean, 4) : "n/a") + " | " + fixed(s.fit_time_mean, 2) +
          " ± " + fixed(s.fit_time_std, 2) + " | " + std::to_string(s.confusion_total.tn) + " | " +
          std::to_string(s.confusion_total.fp) + " | " + std::to_string(s.confusion_total.fn) +
          " | " + std::to_string(s.confusion_total.tp) + " |\n";
  }
  md += "\nConfusion counts are summed over " + std::to_string(m.splits.size()) + " split repeat(s).\n";
  if (m.configurations.size() > 1) {
    md += "\n| Configuration | vs | W | p (two-sided) | n |\n|---|---|---|---|---|\n";
    const auto base = m.roc_by_repeat(0);
    for (std::size_t c = 1; c < m.configurations.size(); ++c) {
      const auto r = wilcoxon_signed_rank(m.roc_by_repeat(c), base);
      md += "| " + m.configurations[c].name + " | " + m.configurations[0].name + " | " +
            fixed(r.statistic, 1) + " | " + fixed(r.p_value, 4) + " | " +
            std::to_string(r.n_effective) + " |\n";
    }
  }
  return md;
}

}  // namespace glassboost
