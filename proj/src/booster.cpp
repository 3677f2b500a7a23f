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

// Cyclic gradient boosting of additive terms with outer bagging.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <mutex>
#include <thread>

#include "glassboost/ebm.hpp"
#include "glassboost/error.hpp"
#include "glassboost/random.hpp"
#include "interactions_internal.hpp"
#include "tree.hpp"

namespace glassboost {
namespace {

struct TermSpec {
  std::vector<std::size_t> features;
  std::vector<std::size_t> dims;
  std::size_t cells() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

// What all bags of one boosting stage share.
struct StageInput {
  const std::vector<TermSpec>* terms = nullptr;
  const std::vector<std::vector<std::uint32_t>>* cells = nullptr;  // [term][training row]
  std::span<const std::uint8_t> y;
  std::span<const double> start;  // raw score each row starts the stage from
  std::size_t epochs = 0;
  std::uint64_t stage_id = 0;
};

struct BagOutput {
  std::vector<std::vector<double>> tables;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  std::vector<double> training_loss;
  std::vector<double> validation_loss;
};

inline double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double row_loss(std::uint8_t y, double raw) {
  // log(1 + exp(-raw)) for y = 1, log(1 + exp(raw)) for y = 0, overflow safe.
  const double z = y ? -raw : raw;
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double mean_loss(std::span<const std::uint8_t> y, std::span<const double> raw) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += row_loss(y[i], raw[i]);
  return y.empty() ? 0.0 : s / static_cast<double>(y.size());
}

class BagBooster {
 public:
  BagBooster(const StageInput& in, const Split& bag, const EbmHyperparams& hp,
             std::uint64_t inner_seed, bool record_training_loss)
      : in_(in),
        hp_(hp),
        inner_rng_(inner_seed),
        record_training_loss_(record_training_loss) {
    const auto& terms = *in.terms;
    const std::size_t n = bag.train.size();
    const std::size_t m = bag.test.size();
    train_cells_.resize(terms.size());
    val_cells_.resize(terms.size());
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const auto& src = (*in.cells)[t];
      train_cells_[t].resize(n);
      val_cells_[t].resize(m);
      for (std::size_t i = 0; i < n; ++i) train_cells_[t][i] = src[bag.train[i]];
      for (std::size_t j = 0; j < m; ++j) val_cells_[t][j] = src[bag.test[j]];
    }
    y_train_.resize(n);
    pred_train_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      y_train_[i] = in.y[bag.train[i]];
      pred_train_[i] = in.start[bag.train[i]];
    }
    y_val_.resize(m);
    pred_val_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      y_val_[j] = in.y[bag.test[j]];
      pred_val_[j] = in.start[bag.test[j]];
    }
    grad_.resize(n);
    hess_.resize(n);
    refresh_gradients();
    if (hp.inner_bags > 0) weights_.resize(n);
    counts_.resize(terms.size());
    for (std::size_t t = 0; t < terms.size(); ++t) {
      counts_[t].assign(terms[t].cells(), 0.0);
      for (auto k : train_cells_[t]) counts_[t][k] += 1.0;
    }

    tree_params_.max_leaves = hp.max_leaves;
    tree_params_.learning_rate = hp.learning_rate;
    tree_params_.min_samples_leaf = static_cast<double>(hp.min_samples_leaf);
  }

  BagOutput run() {
    const auto& terms = *in_.terms;
    BagOutput out;
    out.tables.resize(terms.size());
    for (std::size_t t = 0; t < terms.size(); ++t) out.tables[t].assign(terms[t].cells(), 0.0);
    if (terms.empty() || in_.epochs == 0) return out;

    const bool early_stopping = !y_val_.empty();
    double best_val = early_stopping ? mean_loss(y_val_, pred_val_) : 0.0;
    std::vector<std::vector<double>> best_tables = out.tables;
    std::vector<double> gains(terms.size(), 0.0);
    const auto greedy_steps = static_cast<std::size_t>(std::floor(hp_.greedy_ratio));

    for (std::size_t epoch = 1; epoch <= in_.epochs; ++epoch) {
      for (std::size_t t = 0; t < terms.size(); ++t) gains[t] = step(t, out.tables[t]);
      for (std::size_t g = 0; g < greedy_steps; ++g) {
        const std::size_t t = static_cast<std::size_t>(
            std::max_element(gains.begin(), gains.end()) - gains.begin());
        gains[t] = step(t, out.tables[t]);
      }
      out.epochs_run = epoch;
      if (record_training_loss_) out.training_loss.push_back(mean_loss(y_train_, pred_train_));
      if (!early_stopping) continue;
      const double v = mean_loss(y_val_, pred_val_);
      out.validation_loss.push_back(v);
      if (v < best_val - hp_.early_stopping_tolerance) {
        best_val = v;
        best_tables = out.tables;
        out.best_epoch = epoch;
      } else if (epoch - out.best_epoch >= hp_.early_stopping_rounds) {
        break;
      }
    }
    if (early_stopping) {
      out.tables = std::move(best_tables);
    } else {
      out.best_epoch = out.epochs_run;
    }
    return out;
  }

 private:
  void refresh_gradients() {
    for (std::size_t i = 0; i < pred_train_.size(); ++i) {
      const double p = stable_sigmoid(pred_train_[i]);
      grad_[i] = p - static_cast<double>(y_train_[i]);
      hess_[i] = p * (1.0 - p);
    }
  }

  void accumulate(std::size_t t, const double* weights) {
    const auto& cells = train_cells_[t];
    auto& g = hist_.grad;
    auto& h = hist_.hess;
    auto& c = hist_.count;
    if (weights == nullptr) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto k = cells[i];
        g[k] += grad_[i];
        h[k] += hess_[i];
      }
      c = counts_[t];
    } else {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const double w = weights[i];
        if (w == 0.0) continue;
        const auto k = cells[i];
        g[k] += w * grad_[i];
        h[k] += w * hess_[i];
        c[k] += w;
      }
    }
  }

  // One boosting step on term t; returns the tree's gain.
  double step(std::size_t t, std::vector<double>& table) {
    const auto& spec = (*in_.terms)[t];
    std::vector<double> delta;
    double gain = 0.0;
    if (hp_.inner_bags == 0) {
      hist_.reset(spec.dims);
      accumulate(t, nullptr);
      auto update = detail::fit_tree(hist_, tree_params_);
      delta = std::move(update.delta);
      gain = update.gain;
    } else {
      delta.assign(spec.cells(), 0.0);
      const double inv = 1.0 / static_cast<double>(hp_.inner_bags);
      const std::size_t n = weights_.size();
      for (std::size_t b = 0; b < hp_.inner_bags; ++b) {
        std::fill(weights_.begin(), weights_.end(), 0.0);
        for (std::size_t d = 0; d < n; ++d) weights_[inner_rng_.uniform_int(n)] += 1.0;
        hist_.reset(spec.dims);
        accumulate(t, weights_.data());
        const auto update = detail::fit_tree(hist_, tree_params_);
        for (std::size_t k = 0; k < delta.size(); ++k) delta[k] += update.delta[k] * inv;
        gain += update.gain * inv;
      }
    }
    for (std::size_t k = 0; k < delta.size(); ++k) table[k] += delta[k];
    const auto& cells = train_cells_[t];
    for (std::size_t i = 0; i < cells.size(); ++i) {
      pred_train_[i] += delta[cells[i]];
      const double p = stable_sigmoid(pred_train_[i]);
      grad_[i] = p - static_cast<double>(y_train_[i]);
      hess_[i] = p * (1.0 - p);
    }
    const auto& vcells = val_cells_[t];
    for (std::size_t j = 0; j < vcells.size(); ++j) pred_val_[j] += delta[vcells[j]];
    return gain;
  }

  const StageInput& in_;
  const EbmHyperparams& hp_;
  CounterRng inner_rng_;
  bool record_training_loss_;
  detail::TreeParams tree_params_;
  detail::Histogram hist_;
  std::vector<std::vector<std::uint32_t>> train_cells_;
  std::vector<std::vector<std::uint32_t>> val_cells_;
  std::vector<std::uint8_t> y_train_;
  std::vector<std::uint8_t> y_val_;
  std::vector<double> pred_train_;
  std::vector<double> pred_val_;
  std::vector<double> grad_;
  std::vector<double> hess_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> counts_;  // per-term cell counts of the bag
};

template <typename Fn>
void for_each_bag(std::size_t n_bags, std::size_t n_threads, Fn&& fn) {
  const std::size_t workers = std::min(std::max<std::size_t>(n_threads, 1), n_bags);
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_bags; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next++; b < n_bags; b = next++) {
        try {
          fn(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Runs one stage on every outer bag and averages the tables in bag order.
std::vector<std::vector<double>> run_stage(const StageInput& in, const std::vector<Split>& bags,
                                           const EbmHyperparams& hp, const FitOptions& options,
                                           std::vector<BagOutput>& outputs) {
  outputs.assign(bags.size(), BagOutput{});
  for_each_bag(bags.size(), options.n_threads, [&](std::size_t b) {
    const std::uint64_t inner_seed =
        CounterRng::derive(hp.random_state, {0xba9, b, in.stage_id, 0x1});
    BagBooster booster(in, bags[b], hp, inner_seed, options.record_training_loss);
    outputs[b] = booster.run();
  });
  std::vector<std::vector<double>> avg(in.terms->size());
  for (std::size_t t = 0; t < in.terms->size(); ++t) {
    avg[t].assign((*in.terms)[t].cells(), 0.0);
    for (const auto& out : outputs) {
      for (std::size_t k = 0; k < avg[t].size(); ++k) avg[t][k] += out.tables[t][k];
    }
    for (auto& v : avg[t]) v /= static_cast<double>(outputs.size());
  }
  return avg;
}

double fit_offset_intercept(std::span<const std::uint8_t> y, std::span<const double> base) {
  // Newton iterations for argmin_c sum loss(y, base + c).
  double rate = 0.0;
  for (auto v : y) rate += v;
  rate /= static_cast<double>(y.size());
  double c = std::log(rate / (1.0 - rate));
  for (int it = 0; it < 100; ++it) {
    double g = 0.0;
    double h = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double p = stable_sigmoid(base[i] + c);
      g += p - y[i];
      h += p * (1.0 - p);
    }
    if (h <= 1e-300) break;
    const double step = std::clamp(g / h, -5.0, 5.0);
    c -= step;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(c))) break;
  }
  return c;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::uint32_t> widen(const std::vector<std::uint16_t>& v) {
  return std::vector<std::uint32_t>(v.begin(), v.end());
}

}  // namespace

void EbmHyperparams::validate() const {
  require(learning_rate > 0.0 && std::isfinite(learning_rate), ErrorCode::kInvalidArgument,
          "learning_rate must be positive");
  require(max_bins >= 2, ErrorCode::kInvalidArgument, "max_bins must be >= 2");
  require(max_interaction_bins >= 2, ErrorCode::kInvalidArgument,
          "max_interaction_bins must be >= 2");
  require(max_leaves >= 1, ErrorCode::kInvalidArgument, "max_leaves must be >= 1");
  require(outer_bags >= 1, ErrorCode::kInvalidArgument, "outer_bags must be >= 1");
  require(greedy_ratio >= 0.0, ErrorCode::kInvalidArgument, "greedy_ratio must be >= 0");
  require(validation_size >= 0.0 && validation_size < 1.0, ErrorCode::kInvalidArgument,
          "validation_size must be in [0, 1)");
  require(min_samples_leaf >= 1, ErrorCode::kInvalidArgument, "min_samples_leaf must be >= 1");
}

FitResult fit_detailed(const TabularFrame& frame, const EbmHyperparams& hp,
                       const FitOptions& options) {
  hp.validate();
  const std::size_t n = frame.rows();
  require(n > 0, ErrorCode::kData, "cannot fit on an empty dataset");
  const std::size_t pos = frame.positives();
  require(pos > 0 && pos < n, ErrorCode::kData, "target has a single class");
  require(options.init_scores.empty() || options.init_scores.size() == n,
          ErrorCode::kInvalidArgument, "init_scores length must equal the training row count");
  for (double s : options.init_scores) {
    require(std::isfinite(s), ErrorCode::kInvalidArgument, "init_scores must be finite");
  }

  const auto wall_start = std::chrono::steady_clock::now();
  FitResult result;
  EbmModel& model = result.model;
  model.hyperparams = hp;
  model.training_meta.fit_started = utc_timestamp();
  model.training_meta.seed = hp.random_state;
  model.training_meta.n_train_rows = n;
  model.bins = build_bins(frame, hp.max_bins);
  model.pair_bins = build_bins(frame, hp.max_interaction_bins);
  for (const auto& c : frame.columns()) model.feature_names.push_back(c.name);
  const std::size_t n_features = frame.cols();

  const auto y = frame.target();
  std::vector<double> base(n, 0.0);
  if (!options.init_scores.empty()) base.assign(options.init_scores.begin(), options.init_scores.end());
  if (options.fit_intercept) {
    model.intercept = options.init_scores.empty()
                          ? logit(static_cast<double>(pos) / static_cast<double>(n))
                          : fit_offset_intercept(y, base);
  }
  std::vector<double> start(n);
  for (std::size_t r = 0; r < n; ++r) start[r] = base[r] + model.intercept;

  // Outer bags: a stratified train/validation partition per bag.
  std::vector<Split> bags;
  const auto all = iota_indices(n);
  for (std::size_t b = 0; b < hp.outer_bags; ++b) {
    if (hp.validation_size > 0.0) {
      bags.push_back(stratified_holdout(y, all, hp.validation_size,
                                        CounterRng::derive(hp.random_state, {0xba9, b})));
    } else {
      bags.push_back(Split{all, {}});
    }
  }

  // Stage 1: main effects.
  std::vector<TermSpec> main_terms;
  std::vector<std::vector<std::uint32_t>> main_cells;
  std::vector<std::vector<std::uint16_t>> main_bins_per_feature;
  for (std::size_t f = 0; f < n_features; ++f) {
    main_terms.push_back(TermSpec{{f}, {model.bins[f].bin_count()}});
    main_bins_per_feature.push_back(apply_bin(model.bins[f], frame));
    main_cells.push_back(widen(main_bins_per_feature.back()));
  }
  StageInput main_stage;
  main_stage.terms = &main_terms;
  main_stage.cells = &main_cells;
  main_stage.y = y;
  main_stage.start = start;
  main_stage.epochs = hp.max_rounds;
  main_stage.stage_id = 1;
  std::vector<BagOutput> main_out;
  auto main_tables = run_stage(main_stage, bags, hp, options, main_out);

  result.bags.resize(bags.size());
  for (std::size_t b = 0; b < bags.size(); ++b) {
    result.bags[b].main_epochs = main_out[b].epochs_run;
    result.bags[b].best_main_epoch = main_out[b].best_epoch;
    result.bags[b].training_loss = std::move(main_out[b].training_loss);
    result.bags[b].validation_loss = std::move(main_out[b].validation_loss);
  }
  for (std::size_t f = 0; f < n_features; ++f) {
    model.terms.push_back(TermModel{{f}, main_terms[f].dims, std::move(main_tables[f])});
  }

  // Stage 2: pairs detected on the residuals of the averaged main effects.
  if (hp.max_rounds > 0 && hp.interactions > 0 && n_features >= 2) {
    std::vector<double> main_pred = start;
    for (std::size_t f = 0; f < n_features; ++f) {
      const auto& table = model.terms[f].scores;
      const auto& cells = main_cells[f];
      for (std::size_t r = 0; r < n; ++r) main_pred[r] += table[cells[r]];
    }
    std::vector<std::vector<std::uint16_t>> pair_bins_per_feature;
    std::vector<std::size_t> pair_dims;
    for (std::size_t f = 0; f < n_features; ++f) {
      pair_bins_per_feature.push_back(apply_bin(model.pair_bins[f], frame));
      pair_dims.push_back(model.pair_bins[f].bin_count());
    }
    result.pairs = detail::rank_pairs(pair_bins_per_feature, pair_dims, y, main_pred,
                                      hp.interactions, static_cast<double>(hp.min_samples_leaf));

    std::vector<TermSpec> pair_terms;
    std::vector<std::vector<std::uint32_t>> pair_cells;
    for (const auto& p : result.pairs) {
      const std::size_t ny = pair_dims[p.second];
      pair_terms.push_back(TermSpec{{p.first, p.second}, {pair_dims[p.first], ny}});
      std::vector<std::uint32_t> cells(n);
      const auto& bx = pair_bins_per_feature[p.first];
      const auto& by = pair_bins_per_feature[p.second];
      for (std::size_t r = 0; r < n; ++r) {
        cells[r] = static_cast<std::uint32_t>(bx[r]) * static_cast<std::uint32_t>(ny) + by[r];
      }
      pair_cells.push_back(std::move(cells));
    }
    if (!pair_terms.empty()) {
      StageInput pair_stage;
      pair_stage.terms = &pair_terms;
      pair_stage.cells = &pair_cells;
      pair_stage.y = y;
      pair_stage.start = main_pred;
      pair_stage.epochs = std::max<std::size_t>(1, hp.max_rounds / 4);
      pair_stage.stage_id = 2;
      std::vector<BagOutput> pair_out;
      FitOptions pair_options = options;
      pair_options.record_training_loss = false;
      auto pair_tables = run_stage(pair_stage, bags, hp, pair_options, pair_out);
      for (std::size_t b = 0; b < bags.size(); ++b) result.bags[b].pair_epochs = pair_out[b].epochs_run;
      for (std::size_t t = 0; t < pair_terms.size(); ++t) {
        model.terms.push_back(
            TermModel{pair_terms[t].features, pair_terms[t].dims, std::move(pair_tables[t])});
      }
      main_cells.insert(main_cells.end(), pair_cells.begin(), pair_cells.end());
    }
  }

  // Center every term on the training distribution; the mean moves to the intercept.
  auto& meta = model.training_meta;
  meta.term_density.resize(model.terms.size());
  for (std::size_t t = 0; t < model.terms.size(); ++t) {
    auto& term = model.terms[t];
    auto& density = meta.term_density[t];
    density.assign(term.scores.size(), 0.0);
    for (auto c : main_cells[t]) density[c] += 1.0;
    double mean = 0.0;
    for (std::size_t k = 0; k < density.size(); ++k) mean += density[k] * term.scores[k];
    mean /= static_cast<double>(n);
    for (auto& s : term.scores) s -= mean;
    model.intercept += mean;
  }

  meta.feature_stddev.assign(n_features, 0.0);
  for (std::size_t f = 0; f < n_features; ++f) {
    if (frame.column(f).kind != ColumnKind::kNumeric) continue;
    double sum = 0.0;
    double sq = 0.0;
    std::size_t cnt = 0;
    for (double v : frame.values(f)) {
      if (is_missing(v)) continue;
      sum += v;
      ++cnt;
    }
    if (cnt == 0) continue;
    const double mean = sum / static_cast<double>(cnt);
    for (double v : frame.values(f)) {
      if (!is_missing(v)) sq += (v - mean) * (v - mean);
    }
    meta.feature_stddev[f] = std::sqrt(sq / static_cast<double>(cnt));
  }

  meta.fit_finished = utc_timestamp();
  meta.fit_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return result;
}

EbmModel fit(const TabularFrame& frame, const EbmHyperparams& hp, const FitOptions& options) {
  return fit_detailed(frame, hp, options).model;
}

}  // namespace glassboost
