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

#include "glassboost/pretrain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "glassboost/error.hpp"
#include "glassboost/random.hpp"

namespace glassboost {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

constexpr std::uint64_t kInitStream = 0x91;
constexpr std::uint64_t kShuffleStream = 0x5bf;

struct ForwardPass {
  std::vector<MatrixXd> z;  // pre-activations per layer
  std::vector<MatrixXd> a;  // a[0] = input, a[l + 1] = output of layer l
};

MatrixXd activate(const MatrixXd& z, Activation act) {
  return act == Activation::kRelu ? MatrixXd(z.cwiseMax(0.0)) : z;
}

ForwardPass forward(const AutoencoderModel& model, const MatrixXd& x, std::size_t n_layers) {
  ForwardPass f;
  f.a.push_back(x);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& layer = model.layers[l];
    MatrixXd z = f.a.back() * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    f.a.push_back(activate(z, layer.activation));
    f.z.push_back(std::move(z));
  }
  return f;
}

double mse(const MatrixXd& out, const MatrixXd& x) {
  if (x.size() == 0) return 0.0;
  return (out - x).squaredNorm() / static_cast<double>(x.size());
}

double stable_sigmoid(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

std::vector<bool> relu_masks(const AutoencoderModel& model, const MatrixXd& x) {
  const auto f = forward(model, x, model.layers.size());
  std::vector<bool> mask;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    if (model.layers[l].activation != Activation::kRelu) continue;
    const auto& z = f.z[l];
    for (Eigen::Index i = 0; i < z.size(); ++i) mask.push_back(z.data()[i] > 0.0);
  }
  return mask;
}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

json matrix_to_json(const MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"values", flat}};
}

MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto flat = j.at("values").get<std::vector<double>>();
  require(static_cast<Eigen::Index>(flat.size()) == rows * cols, ErrorCode::kData,
          "matrix size mismatch in pipeline JSON");
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

json vector_to_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

VectorXd vector_from_json(const json& j) {
  const auto flat = j.get<std::vector<double>>();
  return Eigen::Map<const VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

}  // namespace

std::size_t FeatureEncoder::width() const {
  std::size_t w = 0;
  for (const auto& c : columns) {
    w += c.kind == ColumnKind::kNumeric ? 1 : c.categories.size();
    w += c.missing_indicator ? 1 : 0;
  }
  return w;
}

FeatureEncoder fit_encoder(const TabularFrame& frame) {
  FeatureEncoder enc;
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    const auto& schema = frame.column(c);
    FeatureEncoder::Column col;
    col.name = schema.name;
    col.kind = schema.kind;
    std::size_t present = 0;
    double sum = 0.0;
    for (double v : frame.values(c)) {
      if (is_missing(v)) continue;
      ++present;
      sum += v;
    }
    col.missing_indicator = present < frame.rows();
    if (schema.kind == ColumnKind::kNumeric) {
      if (present > 0) {
        col.mean = sum / static_cast<double>(present);
        double var = 0.0;
        for (double v : frame.values(c)) {
          if (!is_missing(v)) var += (v - col.mean) * (v - col.mean);
        }
        const double sd = std::sqrt(var / static_cast<double>(present));
        col.stddev = sd > 0.0 ? sd : 1.0;
      }
    } else {
      col.categories = schema.categories;
    }
    enc.columns.push_back(std::move(col));
  }
  return enc;
}

MatrixXd encode(const FeatureEncoder& encoder, const TabularFrame& frame) {
  const auto n = static_cast<Eigen::Index>(frame.rows());
  MatrixXd x = MatrixXd::Zero(n, static_cast<Eigen::Index>(encoder.width()));
  Eigen::Index offset = 0;
  for (const auto& col : encoder.columns) {
    const auto found = frame.find_column(col.name);
    require(found.has_value(), ErrorCode::kData, "dataset lacks feature '" + col.name + "'");
    const auto& schema = frame.column(*found);
    const auto values = frame.values(*found);
    if (col.kind == ColumnKind::kNumeric) {
      require(schema.kind == ColumnKind::kNumeric, ErrorCode::kData,
              "feature '" + col.name + "' is not numeric");
      for (Eigen::Index r = 0; r < n; ++r) {
        const double v = values[static_cast<std::size_t>(r)];
        if (is_missing(v)) {
          if (col.missing_indicator) x(r, offset + 1) = 1.0;
        } else {
          x(r, offset) = (v - col.mean) / col.stddev;
        }
      }
      offset += 1;
    } else {
      // Map the frame's category indices onto the encoder's by label.
      std::vector<Eigen::Index> lut(schema.categories.size(), -1);
      for (std::size_t i = 0; i < schema.categories.size(); ++i) {
        const auto it = std::find(col.categories.begin(), col.categories.end(), schema.categories[i]);
        if (it != col.categories.end()) lut[i] = it - col.categories.begin();
      }
      for (Eigen::Index r = 0; r < n; ++r) {
        const double v = values[static_cast<std::size_t>(r)];
        if (is_missing(v)) {
          if (col.missing_indicator) x(r, offset + static_cast<Eigen::Index>(col.categories.size())) = 1.0;
        } else if (schema.kind == ColumnKind::kCategorical) {
          const auto k = lut[static_cast<std::size_t>(v)];
          if (k >= 0) x(r, offset + k) = 1.0;
        }
      }
      offset += static_cast<Eigen::Index>(col.categories.size());
    }
    if (col.missing_indicator) offset += 1;
  }
  return x;
}

MatrixXd encode_features(const TabularFrame& frame) { return encode(fit_encoder(frame), frame); }

AutoencoderModel init_autoencoder(std::size_t input_dim, const AutoencoderConfig& config) {
  require(input_dim >= 1, ErrorCode::kInvalidArgument, "autoencoder needs at least one input");
  const std::size_t d = input_dim;
  const std::size_t h = config.hidden > 0 ? config.hidden : std::min<std::size_t>(64, 2 * d);
  const std::size_t k = config.bottleneck > 0 ? config.bottleneck : std::max<std::size_t>(2, (d + 3) / 4);
  const std::size_t dims[] = {d, h, k, h, d};
  const Activation acts[] = {config.hidden_activation, Activation::kLinear, config.hidden_activation,
                             Activation::kLinear};
  AutoencoderModel model;
  for (std::size_t l = 0; l < 4; ++l) {
    const auto in = static_cast<Eigen::Index>(dims[l]);
    const auto out = static_cast<Eigen::Index>(dims[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    CounterRng rng = CounterRng::stream(config.seed, {kInitStream, l});
    DenseLayer layer;
    layer.weight.resize(out, in);
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) layer.weight(r, c) = limit * (2.0 * rng.uniform() - 1.0);
    }
    layer.bias = VectorXd::Zero(out);
    layer.activation = acts[l];
    model.layers.push_back(std::move(layer));
  }
  return model;
}

std::vector<LayerGradient> loss_gradient(const AutoencoderModel& model, const MatrixXd& x,
                                         double* loss) {
  const auto f = forward(model, x, model.layers.size());
  const MatrixXd& out = f.a.back();
  if (loss != nullptr) *loss = mse(out, x);
  std::vector<LayerGradient> grads(model.layers.size());
  MatrixXd da = 2.0 * (out - x) / static_cast<double>(std::max<Eigen::Index>(x.size(), 1));
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const auto& layer = model.layers[l];
    MatrixXd dz = da;
    if (layer.activation == Activation::kRelu) {
      dz = dz.cwiseProduct((f.z[l].array() > 0.0).cast<double>().matrix());
    }
    grads[l].weight = dz.transpose() * f.a[l];
    grads[l].bias = dz.colwise().sum().transpose();
    if (l > 0) da = dz * layer.weight;
  }
  return grads;
}

MatrixXd reconstruct(const AutoencoderModel& model, const MatrixXd& x) {
  return forward(model, x, model.layers.size()).a.back();
}

MatrixXd embed(const AutoencoderModel& model, const MatrixXd& x) {
  return forward(model, x, 2).a.back();
}

double reconstruction_loss(const AutoencoderModel& model, const MatrixXd& x) {
  return mse(reconstruct(model, x), x);
}

AutoencoderModel train_autoencoder(const MatrixXd& x, const AutoencoderConfig& config) {
  require(config.epochs >= 1, ErrorCode::kInvalidArgument, "epochs must be >= 1");
  require(config.batch_size >= 1, ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  require(config.learning_rate > 0.0, ErrorCode::kInvalidArgument, "learning_rate must be positive");
  require(x.rows() > 0, ErrorCode::kInvalidArgument, "autoencoder needs at least one row");
  AutoencoderModel model = init_autoencoder(static_cast<std::size_t>(x.cols()), config);
  model.initial_loss = reconstruction_loss(model, x);
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::size_t> order(n);
  MatrixXd batch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng = CounterRng::stream(config.seed, {kShuffleStream, epoch});
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      batch.resize(static_cast<Eigen::Index>(stop - start), x.cols());
      for (std::size_t i = start; i < stop; ++i) {
        batch.row(static_cast<Eigen::Index>(i - start)) = x.row(static_cast<Eigen::Index>(order[i]));
      }
      const auto grads = loss_gradient(model, batch);
      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        model.layers[l].weight -= config.learning_rate * grads[l].weight;
        model.layers[l].bias -= config.learning_rate * grads[l].bias;
      }
    }
    const double loss = reconstruction_loss(model, x);
    require(std::isfinite(loss), ErrorCode::kNumeric,
            "autoencoder loss became non-finite at epoch " + std::to_string(epoch + 1));
    const double previous = model.epoch_loss.empty() ? model.initial_loss : model.epoch_loss.back();
    if (config.learning_rate <= 1e-3 && loss > previous * (1.0 + config.monotone_tolerance)) {
      fail(ErrorCode::kNumeric, "autoencoder loss rose from " + format_double(previous) + " to " +
                                    format_double(loss) + " at epoch " + std::to_string(epoch + 1) +
                                    " (learning_rate " + format_double(config.learning_rate) + ")");
    }
    model.epoch_loss.push_back(loss);
  }
  return model;
}

GradientCheckResult gradient_check(const AutoencoderModel& model, const MatrixXd& x) {
  constexpr double kStep = 1e-5;
  constexpr double kFloor = 1e-6;
  GradientCheckResult result;
  const auto analytic = loss_gradient(model, x);
  const auto base_mask = relu_masks(model, x);
  AutoencoderModel probe = model;

  auto check = [&](double& param, double grad) {
    const double saved = param;
    param = saved + kStep;
    const double up = reconstruction_loss(probe, x);
    const bool up_same = relu_masks(probe, x) == base_mask;
    param = saved - kStep;
    const double down = reconstruction_loss(probe, x);
    const bool down_same = relu_masks(probe, x) == base_mask;
    param = saved;
    if (!up_same || !down_same) {
      ++result.skipped;
      return;
    }
    const double numeric = (up - down) / (2.0 * kStep);
    const double denom = std::max({std::abs(grad), std::abs(numeric), kFloor});
    result.max_relative_error = std::max(result.max_relative_error, std::abs(grad - numeric) / denom);
    ++result.checked;
  };

  for (std::size_t l = 0; l < probe.layers.size(); ++l) {
    auto& layer = probe.layers[l];
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) check(layer.weight(r, c), analytic[l].weight(r, c));
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) check(layer.bias(r), analytic[l].bias(r));
  }
  return result;
}

VectorXd head_proba(const LogisticHead& head, const MatrixXd& z) {
  VectorXd p = z * head.weight;
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = stable_sigmoid(p(i) + head.bias);
  return p;
}

double head_loss(const LogisticHead& head, const MatrixXd& z, std::span<const std::uint8_t> y,
                 double l2) {
  const VectorXd s = z * head.weight;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double m = (y[static_cast<std::size_t>(i)] ? -1.0 : 1.0) * (s(i) + head.bias);
    loss += m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
  }
  return loss / static_cast<double>(s.size()) + 0.5 * l2 * head.weight.squaredNorm();
}

LogisticHead fit_head(const MatrixXd& z, std::span<const std::uint8_t> y, double l2) {
  require(static_cast<std::size_t>(z.rows()) == y.size(), ErrorCode::kInvalidArgument,
          "embedding rows differ from label count");
  require(l2 >= 0.0, ErrorCode::kInvalidArgument, "l2 must be >= 0");
  const std::size_t pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  require(pos > 0 && pos < y.size(), ErrorCode::kData, "head labels need both classes");
  const double n = static_cast<double>(y.size());
  const auto k = z.cols();

  // Block-diagonal steps: any PSD Hessian [[A, B], [B', C]] is bounded by
  // 2 diag(A, C), so halving each block's own Lipschitz step is safe. The
  // unpenalized bias keeps a large step even when l2 dominates the weights.
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(z.transpose() * z, Eigen::EigenvaluesOnly);
  const double lipschitz_w = 0.25 * (k > 0 ? eig.eigenvalues().maxCoeff() : 0.0) / n + l2;
  const double step_w = 0.5 / std::max(lipschitz_w, 1e-12);
  const double step_b = 0.5 / 0.25;

  LogisticHead head;
  head.weight = VectorXd::Zero(k);
  VectorXd yv(z.rows());
  for (Eigen::Index i = 0; i < yv.size(); ++i) yv(i) = y[static_cast<std::size_t>(i)];
  for (head.iterations = 0; head.iterations < 10000; ++head.iterations) {
    const VectorXd r = head_proba(head, z) - yv;
    const VectorXd gw = z.transpose() * r / n + l2 * head.weight;
    const double gb = r.sum() / n;
    head.gradient_norm = std::sqrt(gw.squaredNorm() + gb * gb);
    if (head.gradient_norm <= 1e-6) break;
    head.weight -= step_w * gw;
    head.bias -= step_b * gb;
  }
  return head;
}

std::vector<double> probabilities_to_init_scores(std::span<const double> p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = std::clamp(p[i], kInitProbClamp, 1.0 - kInitProbClamp);
    out[i] = std::log(q / (1.0 - q));
  }
  return out;
}

InitScorePipeline train_pipeline_on_rows(const TabularFrame& unlabeled, const TabularFrame& labeled,
                                         std::span<const std::size_t> label_rows,
                                         const PretrainConfig& config) {
  InitScorePipeline p;
  p.config = config;
  p.encoder = fit_encoder(unlabeled);
  p.autoencoder = train_autoencoder(encode(p.encoder, unlabeled), config.autoencoder);
  p.labeled_rows.assign(label_rows.begin(), label_rows.end());
  const TabularFrame subset = labeled.subset(label_rows);
  const MatrixXd z = embed(p.autoencoder, encode(p.encoder, subset));
  p.head = fit_head(z, subset.target(), config.head_l2);
  return p;
}

InitScorePipeline train_pipeline(const TabularFrame& unlabeled, const TabularFrame& labeled,
                                 const PretrainConfig& config) {
  std::size_t n_labels = config.n_labels;
  if (n_labels == 0) {
    n_labels = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::llround(config.label_fraction * static_cast<double>(labeled.rows()))));
  }
  const auto rows = stratified_label_subset(labeled, n_labels, config.label_subset_seed);
  return train_pipeline_on_rows(unlabeled, labeled, rows, config);
}

std::vector<double> head_probabilities(const InitScorePipeline& pipeline, const TabularFrame& frame) {
  const VectorXd p = head_proba(pipeline.head, embed(pipeline.autoencoder, encode(pipeline.encoder, frame)));
  return std::vector<double>(p.data(), p.data() + p.size());
}

std::vector<double> make_init_scores(const InitScorePipeline& pipeline, const TabularFrame& frame) {
  return probabilities_to_init_scores(head_probabilities(pipeline, frame));
}

json pipeline_to_json(const InitScorePipeline& p) {
  json standardization = json::array();
  for (const auto& c : p.encoder.columns) {
    standardization.push_back({{"name", c.name},
                               {"kind", column_kind_name(c.kind)},
                               {"mean", c.mean},
                               {"stddev", c.stddev},
                               {"categories", c.categories},
                               {"missing_indicator", c.missing_indicator}});
  }
  json dims = json::array({p.autoencoder.input_dim()});
  json layers = json::array();
  for (const auto& l : p.autoencoder.layers) {
    dims.push_back(l.weight.rows());
    layers.push_back({{"weight", matrix_to_json(l.weight)},
                      {"bias", vector_to_json(l.bias)},
                      {"activation", l.activation == Activation::kRelu ? "relu" : "linear"}});
  }
  const auto& ac = p.config.autoencoder;
  return json{
      {"standardization", standardization},
      {"layer_dims", dims},
      {"layers", layers},
      {"initial_loss", p.autoencoder.initial_loss},
      {"epoch_loss", p.autoencoder.epoch_loss},
      {"head", {{"weight", vector_to_json(p.head.weight)},
                {"bias", p.head.bias},
                {"iterations", p.head.iterations},
                {"gradient_norm", p.head.gradient_norm}}},
      {"config", {{"hidden", ac.hidden},
                  {"bottleneck", ac.bottleneck},
                  {"epochs", ac.epochs},
                  {"batch_size", ac.batch_size},
                  {"learning_rate", ac.learning_rate},
                  {"hidden_activation", ac.hidden_activation == Activation::kRelu ? "relu" : "linear"},
                  {"monotone_tolerance", ac.monotone_tolerance},
                  {"head_l2", p.config.head_l2},
                  {"n_labels", p.config.n_labels},
                  {"label_fraction", p.config.label_fraction}}},
      {"seeds", {{"autoencoder", ac.seed}, {"label_subset", p.config.label_subset_seed}}},
      {"labeled_rows", p.labeled_rows}};
}

InitScorePipeline pipeline_from_json(const json& j) {
  try {
    InitScorePipeline p;
    for (const auto& c : j.at("standardization")) {
      FeatureEncoder::Column col;
      col.name = c.at("name").get<std::string>();
      col.kind = parse_column_kind(c.at("kind").get<std::string>());
      col.mean = c.at("mean").get<double>();
      col.stddev = c.at("stddev").get<double>();
      col.categories = c.at("categories").get<std::vector<std::string>>();
      col.missing_indicator = c.at("missing_indicator").get<bool>();
      p.encoder.columns.push_back(std::move(col));
    }
    for (const auto& l : j.at("layers")) {
      DenseLayer layer;
      layer.weight = matrix_from_json(l.at("weight"));
      layer.bias = vector_from_json(l.at("bias"));
      layer.activation = l.at("activation").get<std::string>() == "relu" ? Activation::kRelu
                                                                         : Activation::kLinear;
      p.autoencoder.layers.push_back(std::move(layer));
    }
    require(p.autoencoder.layers.size() == 4, ErrorCode::kData, "autoencoder must have 4 layers");
    p.autoencoder.initial_loss = j.at("initial_loss").get<double>();
    p.autoencoder.epoch_loss = j.at("epoch_loss").get<std::vector<double>>();
    const auto& h = j.at("head");
    p.head.weight = vector_from_json(h.at("weight"));
    p.head.bias = h.at("bias").get<double>();
    p.head.iterations = h.at("iterations").get<std::size_t>();
    p.head.gradient_norm = h.at("gradient_norm").get<double>();
    require(static_cast<std::size_t>(p.head.weight.size()) == p.autoencoder.bottleneck_dim(),
            ErrorCode::kData, "head input dimension differs from the bottleneck");
    const auto& c = j.at("config");
    auto& ac = p.config.autoencoder;
    ac.hidden = c.at("hidden").get<std::size_t>();
    ac.bottleneck = c.at("bottleneck").get<std::size_t>();
    ac.epochs = c.at("epochs").get<std::size_t>();
    ac.batch_size = c.at("batch_size").get<std::size_t>();
    ac.learning_rate = c.at("learning_rate").get<double>();
    ac.hidden_activation = c.at("hidden_activation").get<std::string>() == "relu" ? Activation::kRelu
                                                                                 : Activation::kLinear;
    ac.monotone_tolerance = c.at("monotone_tolerance").get<double>();
    p.config.head_l2 = c.at("head_l2").get<double>();
    p.config.n_labels = c.at("n_labels").get<std::size_t>();
    p.config.label_fraction = c.at("label_fraction").get<double>();
    ac.seed = j.at("seeds").at("autoencoder").get<std::uint64_t>();
    p.config.label_subset_seed = j.at("seeds").at("label_subset").get<std::uint64_t>();
    p.labeled_rows = j.at("labeled_rows").get<std::vector<std::size_t>>();
    return p;
  } catch (const json::exception& e) {
    fail(ErrorCode::kData, std::string("malformed pipeline JSON: ") + e.what());
  }
}

std::string init_scores_to_csv(std::span<const double> scores) {
  std::string out = "init_score\n";
  for (double s : scores) out += format_double(s) + '\n';
  return out;
}

std::vector<double> init_scores_from_csv(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == "init_score") continue;
    }
    double v = 0.0;
    const auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    require(ec == std::errc() && p == line.data() + line.size() && std::isfinite(v), ErrorCode::kData,
            "bad init score '" + std::string(line) + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace glassboost
