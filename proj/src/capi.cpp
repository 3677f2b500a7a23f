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

#include "glassboost/glassboost.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "glassboost/error.hpp"
#include "glassboost/explain.hpp"
#include "glassboost/metrics.hpp"
#include "glassboost/model_io.hpp"
#include "glassboost/pipeline.hpp"

struct gb_frame {
  glassboost::TabularFrame frame;
};

struct gb_model {
  glassboost::EbmModel model;
};

namespace {

using glassboost::ErrorCode;
using nlohmann::json;

thread_local std::string g_last_error;

gb_status to_status(ErrorCode code) { return static_cast<gb_status>(static_cast<int>(code)); }

// Runs fn, translating exceptions into a status and the thread's last error.
template <typename Fn>
gb_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    fn();
    return GB_OK;
  } catch (const glassboost::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    g_last_error = std::string("malformed JSON: ") + e.what();
    return GB_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return GB_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  glassboost::require(p != nullptr, ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_or_empty(const char* text) {
  if (text == nullptr || *text == '\0') return json::object();
  return json::parse(text);
}

glassboost::CsvLoadOptions csv_options(const char* options_json) {
  const json j = parse_or_empty(options_json);
  glassboost::require(j.is_object(), ErrorCode::kConfig, "frame options must be a JSON object");
  glassboost::CsvLoadOptions o;
  for (const auto& [key, value] : j.items()) {
    if (key == "target") {
      o.target_column = value.get<std::string>();
    } else if (key == "sensitive") {
      if (!value.is_null()) o.sensitive_column = value.get<std::string>();
    } else if (key == "positive_labels") {
      o.positive_labels = value.get<std::vector<std::string>>();
    } else if (key == "drop_columns") {
      o.drop_columns = value.get<std::vector<std::string>>();
    } else if (key == "kinds") {
      for (const auto& [col, kind] : value.items()) {
        o.kind_overrides[col] = glassboost::parse_column_kind(kind.get<std::string>());
      }
    } else {
      glassboost::fail(ErrorCode::kConfig, "unknown frame option '" + key + "'");
    }
  }
  glassboost::require(!o.target_column.empty(), ErrorCode::kConfig, "frame options need 'target'");
  return o;
}

std::span<const double> optional_span(const double* p, std::size_t n, std::size_t rows,
                                      const char* what) {
  if (p == nullptr) return {};
  glassboost::require(n == rows, ErrorCode::kInvalidArgument,
                      std::string(what) + " length " + std::to_string(n) + " != rows " +
                          std::to_string(rows));
  return {p, n};
}

}  // namespace

extern "C" {

GB_API const char* gb_version(void) { return "0.1.0"; }

GB_API const char* gb_status_name(gb_status status) {
  if (status == GB_OK) return "ok";
  return glassboost::error_code_name(static_cast<ErrorCode>(static_cast<int>(status)));
}

GB_API const char* gb_last_error(void) { return g_last_error.c_str(); }

GB_API void gb_string_free(char* s) { std::free(s); }

GB_API gb_status gb_frame_load_csv(const char* path, const char* options_json, gb_frame** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new gb_frame{glassboost::load_csv(path, csv_options(options_json))};
  });
}

GB_API gb_status gb_frame_parse_csv(const char* text, const char* options_json, gb_frame** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new gb_frame{glassboost::parse_csv(text, csv_options(options_json))};
  });
}

GB_API gb_status gb_frame_shape(const gb_frame* frame, size_t* rows, size_t* cols) {
  return guarded([&] {
    need(frame, "frame");
    if (rows != nullptr) *rows = frame->frame.rows();
    if (cols != nullptr) *cols = frame->frame.cols();
  });
}

GB_API gb_status gb_frame_target(const gb_frame* frame, unsigned char* out, size_t n) {
  return guarded([&] {
    need(frame, "frame");
    need(out, "out");
    const auto y = frame->frame.target();
    glassboost::require(n == y.size(), ErrorCode::kInvalidArgument, "output length != rows");
    std::copy(y.begin(), y.end(), out);
  });
}

GB_API void gb_frame_free(gb_frame* frame) { delete frame; }

GB_API gb_status gb_model_fit(const gb_frame* frame, const char* hyperparams_json,
                              const double* init_scores, size_t n_init_scores, int fit_intercept,
                              size_t n_threads, gb_model** out) {
  return guarded([&] {
    need(frame, "frame");
    need(out, "out");
    const glassboost::EbmHyperparams hp =
        glassboost::hyperparams_from_json(parse_or_empty(hyperparams_json), {});
    glassboost::FitOptions fo;
    fo.init_scores = optional_span(init_scores, n_init_scores, frame->frame.rows(), "init_scores");
    fo.fit_intercept = fit_intercept != 0;
    fo.n_threads = n_threads == 0 ? 1 : n_threads;
    *out = new gb_model{glassboost::fit(frame->frame, hp, fo)};
  });
}

GB_API gb_status gb_model_load(const char* path, gb_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new gb_model{glassboost::load_model(path)};
  });
}

GB_API gb_status gb_model_from_json(const char* text, gb_model** out) {
  return guarded([&] {
    need(text, "json");
    need(out, "out");
    *out = new gb_model{glassboost::model_from_json(json::parse(text))};
  });
}

GB_API gb_status gb_model_save(const gb_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    glassboost::save_model(model->model, path);
  });
}

GB_API gb_status gb_model_to_json(const gb_model* model, char** out_json) {
  return guarded([&] {
    need(model, "model");
    need(out_json, "out_json");
    *out_json = dup_string(glassboost::model_to_json(model->model).dump());
  });
}

GB_API gb_status gb_model_term_count(const gb_model* model, size_t* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = model->model.terms.size();
  });
}

GB_API gb_status gb_model_intercept(const gb_model* model, double* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = model->model.intercept;
  });
}

GB_API gb_status gb_model_predict_proba(const gb_model* model, const gb_frame* frame,
                                        const double* base, size_t n_base, double* out,
                                        size_t n_out) {
  return guarded([&] {
    need(model, "model");
    need(frame, "frame");
    need(out, "out");
    const std::size_t rows = frame->frame.rows();
    glassboost::require(n_out == rows, ErrorCode::kInvalidArgument, "output length != rows");
    const auto p = glassboost::predict_proba(model->model, frame->frame,
                                             optional_span(base, n_base, rows, "base"));
    std::copy(p.begin(), p.end(), out);
  });
}

GB_API gb_status gb_model_raw_scores(const gb_model* model, const gb_frame* frame,
                                     const double* base, size_t n_base, double* out,
                                     size_t n_out) {
  return guarded([&] {
    need(model, "model");
    need(frame, "frame");
    need(out, "out");
    const std::size_t rows = frame->frame.rows();
    glassboost::require(n_out == rows, ErrorCode::kInvalidArgument, "output length != rows");
    const auto s = glassboost::raw_scores(model->model, frame->frame,
                                          optional_span(base, n_base, rows, "base"));
    std::copy(s.begin(), s.end(), out);
  });
}

GB_API gb_status gb_model_explain_global(const gb_model* model, const gb_frame* reference,
                                         char** out_json) {
  return guarded([&] {
    need(model, "model");
    need(reference, "reference");
    need(out_json, "out_json");
    const auto g = glassboost::explain_global(model->model, reference->frame);
    *out_json = dup_string(glassboost::to_json(g).dump());
  });
}

GB_API void gb_model_free(gb_model* model) { delete model; }

GB_API gb_status gb_roc_auc(const unsigned char* y, const double* p, size_t n, double* out) {
  return guarded([&] {
    need(y, "y");
    need(p, "p");
    need(out, "out");
    *out = glassboost::roc_auc({y, n}, {p, n});
  });
}

GB_API gb_status gb_run_command(const char* command, const char* config_json, gb_log_fn log,
                                void* user_data, char** result_json) {
  return guarded([&] {
    need(command, "command");
    const glassboost::RunConfig config = glassboost::run_config_from_json(parse_or_empty(config_json));
    glassboost::LogSink sink;
    if (log != nullptr) sink = [log, user_data](const std::string& line) { log(line.c_str(), user_data); };
    const json result = glassboost::run_command(command, config, sink);
    if (result_json != nullptr) *result_json = dup_string(result.dump());
  });
}

GB_API gb_status gb_resolve_config(const char* config_json, char** out_json) {
  return guarded([&] {
    need(out_json, "out_json");
    const auto config = glassboost::run_config_from_json(parse_or_empty(config_json));
    *out_json = dup_string(glassboost::run_config_to_json(config).dump());
  });
}

}  // extern "C"
