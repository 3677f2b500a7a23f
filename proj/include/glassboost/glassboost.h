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

/* C interface to the glassboost shared library.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a gb_status; on
 * failure gb_last_error() describes the problem (per thread, valid until the
 * next call on that thread). Strings returned through char** out-parameters
 * are heap-allocated and must be released with gb_string_free.
 */
#ifndef GLASSBOOST_GLASSBOOST_H_
#define GLASSBOOST_GLASSBOOST_H_

#include <stddef.h>

#if defined(_WIN32)
#  if defined(GLASSBOOST_BUILDING_LIBRARY)
#    define GB_API __declspec(dllexport)
#  else
#    define GB_API __declspec(dllimport)
#  endif
#else
#  define GB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gb_status {
  GB_OK = 0,
  GB_ERR_INVALID_ARGUMENT = 1,
  GB_ERR_IO = 2,
  GB_ERR_DATA = 3,
  GB_ERR_CONFIG = 4,
  GB_ERR_NUMERIC = 5,
  GB_ERR_INTERNAL = 6
} gb_status;

typedef struct gb_frame gb_frame;
typedef struct gb_model gb_model;

/* Receives progress lines from long-running commands. */
typedef void (*gb_log_fn)(const char* line, void* user_data);

GB_API const char* gb_version(void);
GB_API const char* gb_status_name(gb_status status);
GB_API const char* gb_last_error(void);
GB_API void gb_string_free(char* s);

/* options_json may be NULL or an object with keys target (required),
 * sensitive, positive_labels, drop_columns, kinds. */
GB_API gb_status gb_frame_load_csv(const char* path, const char* options_json, gb_frame** out);
GB_API gb_status gb_frame_parse_csv(const char* text, const char* options_json, gb_frame** out);
GB_API gb_status gb_frame_shape(const gb_frame* frame, size_t* rows, size_t* cols);
GB_API gb_status gb_frame_target(const gb_frame* frame, unsigned char* out, size_t n);
GB_API void gb_frame_free(gb_frame* frame);

/* hyperparams_json may be NULL (defaults). init_scores may be NULL; otherwise
 * it holds one log-odds offset per frame row. */
GB_API gb_status gb_model_fit(const gb_frame* frame, const char* hyperparams_json,
                              const double* init_scores, size_t n_init_scores,
                              int fit_intercept, size_t n_threads, gb_model** out);
GB_API gb_status gb_model_load(const char* path, gb_model** out);
GB_API gb_status gb_model_from_json(const char* json, gb_model** out);
GB_API gb_status gb_model_save(const gb_model* model, const char* path);
GB_API gb_status gb_model_to_json(const gb_model* model, char** out_json);
GB_API gb_status gb_model_term_count(const gb_model* model, size_t* out);
GB_API gb_status gb_model_intercept(const gb_model* model, double* out);

/* base may be NULL; out must hold one value per frame row. */
GB_API gb_status gb_model_predict_proba(const gb_model* model, const gb_frame* frame,
                                        const double* base, size_t n_base, double* out,
                                        size_t n_out);
GB_API gb_status gb_model_raw_scores(const gb_model* model, const gb_frame* frame,
                                     const double* base, size_t n_base, double* out,
                                     size_t n_out);
/* Global importances against a reference frame, as a JSON array. */
GB_API gb_status gb_model_explain_global(const gb_model* model, const gb_frame* reference,
                                         char** out_json);
GB_API void gb_model_free(gb_model* model);

GB_API gb_status gb_roc_auc(const unsigned char* y, const double* p, size_t n, double* out);

/* Runs one CLI subcommand (ingest, split, train, tune, pretrain, evaluate,
 * explain, validate, benchmark) with a JSON run configuration. On success
 * *result_json (if non-NULL) receives the command's JSON summary. */
GB_API gb_status gb_run_command(const char* command, const char* config_json, gb_log_fn log,
                                void* user_data, char** result_json);

/* Resolved configuration for config_json (defaults filled in), as JSON. */
GB_API gb_status gb_resolve_config(const char* config_json, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* GLASSBOOST_GLASSBOOST_H_ */
