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

#ifndef GLASSBOOST_MODEL_IO_HPP_
#define GLASSBOOST_MODEL_IO_HPP_

#include <filesystem>
#include <string>

#include "glassboost/ebm.hpp"
#include "json.hpp"

namespace glassboost {

inline constexpr int kModelSchemaVersion = 1;

nlohmann::json hyperparams_to_json(const EbmHyperparams& hp);
// Keys absent from `j` keep the value they have in `base`.
EbmHyperparams hyperparams_from_json(const nlohmann::json& j, EbmHyperparams base = {});

nlohmann::json bin_to_json(const BinDefinition& bin);
BinDefinition bin_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const EbmModel& model);
EbmModel model_from_json(const nlohmann::json& j);

// The serialized model minus wall-clock fields (timestamps, fit time); two
// fits with the same inputs produce identical payloads.
std::string model_payload(const EbmModel& model);

void save_model(const EbmModel& model, const std::filesystem::path& path);
EbmModel load_model(const std::filesystem::path& path);

// Whole-file helpers shared by the persistence code.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace glassboost

#endif  // GLASSBOOST_MODEL_IO_HPP_
