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

#ifndef GLASSBOOST_EXPLAIN_HPP_
#define GLASSBOOST_EXPLAIN_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "glassboost/ebm.hpp"
#include "json.hpp"

namespace glassboost {

struct TermImportance {
  std::size_t term = 0;
  std::string name;
  double importance = 0.0;  // mean |contribution| over the reference rows
  std::size_t rank = 0;     // 1 = most important
};

// Entries are in term order; ranks sort by importance, ties by term order.
struct GlobalExplanation {
  std::vector<TermImportance> entries;

  const TermImportance& find(std::string_view name) const;  // throws on unknown names
};

GlobalExplanation explain_global(const EbmModel& model, const TabularFrame& reference);

struct LocalExplanation {
  double intercept = 0.0;
  std::vector<double> contributions;  // per term
  double total = 0.0;                 // intercept + contributions, summed in term order
};

LocalExplanation explain_local(const EbmModel& model, const BinnedFrame& binned, std::size_t row);
LocalExplanation explain_local(const EbmModel& model, const TabularFrame& frame, std::size_t row);

// One bin (main effect) or grid cell (pair) of a term's shape function.
// Numeric edges are (lower, upper]; NaN for the missing bin and categoricals.
struct ShapeCell {
  std::vector<std::size_t> bins;
  std::vector<std::string> labels;
  std::vector<double> lower;
  std::vector<double> upper;
  double score = 0.0;
  double density = 0.0;  // training rows in the cell
};

struct ShapeFunction {
  std::string term;
  std::vector<std::string> features;
  std::vector<std::size_t> shape;
  std::vector<ShapeCell> cells;  // row-major over the grid
};

ShapeFunction export_shape_function(const EbmModel& model, std::string_view term);

nlohmann::json to_json(const GlobalExplanation& global);
nlohmann::json to_json(const ShapeFunction& shape);
// {"global": [...], "shapes": [...]}
nlohmann::json explanation_json(const EbmModel& model, const GlobalExplanation& global);
// Long-format CSV of every shape cell: term,bin_x,bin_y,label_x,label_y,lower_x,upper_x,lower_y,upper_y,score,density
std::string shapes_to_csv(const EbmModel& model);

}  // namespace glassboost

#endif  // GLASSBOOST_EXPLAIN_HPP_
