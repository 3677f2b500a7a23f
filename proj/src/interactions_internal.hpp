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

#ifndef GLASSBOOST_SRC_INTERACTIONS_INTERNAL_HPP_
#define GLASSBOOST_SRC_INTERACTIONS_INTERNAL_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "glassboost/ebm.hpp"

namespace glassboost::detail {

// Scores every feature pair by the best four-quadrant split of the logistic
// gradients at `raw` and returns the top k (gain desc, then index order).
std::vector<FeaturePair> rank_pairs(const std::vector<std::vector<std::uint16_t>>& bins,
                                    const std::vector<std::size_t>& dims,
                                    std::span<const std::uint8_t> y, std::span<const double> raw,
                                    std::size_t k, double min_samples);

}  // namespace glassboost::detail

#endif  // GLASSBOOST_SRC_INTERACTIONS_INTERNAL_HPP_
