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

#ifndef GLASSBOOST_SRC_TREE_HPP_
#define GLASSBOOST_SRC_TREE_HPP_

#include <cstddef>
#include <vector>

namespace glassboost::detail {

// Gradient/hessian/count sums over a term's bin grid (1-D or 2-D, row-major).
struct Histogram {
  std::vector<std::size_t> dims;
  std::vector<double> grad;
  std::vector<double> hess;
  std::vector<double> count;

  void reset(const std::vector<std::size_t>& shape);
  std::size_t cells() const { return grad.size(); }
};

struct TreeParams {
  std::size_t max_leaves = 3;
  double learning_rate = 0.01;
  double min_samples_leaf = 1.0;
  // Bound on |G/H| of a leaf before scaling by the learning rate.
  double max_newton_step = 5.0;
};

struct TreeUpdate {
  std::vector<double> delta;  // per histogram cell
  double gain = 0.0;          // sum over leaves of G^2/H
  std::size_t leaves = 0;
};

// Grows an axis-aligned regression tree over the histogram best-first until
// max_leaves leaves or no split with positive gain remains. Leaves take the
// scaled Newton step -learning_rate * G/H. For 2-D grids the root split is
// chosen with one level of lookahead so that XOR-like cells are reachable.
TreeUpdate fit_tree(const Histogram& hist, const TreeParams& params);

inline double leaf_score(double g, double h) { return h > 1e-16 ? g * g / h : 0.0; }

}  // namespace glassboost::detail

#endif  // GLASSBOOST_SRC_TREE_HPP_
