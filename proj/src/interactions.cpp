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

#include <algorithm>
#include <cmath>

#include "glassboost/ebm.hpp"
#include "glassboost/error.hpp"
#include "interactions_internal.hpp"
#include "tree.hpp"

namespace glassboost {
namespace detail {
namespace {

struct Cell {
  double g = 0.0;
  double h = 0.0;
  double n = 0.0;
};

double pair_gain(const std::vector<std::uint16_t>& bx, const std::vector<std::uint16_t>& by,
                 std::size_t nx, std::size_t ny, std::span<const double> grad,
                 std::span<const double> hess, double min_samples) {
  // prefix[(x)*(ny+1) + y] = sums over cells with bin_x < x and bin_y < y.
  const std::size_t stride = ny + 1;
  std::vector<Cell> prefix((nx + 1) * stride);
  for (std::size_t r = 0; r < grad.size(); ++r) {
    Cell& c = prefix[(bx[r] + 1) * stride + by[r] + 1];
    c.g += grad[r];
    c.h += hess[r];
    c.n += 1.0;
  }
  for (std::size_t x = 1; x <= nx; ++x) {
    for (std::size_t y = 1; y <= ny; ++y) {
      Cell& c = prefix[x * stride + y];
      const Cell& up = prefix[(x - 1) * stride + y];
      const Cell& left = prefix[x * stride + y - 1];
      const Cell& diag = prefix[(x - 1) * stride + y - 1];
      c.g += up.g + left.g - diag.g;
      c.h += up.h + left.h - diag.h;
      c.n += up.n + left.n - diag.n;
    }
  }
  const Cell total = prefix[nx * stride + ny];
  const double parent = leaf_score(total.g, total.h);
  double best = 0.0;
  for (std::size_t a = 1; a < nx; ++a) {
    const Cell col = prefix[a * stride + ny];  // x < a, all y
    for (std::size_t b = 1; b < ny; ++b) {
      const Cell q00 = prefix[a * stride + b];
      const Cell row = prefix[nx * stride + b];  // all x, y < b
      const Cell q01{col.g - q00.g, col.h - q00.h, col.n - q00.n};
      const Cell q10{row.g - q00.g, row.h - q00.h, row.n - q00.n};
      const Cell q11{total.g - col.g - q10.g, total.h - col.h - q10.h, total.n - col.n - q10.n};
      if (q00.n < min_samples || q01.n < min_samples || q10.n < min_samples ||
          q11.n < min_samples) {
        continue;
      }
      const double gain = leaf_score(q00.g, q00.h) + leaf_score(q01.g, q01.h) +
                          leaf_score(q10.g, q10.h) + leaf_score(q11.g, q11.h) - parent;
      best = std::max(best, gain);
    }
  }
  return best;
}

}  // namespace

std::vector<FeaturePair> rank_pairs(const std::vector<std::vector<std::uint16_t>>& bins,
                                    const std::vector<std::size_t>& dims,
                                    std::span<const std::uint8_t> y, std::span<const double> raw,
                                    std::size_t k, double min_samples) {
  const std::size_t n = y.size();
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double p = sigmoid(raw[r]);
    grad[r] = p - y[r];
    hess[r] = p * (1.0 - p);
  }
  std::vector<FeaturePair> pairs;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    for (std::size_t j = i + 1; j < bins.size(); ++j) {
      pairs.push_back(
          {i, j, pair_gain(bins[i], bins[j], dims[i], dims[j], grad, hess, min_samples)});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const FeaturePair& a, const FeaturePair& b) { return a.gain > b.gain; });
  pairs.resize(std::min(k, pairs.size()));
  return pairs;
}

}  // namespace detail

std::vector<FeaturePair> detect_interactions(const TabularFrame& frame, const EbmModel& main_model,
                                             std::size_t k, std::span<const double> base) {
  require(frame.rows() == 0 || base.empty() || base.size() == frame.rows(),
          ErrorCode::kInvalidArgument, "base length must equal the row count");
  const auto& defs = main_model.pair_bins.empty() ? main_model.bins : main_model.pair_bins;
  std::vector<std::vector<std::uint16_t>> bins;
  std::vector<std::size_t> dims;
  for (const auto& def : defs) {
    bins.push_back(apply_bin(def, frame));
    dims.push_back(def.bin_count());
  }
  const auto raw = raw_scores(main_model, frame, base);
  return detail::rank_pairs(bins, dims, frame.target(), raw, k,
                            static_cast<double>(main_model.hyperparams.min_samples_leaf));
}

}  // namespace glassboost
