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

#include "tree.hpp"

#include <algorithm>
#include <array>
#include <optional>

namespace glassboost::detail {
namespace {

struct Sums {
  double g = 0.0;
  double h = 0.0;
  double n = 0.0;
};

// Half-open rectangle [lo, hi) per axis; 1-D grids use axis 1 = [0, 1).
struct Region {
  std::array<std::size_t, 2> lo{0, 0};
  std::array<std::size_t, 2> hi{1, 1};
};

struct Candidate {
  double gain = 0.0;
  std::size_t axis = 0;
  std::size_t pos = 0;  // first index of the right child along axis
};

class Grid {
 public:
  // Builds inclusive 2-D prefix sums so any rectangle sum is O(1).
  explicit Grid(const Histogram& hist)
      : nx_(hist.dims[0]),
        ny_(hist.dims.size() > 1 ? hist.dims[1] : 1),
        two_d_(hist.dims.size() > 1),
        prefix_((nx_ + 1) * (ny_ + 1)) {
    const std::size_t stride = ny_ + 1;
    for (std::size_t x = 0; x < nx_; ++x) {
      Sums row;
      for (std::size_t y = 0; y < ny_; ++y) {
        const std::size_t c = x * ny_ + y;
        row.g += hist.grad[c];
        row.h += hist.hess[c];
        row.n += hist.count[c];
        const Sums& up = prefix_[x * stride + y + 1];
        prefix_[(x + 1) * stride + y + 1] = Sums{up.g + row.g, up.h + row.h, up.n + row.n};
      }
    }
  }

  Region full() const { return Region{{0, 0}, {nx_, ny_}}; }
  bool two_dimensional() const { return two_d_; }
  std::size_t ny() const { return ny_; }

  Sums sum(const Region& r) const {
    const std::size_t stride = ny_ + 1;
    const Sums& a = prefix_[r.hi[0] * stride + r.hi[1]];
    const Sums& b = prefix_[r.lo[0] * stride + r.hi[1]];
    const Sums& c = prefix_[r.hi[0] * stride + r.lo[1]];
    const Sums& d = prefix_[r.lo[0] * stride + r.lo[1]];
    return Sums{a.g - b.g - c.g + d.g, a.h - b.h - c.h + d.h, a.n - b.n - c.n + d.n};
  }

  std::optional<Candidate> best_split(const Region& r, double min_samples) const {
    std::optional<Candidate> best;
    const Sums total = sum(r);
    const double parent = leaf_score(total.g, total.h);
    const std::size_t axes = two_d_ ? 2 : 1;
    for (std::size_t axis = 0; axis < axes; ++axis) {
      for (std::size_t pos = r.lo[axis] + 1; pos < r.hi[axis]; ++pos) {
        Region left = r;
        left.hi[axis] = pos;
        const Sums ls = sum(left);
        const double rn = total.n - ls.n;
        if (ls.n < min_samples || rn < min_samples) continue;
        const double gain =
            leaf_score(ls.g, ls.h) + leaf_score(total.g - ls.g, total.h - ls.h) - parent;
        if (!best || gain > best->gain) best = Candidate{gain, axis, pos};
      }
    }
    return best;
  }

  static std::pair<Region, Region> divide(const Region& r, const Candidate& c) {
    Region left = r;
    Region right = r;
    left.hi[c.axis] = c.pos;
    right.lo[c.axis] = c.pos;
    return {left, right};
  }

 private:
  std::size_t nx_;
  std::size_t ny_;
  bool two_d_;
  std::vector<Sums> prefix_;
};

// Root split for 2-D grids, scored by its own gain plus the best follow-up
// split(s) the leaf budget allows.
std::optional<Candidate> lookahead_root(const Grid& grid, const Region& root,
                                        const TreeParams& params) {
  std::optional<Candidate> best;
  double best_score = 0.0;
  const Sums total = grid.sum(root);
  const double parent = leaf_score(total.g, total.h);
  for (std::size_t axis = 0; axis < 2; ++axis) {
    for (std::size_t pos = root.lo[axis] + 1; pos < root.hi[axis]; ++pos) {
      const Candidate c{0.0, axis, pos};
      auto [left, right] = Grid::divide(root, c);
      const Sums ls = grid.sum(left);
      const Sums rs = grid.sum(right);
      if (ls.n < params.min_samples_leaf || rs.n < params.min_samples_leaf) continue;
      const double gain = leaf_score(ls.g, ls.h) + leaf_score(rs.g, rs.h) - parent;
      const auto lbest = grid.best_split(left, params.min_samples_leaf);
      const auto rbest = grid.best_split(right, params.min_samples_leaf);
      const double lg = lbest ? std::max(lbest->gain, 0.0) : 0.0;
      const double rg = rbest ? std::max(rbest->gain, 0.0) : 0.0;
      const double follow = params.max_leaves >= 4 ? lg + rg : std::max(lg, rg);
      const double score = gain + follow;
      if (!best || score > best_score) {
        best = Candidate{gain, axis, pos};
        best_score = score;
      }
    }
  }
  if (best && best_score <= 0.0) return std::nullopt;
  return best;
}

}  // namespace

void Histogram::reset(const std::vector<std::size_t>& shape) {
  dims = shape;
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  grad.assign(n, 0.0);
  hess.assign(n, 0.0);
  count.assign(n, 0.0);
}

TreeUpdate fit_tree(const Histogram& hist, const TreeParams& params) {
  const Grid grid(hist);
  struct Leaf {
    Region region;
    std::optional<Candidate> split;
  };
  std::vector<Leaf> leaves;
  const Region root = grid.full();

  if (params.max_leaves >= 2) {
    std::optional<Candidate> first = grid.two_dimensional() && params.max_leaves >= 3
                                         ? lookahead_root(grid, root, params)
                                         : grid.best_split(root, params.min_samples_leaf);
    if (first && (grid.two_dimensional() || first->gain > 0.0)) {
      auto [l, r] = Grid::divide(root, *first);
      leaves.push_back({l, grid.best_split(l, params.min_samples_leaf)});
      leaves.push_back({r, grid.best_split(r, params.min_samples_leaf)});
    } else {
      leaves.push_back({root, std::nullopt});
    }
  } else {
    leaves.push_back({root, std::nullopt});
  }

  while (leaves.size() < params.max_leaves) {
    std::size_t pick = leaves.size();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (!leaves[i].split || leaves[i].split->gain <= 0.0) continue;
      if (pick == leaves.size() || leaves[i].split->gain > leaves[pick].split->gain) pick = i;
    }
    if (pick == leaves.size()) break;
    const Candidate c = *leaves[pick].split;
    auto [l, r] = Grid::divide(leaves[pick].region, c);
    leaves[pick] = {l, grid.best_split(l, params.min_samples_leaf)};
    leaves.push_back({r, grid.best_split(r, params.min_samples_leaf)});
  }

  TreeUpdate update;
  update.delta.assign(hist.cells(), 0.0);
  update.leaves = leaves.size();
  const std::size_t ny = grid.ny();
  for (const auto& leaf : leaves) {
    const Sums s = grid.sum(leaf.region);
    update.gain += leaf_score(s.g, s.h);
    double step = s.h > 1e-16 ? -s.g / s.h : 0.0;
    step = std::clamp(step, -params.max_newton_step, params.max_newton_step);
    const double value = params.learning_rate * step;
    for (std::size_t x = leaf.region.lo[0]; x < leaf.region.hi[0]; ++x) {
      for (std::size_t y = leaf.region.lo[1]; y < leaf.region.hi[1]; ++y) {
        update.delta[x * ny + y] = value;
      }
    }
  }
  return update;
}

}  // namespace glassboost::detail
