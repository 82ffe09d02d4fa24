// Copyright 2026 The recbench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include "recbench/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "recbench/error.hpp"
#include "recbench/gp.hpp"
#include "recbench/hpo.hpp"

namespace recbench {

void RegressionTree::fit(const std::vector<std::vector<double>>& x, std::span<const double> y,
                         std::vector<std::size_t> rows, int min_leaf, Rng& rng) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidVector, "regression tree needs at least one row");
  nodes_.clear();
  build(x, y, rows, 0, rows.size(), std::max(1, min_leaf), rng);
}

int RegressionTree::build(const std::vector<std::vector<double>>& x, std::span<const double> y,
                          std::vector<std::size_t>& rows, std::size_t begin, std::size_t end, int min_leaf,
                          Rng& rng) {
  const std::size_t n = end - begin;
  const auto leaf = static_cast<std::size_t>(min_leaf);
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) sum += y[rows[i]];
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  nodes_[id].value = sum / static_cast<double>(n);
  if (n < 2 * leaf) return id;

  const std::size_t d = x[rows[begin]].size();
  std::vector<std::size_t> dims(d);
  std::iota(dims.begin(), dims.end(), 0);
  const std::size_t m = std::max<std::size_t>(1, (d + 1) / 2);
  for (std::size_t i = 0; i < m && i < d; ++i) std::swap(dims[i], dims[i + rng.index(d - i)]);

  // Maximising sum_L^2/n_L + sum_R^2/n_R is the same as minimising SSE.
  double best_score = sum * sum / static_cast<double>(n) + 1e-12 * (1.0 + std::abs(sum));
  int best_dim = -1;
  double best_threshold = 0.0;
  std::vector<std::size_t> sorted(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                  rows.begin() + static_cast<std::ptrdiff_t>(end));
  for (std::size_t i = 0; i < m && i < d; ++i) {
    const std::size_t dim = dims[i];
    std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
      return x[a][dim] != x[b][dim] ? x[a][dim] < x[b][dim] : a < b;
    });
    double left = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      left += y[sorted[k]];
      const std::size_t n_left = k + 1;
      if (n_left < leaf || n - n_left < leaf) continue;
      const double lo = x[sorted[k]][dim], hi = x[sorted[k + 1]][dim];
      if (!(lo < hi)) continue;
      const double right = sum - left;
      const double score = left * left / static_cast<double>(n_left) + right * right / static_cast<double>(n - n_left);
      if (score > best_score) {
        best_score = score;
        best_dim = static_cast<int>(dim);
        best_threshold = 0.5 * (lo + hi);
      }
    }
  }
  if (best_dim < 0) return id;

  const auto first = rows.begin() + static_cast<std::ptrdiff_t>(begin);
  const auto last = rows.begin() + static_cast<std::ptrdiff_t>(end);
  const auto mid = std::stable_partition(first, last, [&](std::size_t r) {
    return x[r][static_cast<std::size_t>(best_dim)] <= best_threshold;
  });
  const std::size_t split = static_cast<std::size_t>(mid - rows.begin());
  const int left_id = build(x, y, rows, begin, split, min_leaf, rng);
  const int right_id = build(x, y, rows, split, end, min_leaf, rng);
  nodes_[id].dim = best_dim;
  nodes_[id].threshold = best_threshold;
  nodes_[id].left = left_id;
  nodes_[id].right = right_id;
  return id;
}

double RegressionTree::predict(std::span<const double> x) const {
  int id = 0;
  while (nodes_[id].dim >= 0) {
    const Node& node = nodes_[id];
    id = x[static_cast<std::size_t>(node.dim)] <= node.threshold ? node.left : node.right;
  }
  return nodes_[id].value;
}

void RandomForest::fit(const std::vector<std::vector<double>>& x, std::span<const double> y, Rng& rng) {
  if (x.empty() || x.size() != y.size()) throw Error(ErrorCode::kInvalidVector, "forest needs matching non-empty X and y");
  trees_.assign(static_cast<std::size_t>(options_.n_trees), RegressionTree{});
  for (RegressionTree& tree : trees_) {
    std::vector<std::size_t> rows(x.size());
    for (std::size_t& r : rows) r = rng.index(x.size());
    tree.fit(x, y, std::move(rows), options_.min_leaf, rng);
  }
}

ForestPrediction RandomForest::predict(std::span<const double> x) const {
  ForestPrediction p;
  if (trees_.empty()) return p;
  std::vector<double> values;
  values.reserve(trees_.size());
  for (const RegressionTree& t : trees_) values.push_back(t.predict(x));
  const double n = static_cast<double>(values.size());
  p.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  for (double v : values) p.variance += (v - p.mean) * (v - p.mean);
  p.variance /= n;
  return p;
}

Smac::Smac(SearchSpace space, std::uint64_t seed, int full_budget, SurrogateSettings settings)
    : Optimizer(std::move(space), seed, full_budget), settings_(settings) {}

Suggestion Smac::suggest() {
  last_pool_.clear();
  last_acquisition_.clear();
  const auto trials = full_budget_trials();
  if (static_cast<int>(trials.size()) < settings_.n_startup || trials.empty()) return random_suggestion(full_budget_);

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  const Trial* best_trial = trials.front();
  for (const Trial* t : trials) {
    x.push_back(encode_unit(space_, t->config));
    y.push_back(t->objective);
    if (t->objective < best_trial->objective) best_trial = t;
  }
  // Standardized like the GP targets, so xi is relative to the spread of
  // the observed objectives.
  const std::vector<double> z = standardize(y);
  RandomForest forest(ForestOptions{settings_.smac_trees, settings_.smac_min_leaf});
  forest.fit(x, z, rng_);
  const double best = *std::min_element(z.begin(), z.end());

  for (int i = 0; i < settings_.smac_pool; ++i) last_pool_.push_back(sample_uniform(space_, rng_));
  const Trial* anchor = incumbent() ? incumbent() : best_trial;
  const std::vector<double> center = encode_unit(space_, anchor->config);
  for (int i = 0; i < settings_.smac_neighbors; ++i) {
    std::vector<double> u = center;
    for (double& v : u) v = std::clamp(v + rng_.normal(0.0, settings_.smac_neighbor_sigma), 0.0, 1.0);
    last_pool_.push_back(decode_unit(space_, u));
  }
  for (const Config& c : last_pool_) {
    const ForestPrediction p = forest.predict(encode_unit(space_, c));
    last_acquisition_.push_back(expected_improvement(p.mean, std::sqrt(p.variance), best, settings_.xi));
  }
  return {next_trial_id(), last_pool_[argmax_first(last_acquisition_)], full_budget_};
}

}  // namespace recbench
