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

#ifndef RECBENCH_FOREST_HPP
#define RECBENCH_FOREST_HPP

#include <span>
#include <vector>

#include "recbench/random.hpp"

namespace recbench {

struct ForestOptions {
  int n_trees = 10;
  int min_leaf = 3;
};

// Axis-aligned regression tree. Each split looks at ceil(d / 2) random
// dimensions and cuts at midpoints between distinct sorted values.
class RegressionTree {
 public:
  void fit(const std::vector<std::vector<double>>& x, std::span<const double> y, std::vector<std::size_t> rows,
           int min_leaf, Rng& rng);
  double predict(std::span<const double> x) const;
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    int dim = -1;  // -1 for a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  int build(const std::vector<std::vector<double>>& x, std::span<const double> y, std::vector<std::size_t>& rows,
            std::size_t begin, std::size_t end, int min_leaf, Rng& rng);

  std::vector<Node> nodes_;
};

struct ForestPrediction {
  double mean = 0.0;
  double variance = 0.0;  // across trees
};

class RandomForest {
 public:
  explicit RandomForest(ForestOptions options = {}) : options_(options) {}

  // Every tree sees a bootstrap resample of the rows.
  void fit(const std::vector<std::vector<double>>& x, std::span<const double> y, Rng& rng);
  ForestPrediction predict(std::span<const double> x) const;
  const std::vector<RegressionTree>& trees() const { return trees_; }

 private:
  ForestOptions options_;
  std::vector<RegressionTree> trees_;
};

}  // namespace recbench

#endif  // RECBENCH_FOREST_HPP
