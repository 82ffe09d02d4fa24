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

#ifndef RECBENCH_ITEMKNN_HPP
#define RECBENCH_ITEMKNN_HPP

#include <vector>

#include "recbench/models.hpp"

namespace recbench {

struct Neighbor {
  Index item;
  double similarity;
};

// Cosine similarity between binary item columns; 0 when either is empty.
double binary_cosine(std::size_t overlap, std::size_t count_a, std::size_t count_b);

// Per item, the `k` most similar other items with positive similarity,
// ordered by descending similarity then ascending index.
std::vector<std::vector<Neighbor>> item_neighbors(const UserItems& positives, Index n_items, std::size_t k);

// score(u, i) = sum of S_ij over j in topk(i) that u interacted with.
class ItemKnn final : public Recommender {
 public:
  ItemKnn(const Config& config, std::uint64_t seed, Index n_users, Index n_items);

  void train_to(const TrainingData& data, int to_epoch) override;
  double score(Index user, Index item) const override;
  void score_items(Index user, std::span<const Index> items, std::span<double> out) const override;
  std::vector<ParamBlock> parameter_blocks() override;
  void on_parameters_loaded() override;

  const std::vector<std::vector<Neighbor>>& neighbors() const { return neighbors_; }

 private:
  void pack();

  std::size_t maxk_;
  bool fitted_ = false;
  std::vector<std::vector<Neighbor>> neighbors_;
  UserItems positives_;
  // Flat copies for checkpointing.
  std::vector<double> nbr_offsets_, nbr_items_, nbr_sims_, pos_pairs_;
};

}  // namespace recbench

#endif  // RECBENCH_ITEMKNN_HPP
