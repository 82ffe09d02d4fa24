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

#include "recbench/itemknn.hpp"

#include <algorithm>
#include <cmath>

#include "recbench/error.hpp"

namespace recbench {

double binary_cosine(std::size_t overlap, std::size_t count_a, std::size_t count_b) {
  if (count_a == 0 || count_b == 0) return 0.0;
  return static_cast<double>(overlap) / std::sqrt(static_cast<double>(count_a) * static_cast<double>(count_b));
}

std::vector<std::vector<Neighbor>> item_neighbors(const UserItems& positives, Index n_items, std::size_t k) {
  // Transpose to item -> users.
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(positives.nnz());
  for (Index u = 0; u < positives.n_users(); ++u)
    for (Index i : positives.of(u)) pairs.emplace_back(i, u);
  const UserItems item_users(n_items, std::move(pairs));

  std::vector<std::vector<Neighbor>> out(static_cast<std::size_t>(n_items));
  std::vector<std::size_t> overlap(static_cast<std::size_t>(n_items), 0);
  std::vector<Index> touched;
  auto better = [](const Neighbor& a, const Neighbor& b) {
    return a.similarity > b.similarity || (a.similarity == b.similarity && a.item < b.item);
  };
  for (Index i = 0; i < n_items; ++i) {
    touched.clear();
    for (Index u : item_users.of(i)) {
      for (Index j : positives.of(u)) {
        if (j == i) continue;
        if (overlap[j]++ == 0) touched.push_back(j);
      }
    }
    auto& list = out[static_cast<std::size_t>(i)];
    list.reserve(touched.size());
    const std::size_t count_i = item_users.of(i).size();
    for (Index j : touched) {
      list.push_back({j, binary_cosine(overlap[j], count_i, item_users.of(j).size())});
      overlap[j] = 0;
    }
    if (list.size() > k) {
      std::nth_element(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(k), list.end(), better);
      list.resize(k);
    }
    std::sort(list.begin(), list.end(), better);
  }
  return out;
}

ItemKnn::ItemKnn(const Config& config, std::uint64_t seed, Index n_users, Index n_items)
    : Recommender(ModelKind::kItemKnn, config, seed, n_users, n_items) {
  const auto k = config.as_int("maxk");
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "maxk must be at least 1");
  maxk_ = static_cast<std::size_t>(k);
}

void ItemKnn::train_to(const TrainingData& data, int to_epoch) {
  if (!fitted_) {
    neighbors_ = item_neighbors(data.positives, n_items_, maxk_);
    positives_ = data.positives;
    fitted_ = true;
    pack();
  }
  epochs_done_ = std::max(epochs_done_, to_epoch);
}

double ItemKnn::score(Index user, Index item) const {
  double s = 0.0;
  for (const auto& nb : neighbors_[static_cast<std::size_t>(item)])
    if (positives_.contains(user, nb.item)) s += nb.similarity;
  return s;
}

void ItemKnn::score_items(Index user, std::span<const Index> items, std::span<double> out) const {
  std::vector<char> mine(static_cast<std::size_t>(n_items_), 0);
  for (Index j : positives_.of(user)) mine[static_cast<std::size_t>(j)] = 1;
  for (std::size_t k = 0; k < items.size(); ++k) {
    double s = 0.0;
    for (const auto& nb : neighbors_[static_cast<std::size_t>(items[k])])
      if (mine[static_cast<std::size_t>(nb.item)]) s += nb.similarity;
    out[k] = s;
  }
}

void ItemKnn::pack() {
  nbr_offsets_.assign(1, 0.0);
  nbr_items_.clear();
  nbr_sims_.clear();
  for (const auto& list : neighbors_) {
    for (const auto& nb : list) {
      nbr_items_.push_back(nb.item);
      nbr_sims_.push_back(nb.similarity);
    }
    nbr_offsets_.push_back(static_cast<double>(nbr_items_.size()));
  }
  pos_pairs_.clear();
  for (Index u = 0; u < positives_.n_users(); ++u) {
    for (Index i : positives_.of(u)) {
      pos_pairs_.push_back(u);
      pos_pairs_.push_back(i);
    }
  }
}

std::vector<ParamBlock> ItemKnn::parameter_blocks() {
  return {{"nbr_offsets", &nbr_offsets_}, {"nbr_items", &nbr_items_}, {"nbr_sims", &nbr_sims_}, {"positives", &pos_pairs_}};
}

void ItemKnn::on_parameters_loaded() {
  neighbors_.assign(static_cast<std::size_t>(n_items_), {});
  if (nbr_offsets_.size() != neighbors_.size() + 1 || nbr_items_.size() != nbr_sims_.size())
    throw Error(ErrorCode::kCorruptCheckpoint, "itemknn neighbor blocks are inconsistent");
  for (std::size_t i = 0; i < neighbors_.size(); ++i) {
    const auto lo = static_cast<std::size_t>(nbr_offsets_[i]);
    const auto hi = static_cast<std::size_t>(nbr_offsets_[i + 1]);
    if (lo > hi || hi > nbr_items_.size()) throw Error(ErrorCode::kCorruptCheckpoint, "itemknn offsets out of range");
    for (std::size_t k = lo; k < hi; ++k) neighbors_[i].push_back({static_cast<Index>(nbr_items_[k]), nbr_sims_[k]});
  }
  std::vector<std::pair<Index, Index>> pairs;
  for (std::size_t k = 0; k + 1 < pos_pairs_.size(); k += 2)
    pairs.emplace_back(static_cast<Index>(pos_pairs_[k]), static_cast<Index>(pos_pairs_[k + 1]));
  positives_ = UserItems(n_users_, std::move(pairs));
  fitted_ = true;
}

}  // namespace recbench
