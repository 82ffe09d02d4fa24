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

#include "recbench/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "recbench/bpr.hpp"
#include "recbench/error.hpp"
#include "recbench/itemknn.hpp"
#include "recbench/neumf.hpp"
#include "recbench/puresvd.hpp"

namespace recbench {

ModelKind parse_model_kind(std::string_view name) {
  if (name == "itemknn") return ModelKind::kItemKnn;
  if (name == "puresvd") return ModelKind::kPureSvd;
  if (name == "bprmf") return ModelKind::kBprMf;
  if (name == "fm") return ModelKind::kFm;
  if (name == "neumf") return ModelKind::kNeuMf;
  throw Error(ErrorCode::kUnknownModel, "unknown model '" + std::string(name) + "'");
}

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kItemKnn: return "itemknn";
    case ModelKind::kPureSvd: return "puresvd";
    case ModelKind::kBprMf: return "bprmf";
    case ModelKind::kFm: return "fm";
    case ModelKind::kNeuMf: return "neumf";
  }
  return "unknown";
}

TrainingData tuning_data(const SplitDataset& split) {
  return {split.n_users(), split.n_items(), split.train(), split.train_valid()};
}

TrainingData final_data(const SplitDataset& split) {
  return {split.n_users(), split.n_items(), split.train_valid(), split.train_valid()};
}

void Recommender::score_items(Index user, std::span<const Index> items, std::span<double> out) const {
  for (std::size_t k = 0; k < items.size(); ++k) out[k] = score(user, items[k]);
}

void Recommender::check_finite(int epoch) {
  for (const auto& block : parameter_blocks()) {
    for (double x : *block.values) {
      if (!std::isfinite(x))
        throw Error(ErrorCode::kDivergedTraining,
                    std::string(model_name(kind_)) + " parameter block '" + block.name + "' is not finite after epoch " +
                        std::to_string(epoch));
    }
  }
}

std::unique_ptr<Recommender> make_model(ModelKind kind, const Config& config, std::uint64_t seed, Index n_users,
                                        Index n_items) {
  switch (kind) {
    case ModelKind::kItemKnn: return std::make_unique<ItemKnn>(config, seed, n_users, n_items);
    case ModelKind::kPureSvd: return std::make_unique<PureSvd>(config, seed, n_users, n_items);
    case ModelKind::kBprMf: return std::make_unique<BprMf>(config, seed, n_users, n_items);
    case ModelKind::kFm: return std::make_unique<FactorizationMachine>(config, seed, n_users, n_items);
    case ModelKind::kNeuMf: return std::make_unique<NeuMf>(config, seed, n_users, n_items);
  }
  throw Error(ErrorCode::kUnknownModel, "unknown model kind");
}

std::vector<std::size_t> topn_positions(std::span<const double> scores, std::span<const Index> items, std::size_t n) {
  std::vector<std::size_t> pos(scores.size());
  std::iota(pos.begin(), pos.end(), 0);
  // NaN ranks last.
  auto key = [&](std::size_t p) { return std::isnan(scores[p]) ? -HUGE_VAL : scores[p]; };
  auto before = [&](std::size_t a, std::size_t b) {
    const double sa = key(a), sb = key(b);
    return sa > sb || (sa == sb && items[a] < items[b]);
  };
  const std::size_t take = std::min(n, pos.size());
  std::partial_sort(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(take), pos.end(), before);
  pos.resize(take);
  return pos;
}

std::vector<Index> rank_topn(const Recommender& model, Index user, std::span<const Index> candidates, std::size_t n) {
  if (user < 0 || user >= model.n_users())
    throw Error(ErrorCode::kInvalidUser, "user index " + std::to_string(user) + " is out of range");
  if (candidates.empty() || n == 0) throw Error(ErrorCode::kInvalidSpec, "rank_topn needs candidates and N >= 1");
  std::vector<double> scores(candidates.size());
  model.score_items(user, candidates, scores);
  std::vector<Index> out;
  for (std::size_t p : topn_positions(scores, candidates, n)) out.push_back(candidates[p]);
  return out;
}

}  // namespace recbench
