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

#ifndef RECBENCH_MODELS_HPP
#define RECBENCH_MODELS_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recbench/dataio.hpp"
#include "recbench/searchspace.hpp"

namespace recbench {

enum class ModelKind { kItemKnn, kPureSvd, kBprMf, kFm, kNeuMf };

ModelKind parse_model_kind(std::string_view name);
std::string_view model_name(ModelKind kind);

// What a model trains on: positives to learn from, and the per-user item set
// that negatives must avoid.
struct TrainingData {
  Index n_users = 0;
  Index n_items = 0;
  const UserItems& positives;
  const UserItems& exclude;
};

// Tuning trains on the train partition; the final model on train plus valid.
// Negatives avoid train and valid in both phases.
TrainingData tuning_data(const SplitDataset& split);
TrainingData final_data(const SplitDataset& split);

// Stream ids fed to derive_seed so every random draw has a fixed home.
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kEpochStream = 2;

// A named flat parameter block, the unit of checkpointing and of bit-exact
// state comparison.
struct ParamBlock {
  std::string name;
  std::vector<double>* values;
};

// A model together with its training progress. (dataset, config, seed,
// epochs_done) fully determines the parameters: each epoch draws from its own
// RNG stream, so training 0->10->30 equals 0->30.
class Recommender {
 public:
  Recommender(ModelKind kind, Config config, std::uint64_t seed, Index n_users, Index n_items)
      : kind_(kind), config_(std::move(config)), seed_(seed), n_users_(n_users), n_items_(n_items) {}
  virtual ~Recommender() = default;

  Recommender(const Recommender&) = delete;
  Recommender& operator=(const Recommender&) = delete;

  ModelKind kind() const { return kind_; }
  const Config& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  Index n_users() const { return n_users_; }
  Index n_items() const { return n_items_; }
  int epochs_done() const { return epochs_done_; }
  const std::vector<double>& epoch_losses() const { return epoch_losses_; }

  // Advances training to `to_epoch`. Budget-insensitive models fit once and
  // only move the counter. Throws DivergedTraining on non-finite parameters.
  virtual void train_to(const TrainingData& data, int to_epoch) = 0;

  virtual double score(Index user, Index item) const = 0;
  virtual void score_items(Index user, std::span<const Index> items, std::span<double> out) const;

  // Mutable views of every parameter block, in a fixed order.
  virtual std::vector<ParamBlock> parameter_blocks() = 0;

  // Restores bookkeeping after parameter blocks were loaded from a checkpoint.
  void restore_progress(int epochs_done, std::vector<double> losses) {
    epochs_done_ = epochs_done;
    epoch_losses_ = std::move(losses);
  }
  virtual void on_parameters_loaded() {}

 protected:
  void check_finite(int epoch);

  ModelKind kind_;
  Config config_;
  std::uint64_t seed_;
  Index n_users_;
  Index n_items_;
  int epochs_done_ = 0;
  std::vector<double> epoch_losses_;
};

std::unique_ptr<Recommender> make_model(ModelKind kind, const Config& config, std::uint64_t seed, Index n_users,
                                        Index n_items);

// Top-N over candidates: descending score, ties by ascending item index.
std::vector<Index> rank_topn(const Recommender& model, Index user, std::span<const Index> candidates, std::size_t n);

// Same ordering rule on precomputed scores; returns positions into `scores`.
std::vector<std::size_t> topn_positions(std::span<const double> scores, std::span<const Index> items, std::size_t n);

inline double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// -ln(sigmoid(x)) without overflow.
inline double neg_log_sigmoid(double x) { return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

}  // namespace recbench

#endif  // RECBENCH_MODELS_HPP
