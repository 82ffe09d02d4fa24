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

#ifndef RECBENCH_NEUMF_HPP
#define RECBENCH_NEUMF_HPP

#include <span>
#include <vector>

#include "recbench/models.hpp"

namespace recbench {

// Output widths of the MLP tower: halving from 2 * factors, floor, min 1.
std::vector<int> neumf_layer_widths(int factors, int num_layers);

// GMF branch (elementwise product of embeddings) and an MLP tower over the
// concatenated MLP embeddings, joined by a learned linear map. Trained with
// the pairwise BPR loss on mini-batches.
class NeuMf final : public Recommender {
 public:
  NeuMf(const Config& config, std::uint64_t seed, Index n_users, Index n_items);

  void train_to(const TrainingData& data, int to_epoch) override;
  double score(Index user, Index item) const override;
  std::vector<ParamBlock> parameter_blocks() override;

  int factors() const { return factors_; }
  const std::vector<int>& widths() const { return widths_; }
  std::size_t prediction_width() const { return static_cast<std::size_t>(factors_ + widths_.back()); }

  // Score with dropout applied as in training, masks drawn from `rng`.
  double train_mode_score(Index user, Index item, Rng& rng) const;

  std::vector<double>& parameters() { return theta_; }

  // Mean BPR loss over a batch plus L2 on the touched embeddings, in eval mode.
  double batch_loss(std::span<const Triple> batch) const;
  // Dense gradient of batch_loss with respect to parameters().
  std::vector<double> batch_gradient(std::span<const Triple> batch) const;

 private:
  struct Pass {
    Index user = 0;
    Index item = 0;
    std::vector<double> gmf;
    std::vector<std::vector<double>> acts;   // x0 (input) .. xL
    std::vector<std::vector<double>> pre;    // z1 .. zL
    std::vector<std::vector<double>> masks;  // empty when dropout is off
    double pred = 0.0;
  };

  std::size_t pg(Index u) const { return off_pg_ + static_cast<std::size_t>(u) * factors_; }
  std::size_t qg(Index i) const { return off_qg_ + static_cast<std::size_t>(i) * factors_; }
  std::size_t pm(Index u) const { return off_pm_ + static_cast<std::size_t>(u) * factors_; }
  std::size_t qm(Index i) const { return off_qm_ + static_cast<std::size_t>(i) * factors_; }

  void forward(Index user, Index item, Rng* dropout_rng, Pass& pass) const;
  void backward(const Pass& pass, double dpred, std::vector<double>& grad) const;
  // Accumulates the gradient of the batch loss into `grad` and returns the loss.
  double accumulate(std::span<const Triple> batch, Rng* dropout_rng, std::vector<double>& grad) const;
  double embedding_norms(const Triple& t) const;

  int factors_;
  int num_layers_;
  double dropout_;
  double lr_;
  double reg_;
  int batch_size_;
  int num_ng_;
  std::vector<int> widths_;
  std::vector<int> in_widths_;

  std::vector<double> theta_;
  std::size_t off_pg_ = 0, off_qg_ = 0, off_pm_ = 0, off_qm_ = 0;
  std::vector<std::size_t> off_w_, off_b_;
  std::size_t off_h_ = 0;
  std::size_t dense_begin_ = 0;  // parameters from here on are the tower and output map
};

}  // namespace recbench

#endif  // RECBENCH_NEUMF_HPP
