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

#ifndef RECBENCH_BPR_HPP
#define RECBENCH_BPR_HPP

#include <span>
#include <vector>

#include "recbench/models.hpp"

namespace recbench {

// Pairwise BPR loss for matrix factorization on one (u, i, j) triple:
//   -ln sigmoid(p_u . (q_i - q_j)) + reg (|p_u|^2 + |q_i|^2 + |q_j|^2)
double bprmf_triple_loss(std::span<const double> p_u, std::span<const double> q_i, std::span<const double> q_j,
                         double reg);

// Writes the gradient with respect to each argument and returns the loss.
double bprmf_triple_gradient(std::span<const double> p_u, std::span<const double> q_i, std::span<const double> q_j,
                             double reg, std::span<double> g_p, std::span<double> g_qi, std::span<double> g_qj);

// FM over one-hot(user) + one-hot(item) collapses to
//   y(u, i) = w0 + w_u + w_i + v_u . v_i
// so the pairwise difference is (w_i - w_j) + v_u . (v_i - v_j).
double fm_pair_difference(double w_i, double w_j, std::span<const double> v_u, std::span<const double> v_i,
                          std::span<const double> v_j);

double fm_triple_loss(double w_i, double w_j, std::span<const double> v_u, std::span<const double> v_i,
                      std::span<const double> v_j, double reg);

struct FmTripleGradient {
  double w_i = 0.0;
  double w_j = 0.0;
  std::vector<double> v_u, v_i, v_j;
  double loss = 0.0;
};

FmTripleGradient fm_triple_gradient(double w_i, double w_j, std::span<const double> v_u, std::span<const double> v_i,
                                    std::span<const double> v_j, double reg);

// Hyperparameters shared by the SGD-trained pairwise models.
struct SgdSettings {
  int factors = 0;
  int num_ng = 1;
  double lr = 0.0;
  double reg = 0.0;
};

SgdSettings sgd_settings(const Config& config);

class BprMf final : public Recommender {
 public:
  BprMf(const Config& config, std::uint64_t seed, Index n_users, Index n_items);

  void train_to(const TrainingData& data, int to_epoch) override;
  double score(Index user, Index item) const override;
  std::vector<ParamBlock> parameter_blocks() override;

  double triple_loss(const Triple& t) const;
  const SgdSettings& settings() const { return settings_; }

 private:
  std::span<double> user_row(Index u) { return {p_.data() + static_cast<std::size_t>(u) * k_, k_}; }
  std::span<double> item_row(Index i) { return {q_.data() + static_cast<std::size_t>(i) * k_, k_}; }
  std::span<const double> user_row(Index u) const { return {p_.data() + static_cast<std::size_t>(u) * k_, k_}; }
  std::span<const double> item_row(Index i) const { return {q_.data() + static_cast<std::size_t>(i) * k_, k_}; }

  SgdSettings settings_;
  std::size_t k_;
  std::vector<double> p_;
  std::vector<double> q_;
};

class FactorizationMachine final : public Recommender {
 public:
  FactorizationMachine(const Config& config, std::uint64_t seed, Index n_users, Index n_items);

  void train_to(const TrainingData& data, int to_epoch) override;
  double score(Index user, Index item) const override;
  std::vector<ParamBlock> parameter_blocks() override;

  double triple_loss(const Triple& t) const;
  const SgdSettings& settings() const { return settings_; }

 private:
  std::span<const double> user_row(Index u) const { return {vu_.data() + static_cast<std::size_t>(u) * k_, k_}; }
  std::span<const double> item_row(Index i) const { return {vi_.data() + static_cast<std::size_t>(i) * k_, k_}; }

  SgdSettings settings_;
  std::size_t k_;
  std::vector<double> w0_;      // size 1
  std::vector<double> w_user_;  // cancels in the pairwise loss; stays at 0
  std::vector<double> w_item_;
  std::vector<double> vu_;
  std::vector<double> vi_;
};

}  // namespace recbench

#endif  // RECBENCH_BPR_HPP
