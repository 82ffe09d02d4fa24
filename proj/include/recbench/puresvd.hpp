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

#ifndef RECBENCH_PURESVD_HPP
#define RECBENCH_PURESVD_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "recbench/models.hpp"

namespace recbench {

struct TruncatedSvd {
  Eigen::MatrixXd u;         // m x k
  Eigen::VectorXd singular;  // k, descending
  Eigen::MatrixXd v;         // n x k
};

struct SubspaceIterationOptions {
  int oversample = 10;
  int power_iterations = 4;
};

// Rank-k SVD by seeded randomized subspace iteration. The sketch width is
// min(k + oversample, m, n); when that covers the smaller dimension the result
// is exact up to rounding.
TruncatedSvd randomized_svd(const Eigen::SparseMatrix<double>& a, int k, std::uint64_t seed,
                            SubspaceIterationOptions options = {});
TruncatedSvd randomized_svd(const Eigen::MatrixXd& a, int k, std::uint64_t seed, SubspaceIterationOptions options = {});

Eigen::SparseMatrix<double> interaction_matrix(const UserItems& positives, Index n_users, Index n_items);

// score(u, i) = (U_k S_k V_k^T)_{u,i} over the binary train matrix.
class PureSvd final : public Recommender {
 public:
  PureSvd(const Config& config, std::uint64_t seed, Index n_users, Index n_items);

  void train_to(const TrainingData& data, int to_epoch) override;
  double score(Index user, Index item) const override;
  std::vector<ParamBlock> parameter_blocks() override;
  void on_parameters_loaded() override;

  int factors() const { return factors_; }

 private:
  int factors_;
  bool fitted_ = false;
  std::vector<double> user_factors_;  // n_users x factors, rows scaled by singular values
  std::vector<double> item_factors_;  // n_items x factors
};

}  // namespace recbench

#endif  // RECBENCH_PURESVD_HPP
