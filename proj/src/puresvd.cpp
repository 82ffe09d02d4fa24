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

#include "recbench/puresvd.hpp"

#include <algorithm>

#include "recbench/error.hpp"

namespace recbench {

namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

template <typename Matrix>
TruncatedSvd subspace_iteration(const Matrix& a, int k, std::uint64_t seed, SubspaceIterationOptions options) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "factors must be at least 1");
  const Eigen::Index rank_cap = std::min(m, n);
  const Eigen::Index width = std::min<Eigen::Index>(k + options.oversample, rank_cap);
  const Eigen::Index keep = std::min<Eigen::Index>(k, width);

  Rng rng(derive_seed(seed, {kInitStream}));
  Eigen::MatrixXd omega(n, width);
  for (Eigen::Index c = 0; c < width; ++c)
    for (Eigen::Index r = 0; r < n; ++r) omega(r, c) = rng.normal();

  Eigen::MatrixXd q = orthonormal_basis(a * omega);
  for (int it = 0; it < options.power_iterations; ++it) {
    Eigen::MatrixXd z = orthonormal_basis(a.transpose() * q);
    q = orthonormal_basis(a * z);
  }
  // B = Q^T A is width x n; decompose its transpose (n x width) thinly.
  const Eigen::MatrixXd bt = a.transpose() * q;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);

  TruncatedSvd out;
  out.singular = svd.singularValues().head(keep);
  out.v = svd.matrixU().leftCols(keep);
  out.u = q * svd.matrixV().leftCols(keep);
  // Pad with zero factors when k exceeds the attainable rank.
  if (keep < k) {
    out.singular.conservativeResize(k);
    out.singular.tail(k - keep).setZero();
    out.u.conservativeResize(m, k);
    out.u.rightCols(k - keep).setZero();
    out.v.conservativeResize(n, k);
    out.v.rightCols(k - keep).setZero();
  }
  return out;
}

}  // namespace

TruncatedSvd randomized_svd(const Eigen::SparseMatrix<double>& a, int k, std::uint64_t seed,
                            SubspaceIterationOptions options) {
  return subspace_iteration(a, k, seed, options);
}

TruncatedSvd randomized_svd(const Eigen::MatrixXd& a, int k, std::uint64_t seed, SubspaceIterationOptions options) {
  return subspace_iteration(a, k, seed, options);
}

Eigen::SparseMatrix<double> interaction_matrix(const UserItems& positives, Index n_users, Index n_items) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(positives.nnz());
  for (Index u = 0; u < positives.n_users(); ++u)
    for (Index i : positives.of(u)) entries.emplace_back(u, i, 1.0);
  Eigen::SparseMatrix<double> a(n_users, n_items);
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

PureSvd::PureSvd(const Config& config, std::uint64_t seed, Index n_users, Index n_items)
    : Recommender(ModelKind::kPureSvd, config, seed, n_users, n_items),
      factors_(static_cast<int>(config.as_int("factors"))) {
  if (factors_ < 1) throw Error(ErrorCode::kInvalidConfig, "factors must be at least 1");
}

void PureSvd::train_to(const TrainingData& data, int to_epoch) {
  if (!fitted_) {
    const auto svd = randomized_svd(interaction_matrix(data.positives, n_users_, n_items_), factors_, seed_);
    const Eigen::MatrixXd us = svd.u * svd.singular.asDiagonal();
    user_factors_.resize(static_cast<std::size_t>(n_users_) * static_cast<std::size_t>(factors_));
    item_factors_.resize(static_cast<std::size_t>(n_items_) * static_cast<std::size_t>(factors_));
    for (Index u = 0; u < n_users_; ++u)
      for (int f = 0; f < factors_; ++f) user_factors_[static_cast<std::size_t>(u) * factors_ + f] = us(u, f);
    for (Index i = 0; i < n_items_; ++i)
      for (int f = 0; f < factors_; ++f) item_factors_[static_cast<std::size_t>(i) * factors_ + f] = svd.v(i, f);
    fitted_ = true;
    check_finite(to_epoch);
  }
  epochs_done_ = std::max(epochs_done_, to_epoch);
}

double PureSvd::score(Index user, Index item) const {
  const double* p = user_factors_.data() + static_cast<std::size_t>(user) * factors_;
  const double* q = item_factors_.data() + static_cast<std::size_t>(item) * factors_;
  double s = 0.0;
  for (int f = 0; f < factors_; ++f) s += p[f] * q[f];
  return s;
}

std::vector<ParamBlock> PureSvd::parameter_blocks() {
  return {{"user_factors", &user_factors_}, {"item_factors", &item_factors_}};
}

void PureSvd::on_parameters_loaded() {
  if (user_factors_.size() != static_cast<std::size_t>(n_users_) * factors_ ||
      item_factors_.size() != static_cast<std::size_t>(n_items_) * factors_)
    throw Error(ErrorCode::kCorruptCheckpoint, "puresvd factor blocks have the wrong size");
  fitted_ = true;
}

}  // namespace recbench
