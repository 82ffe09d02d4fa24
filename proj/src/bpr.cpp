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

#include "recbench/bpr.hpp"

#include <cmath>

#include "recbench/error.hpp"

namespace recbench {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) s += a[f] * b[f];
  return s;
}

double sq(std::span<const double> a) { return dot(a, a); }

}  // namespace

double bprmf_triple_loss(std::span<const double> p_u, std::span<const double> q_i, std::span<const double> q_j,
                         double reg) {
  const double x = dot(p_u, q_i) - dot(p_u, q_j);
  return neg_log_sigmoid(x) + reg * (sq(p_u) + sq(q_i) + sq(q_j));
}

double bprmf_triple_gradient(std::span<const double> p_u, std::span<const double> q_i, std::span<const double> q_j,
                             double reg, std::span<double> g_p, std::span<double> g_qi, std::span<double> g_qj) {
  const double x = dot(p_u, q_i) - dot(p_u, q_j);
  const double g = -sigmoid(-x);  // d(-ln sigmoid(x))/dx
  for (std::size_t f = 0; f < p_u.size(); ++f) {
    g_p[f] = g * (q_i[f] - q_j[f]) + 2.0 * reg * p_u[f];
    g_qi[f] = g * p_u[f] + 2.0 * reg * q_i[f];
    g_qj[f] = -g * p_u[f] + 2.0 * reg * q_j[f];
  }
  return neg_log_sigmoid(x) + reg * (sq(p_u) + sq(q_i) + sq(q_j));
}

double fm_pair_difference(double w_i, double w_j, std::span<const double> v_u, std::span<const double> v_i,
                          std::span<const double> v_j) {
  double s = w_i - w_j;
  for (std::size_t f = 0; f < v_u.size(); ++f) s += v_u[f] * (v_i[f] - v_j[f]);
  return s;
}

double fm_triple_loss(double w_i, double w_j, std::span<const double> v_u, std::span<const double> v_i,
                      std::span<const double> v_j, double reg) {
  const double x = fm_pair_difference(w_i, w_j, v_u, v_i, v_j);
  return neg_log_sigmoid(x) + reg * (w_i * w_i + w_j * w_j + sq(v_u) + sq(v_i) + sq(v_j));
}

FmTripleGradient fm_triple_gradient(double w_i, double w_j, std::span<const double> v_u, std::span<const double> v_i,
                                    std::span<const double> v_j, double reg) {
  const double x = fm_pair_difference(w_i, w_j, v_u, v_i, v_j);
  const double g = -sigmoid(-x);
  FmTripleGradient out;
  out.w_i = g + 2.0 * reg * w_i;
  out.w_j = -g + 2.0 * reg * w_j;
  const std::size_t k = v_u.size();
  out.v_u.resize(k);
  out.v_i.resize(k);
  out.v_j.resize(k);
  for (std::size_t f = 0; f < k; ++f) {
    out.v_u[f] = g * (v_i[f] - v_j[f]) + 2.0 * reg * v_u[f];
    out.v_i[f] = g * v_u[f] + 2.0 * reg * v_i[f];
    out.v_j[f] = -g * v_u[f] + 2.0 * reg * v_j[f];
  }
  out.loss = neg_log_sigmoid(x) + reg * (w_i * w_i + w_j * w_j + sq(v_u) + sq(v_i) + sq(v_j));
  return out;
}

SgdSettings sgd_settings(const Config& config) {
  SgdSettings s;
  s.factors = static_cast<int>(config.as_int("factors"));
  s.num_ng = static_cast<int>(config.as_int("num_ng"));
  s.lr = config.as_double("lr");
  s.reg = config.as_double("reg_2");
  if (s.factors < 1 || s.num_ng < 1 || !(s.lr > 0.0) || s.reg < 0.0)
    throw Error(ErrorCode::kInvalidConfig, "factors, num_ng, lr must be positive and reg_2 non-negative");
  return s;
}

namespace {

std::vector<double> normal_block(std::size_t n, Rng& rng, double stddev) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal(0.0, stddev);
  return v;
}

}  // namespace

BprMf::BprMf(const Config& config, std::uint64_t seed, Index n_users, Index n_items)
    : Recommender(ModelKind::kBprMf, config, seed, n_users, n_items),
      settings_(sgd_settings(config)),
      k_(static_cast<std::size_t>(settings_.factors)) {
  Rng rng(derive_seed(seed, {kInitStream}));
  p_ = normal_block(static_cast<std::size_t>(n_users) * k_, rng, 0.01);
  q_ = normal_block(static_cast<std::size_t>(n_items) * k_, rng, 0.01);
}

void BprMf::train_to(const TrainingData& data, int to_epoch) {
  std::vector<double> g_p(k_), g_qi(k_), g_qj(k_);
  const double lr = settings_.lr;
  while (epochs_done_ < to_epoch) {
    const int epoch = epochs_done_ + 1;
    Rng rng(derive_seed(seed_, {kEpochStream, static_cast<std::uint64_t>(epoch)}));
    auto triples = sample_triples(data.positives, data.exclude, data.n_items, settings_.num_ng, rng);
    rng.shuffle(triples);
    double total = 0.0;
    for (const auto& t : triples) {
      auto p = user_row(t.user);
      auto qi = item_row(t.pos);
      auto qj = item_row(t.neg);
      total += bprmf_triple_gradient(p, qi, qj, settings_.reg, g_p, g_qi, g_qj);
      for (std::size_t f = 0; f < k_; ++f) {
        p[f] -= lr * g_p[f];
        qi[f] -= lr * g_qi[f];
        qj[f] -= lr * g_qj[f];
      }
    }
    epoch_losses_.push_back(triples.empty() ? 0.0 : total / static_cast<double>(triples.size()));
    check_finite(epoch);
    epochs_done_ = epoch;
  }
}

double BprMf::score(Index user, Index item) const { return dot(user_row(user), item_row(item)); }

double BprMf::triple_loss(const Triple& t) const {
  return bprmf_triple_loss(user_row(t.user), item_row(t.pos), item_row(t.neg), settings_.reg);
}

std::vector<ParamBlock> BprMf::parameter_blocks() { return {{"user_factors", &p_}, {"item_factors", &q_}}; }

FactorizationMachine::FactorizationMachine(const Config& config, std::uint64_t seed, Index n_users, Index n_items)
    : Recommender(ModelKind::kFm, config, seed, n_users, n_items),
      settings_(sgd_settings(config)),
      k_(static_cast<std::size_t>(settings_.factors)),
      w0_(1, 0.0),
      w_user_(static_cast<std::size_t>(n_users), 0.0),
      w_item_(static_cast<std::size_t>(n_items), 0.0) {
  Rng rng(derive_seed(seed, {kInitStream}));
  vu_ = normal_block(static_cast<std::size_t>(n_users) * k_, rng, 0.01);
  vi_ = normal_block(static_cast<std::size_t>(n_items) * k_, rng, 0.01);
}

void FactorizationMachine::train_to(const TrainingData& data, int to_epoch) {
  const double lr = settings_.lr;
  const double reg = settings_.reg;
  while (epochs_done_ < to_epoch) {
    const int epoch = epochs_done_ + 1;
    Rng rng(derive_seed(seed_, {kEpochStream, static_cast<std::uint64_t>(epoch)}));
    auto triples = sample_triples(data.positives, data.exclude, data.n_items, settings_.num_ng, rng);
    rng.shuffle(triples);
    double total = 0.0;
    for (const auto& t : triples) {
      double* vu = vu_.data() + static_cast<std::size_t>(t.user) * k_;
      double* vi = vi_.data() + static_cast<std::size_t>(t.pos) * k_;
      double* vj = vi_.data() + static_cast<std::size_t>(t.neg) * k_;
      double& wi = w_item_[static_cast<std::size_t>(t.pos)];
      double& wj = w_item_[static_cast<std::size_t>(t.neg)];
      double x = wi - wj;
      double norms = wi * wi + wj * wj;
      for (std::size_t f = 0; f < k_; ++f) {
        x += vu[f] * (vi[f] - vj[f]);
        norms += vu[f] * vu[f] + vi[f] * vi[f] + vj[f] * vj[f];
      }
      total += neg_log_sigmoid(x) + reg * norms;
      const double g = -sigmoid(-x);
      const double gwi = g + 2.0 * reg * wi;
      const double gwj = -g + 2.0 * reg * wj;
      for (std::size_t f = 0; f < k_; ++f) {
        const double u = vu[f], a = vi[f], b = vj[f];
        vu[f] -= lr * (g * (a - b) + 2.0 * reg * u);
        vi[f] -= lr * (g * u + 2.0 * reg * a);
        vj[f] -= lr * (-g * u + 2.0 * reg * b);
      }
      wi -= lr * gwi;
      wj -= lr * gwj;
    }
    epoch_losses_.push_back(triples.empty() ? 0.0 : total / static_cast<double>(triples.size()));
    check_finite(epoch);
    epochs_done_ = epoch;
  }
}

double FactorizationMachine::score(Index user, Index item) const {
  return w0_[0] + w_user_[static_cast<std::size_t>(user)] + w_item_[static_cast<std::size_t>(item)] +
         dot(user_row(user), item_row(item));
}

double FactorizationMachine::triple_loss(const Triple& t) const {
  return fm_triple_loss(w_item_[static_cast<std::size_t>(t.pos)], w_item_[static_cast<std::size_t>(t.neg)],
                        user_row(t.user), item_row(t.pos), item_row(t.neg), settings_.reg);
}

std::vector<ParamBlock> FactorizationMachine::parameter_blocks() {
  return {{"w0", &w0_}, {"w_user", &w_user_}, {"w_item", &w_item_}, {"v_user", &vu_}, {"v_item", &vi_}};
}

}  // namespace recbench
