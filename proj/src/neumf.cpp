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

#include "recbench/neumf.hpp"

#include <algorithm>
#include <cmath>

#include "recbench/error.hpp"

namespace recbench {

std::vector<int> neumf_layer_widths(int factors, int num_layers) {
  std::vector<int> widths;
  int width = 2 * factors;
  for (int l = 0; l < num_layers; ++l) {
    width = std::max(1, width / 2);
    widths.push_back(width);
  }
  return widths;
}

NeuMf::NeuMf(const Config& config, std::uint64_t seed, Index n_users, Index n_items)
    : Recommender(ModelKind::kNeuMf, config, seed, n_users, n_items),
      factors_(static_cast<int>(config.as_int("factors"))),
      num_layers_(static_cast<int>(config.as_int("num_layers"))),
      dropout_(config.as_double("dropout")),
      lr_(config.as_double("lr")),
      reg_(config.as_double("reg_2")),
      batch_size_(static_cast<int>(config.as_int("batch_size"))),
      num_ng_(static_cast<int>(config.as_int("num_ng"))) {
  if (factors_ < 1 || num_layers_ < 1 || batch_size_ < 1 || num_ng_ < 1 || !(lr_ > 0.0) || reg_ < 0.0 ||
      dropout_ < 0.0 || dropout_ > 1.0)
    throw Error(ErrorCode::kInvalidConfig, "neumf hyperparameters out of range");
  widths_ = neumf_layer_widths(factors_, num_layers_);
  in_widths_.push_back(2 * factors_);
  for (int l = 0; l + 1 < num_layers_; ++l) in_widths_.push_back(widths_[l]);

  const auto f = static_cast<std::size_t>(factors_);
  std::size_t off = 0;
  off_pg_ = off;
  off += static_cast<std::size_t>(n_users) * f;
  off_qg_ = off;
  off += static_cast<std::size_t>(n_items) * f;
  off_pm_ = off;
  off += static_cast<std::size_t>(n_users) * f;
  off_qm_ = off;
  off += static_cast<std::size_t>(n_items) * f;
  dense_begin_ = off;
  for (int l = 0; l < num_layers_; ++l) {
    off_w_.push_back(off);
    off += static_cast<std::size_t>(widths_[l]) * static_cast<std::size_t>(in_widths_[l]);
    off_b_.push_back(off);
    off += static_cast<std::size_t>(widths_[l]);
  }
  off_h_ = off;
  off += prediction_width();
  theta_.assign(off, 0.0);

  Rng rng(derive_seed(seed, {kInitStream}));
  for (std::size_t k = 0; k < dense_begin_; ++k) theta_[k] = rng.normal(0.0, 0.01);
  for (int l = 0; l < num_layers_; ++l) {
    const double a = std::sqrt(6.0 / (in_widths_[l] + widths_[l]));
    for (std::size_t k = off_w_[l]; k < off_b_[l]; ++k) theta_[k] = rng.uniform(-a, a);
  }
  const double a = std::sqrt(6.0 / (static_cast<double>(prediction_width()) + 1.0));
  for (std::size_t k = off_h_; k < theta_.size(); ++k) theta_[k] = rng.uniform(-a, a);
}

void NeuMf::forward(Index user, Index item, Rng* dropout_rng, Pass& pass) const {
  const auto f = static_cast<std::size_t>(factors_);
  pass.user = user;
  pass.item = item;
  pass.gmf.resize(f);
  const double* pgu = theta_.data() + pg(user);
  const double* qgi = theta_.data() + qg(item);
  for (std::size_t k = 0; k < f; ++k) pass.gmf[k] = pgu[k] * qgi[k];

  pass.acts.resize(static_cast<std::size_t>(num_layers_) + 1);
  pass.pre.resize(static_cast<std::size_t>(num_layers_));
  const bool drop = dropout_rng != nullptr && dropout_ > 0.0;
  pass.masks.resize(drop ? static_cast<std::size_t>(num_layers_) : 0);
  auto& x0 = pass.acts[0];
  x0.resize(2 * f);
  std::copy_n(theta_.data() + pm(user), f, x0.begin());
  std::copy_n(theta_.data() + qm(item), f, x0.begin() + static_cast<std::ptrdiff_t>(f));
  const double keep_scale = dropout_ < 1.0 ? 1.0 / (1.0 - dropout_) : 0.0;
  for (int l = 0; l < num_layers_; ++l) {
    const auto out = static_cast<std::size_t>(widths_[l]);
    const auto in = static_cast<std::size_t>(in_widths_[l]);
    const double* w = theta_.data() + off_w_[l];
    const double* b = theta_.data() + off_b_[l];
    const auto& x = pass.acts[l];
    auto& z = pass.pre[l];
    auto& a = pass.acts[l + 1];
    z.resize(out);
    a.resize(out);
    for (std::size_t r = 0; r < out; ++r) {
      double s = b[r];
      const double* wr = w + r * in;
      for (std::size_t c = 0; c < in; ++c) s += wr[c] * x[c];
      z[r] = s;
      a[r] = s > 0.0 ? s : 0.0;
    }
    if (drop) {
      auto& m = pass.masks[l];
      m.resize(out);
      for (std::size_t r = 0; r < out; ++r) {
        m[r] = dropout_rng->uniform() >= dropout_ ? keep_scale : 0.0;
        a[r] *= m[r];
      }
    }
  }
  const double* h = theta_.data() + off_h_;
  double pred = 0.0;
  for (std::size_t k = 0; k < f; ++k) pred += h[k] * pass.gmf[k];
  const auto& last = pass.acts.back();
  for (std::size_t k = 0; k < last.size(); ++k) pred += h[f + k] * last[k];
  pass.pred = pred;
}

void NeuMf::backward(const Pass& pass, double dpred, std::vector<double>& grad) const {
  const auto f = static_cast<std::size_t>(factors_);
  const double* h = theta_.data() + off_h_;
  double* gh = grad.data() + off_h_;
  for (std::size_t k = 0; k < f; ++k) gh[k] += dpred * pass.gmf[k];
  const auto& last = pass.acts.back();
  for (std::size_t k = 0; k < last.size(); ++k) gh[f + k] += dpred * last[k];

  // GMF branch.
  const double* pgu = theta_.data() + pg(pass.user);
  const double* qgi = theta_.data() + qg(pass.item);
  double* gpg = grad.data() + pg(pass.user);
  double* gqg = grad.data() + qg(pass.item);
  for (std::size_t k = 0; k < f; ++k) {
    const double dg = dpred * h[k];
    gpg[k] += dg * qgi[k];
    gqg[k] += dg * pgu[k];
  }

  // MLP tower, top down.
  std::vector<double> dx(last.size());
  for (std::size_t k = 0; k < last.size(); ++k) dx[k] = dpred * h[f + k];
  for (int l = num_layers_ - 1; l >= 0; --l) {
    const auto out = static_cast<std::size_t>(widths_[l]);
    const auto in = static_cast<std::size_t>(in_widths_[l]);
    const double* w = theta_.data() + off_w_[l];
    double* gw = grad.data() + off_w_[l];
    double* gb = grad.data() + off_b_[l];
    const auto& x = pass.acts[l];
    const auto& z = pass.pre[l];
    std::vector<double> dz(out);
    for (std::size_t r = 0; r < out; ++r) {
      double d = dx[r];
      if (!pass.masks.empty()) d *= pass.masks[l][r];
      dz[r] = z[r] > 0.0 ? d : 0.0;
    }
    std::vector<double> dprev(in, 0.0);
    for (std::size_t r = 0; r < out; ++r) {
      if (dz[r] == 0.0) continue;
      gb[r] += dz[r];
      double* gwr = gw + r * in;
      const double* wr = w + r * in;
      for (std::size_t c = 0; c < in; ++c) {
        gwr[c] += dz[r] * x[c];
        dprev[c] += wr[c] * dz[r];
      }
    }
    dx = std::move(dprev);
  }
  double* gpm = grad.data() + pm(pass.user);
  double* gqm = grad.data() + qm(pass.item);
  for (std::size_t k = 0; k < f; ++k) {
    gpm[k] += dx[k];
    gqm[k] += dx[f + k];
  }
}

double NeuMf::embedding_norms(const Triple& t) const {
  const auto f = static_cast<std::size_t>(factors_);
  double s = 0.0;
  for (std::size_t base : {pg(t.user), qg(t.pos), qg(t.neg), pm(t.user), qm(t.pos), qm(t.neg)})
    for (std::size_t k = 0; k < f; ++k) s += theta_[base + k] * theta_[base + k];
  return s;
}

double NeuMf::accumulate(std::span<const Triple> batch, Rng* dropout_rng, std::vector<double>& grad) const {
  if (batch.empty()) return 0.0;
  const auto f = static_cast<std::size_t>(factors_);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  Pass pos, neg;
  double loss = 0.0;
  for (const auto& t : batch) {
    forward(t.user, t.pos, dropout_rng, pos);
    forward(t.user, t.neg, dropout_rng, neg);
    const double d = pos.pred - neg.pred;
    loss += neg_log_sigmoid(d) + reg_ * embedding_norms(t);
    const double dd = -sigmoid(-d) * inv_b;
    backward(pos, dd, grad);
    backward(neg, -dd, grad);
    const double c = 2.0 * reg_ * inv_b;
    for (std::size_t base : {pg(t.user), qg(t.pos), qg(t.neg), pm(t.user), qm(t.pos), qm(t.neg)})
      for (std::size_t k = 0; k < f; ++k) grad[base + k] += c * theta_[base + k];
  }
  return loss * inv_b;
}

double NeuMf::batch_loss(std::span<const Triple> batch) const {
  if (batch.empty()) return 0.0;
  Pass pos, neg;
  double loss = 0.0;
  for (const auto& t : batch) {
    forward(t.user, t.pos, nullptr, pos);
    forward(t.user, t.neg, nullptr, neg);
    loss += neg_log_sigmoid(pos.pred - neg.pred) + reg_ * embedding_norms(t);
  }
  return loss / static_cast<double>(batch.size());
}

std::vector<double> NeuMf::batch_gradient(std::span<const Triple> batch) const {
  std::vector<double> grad(theta_.size(), 0.0);
  accumulate(batch, nullptr, grad);
  return grad;
}

void NeuMf::train_to(const TrainingData& data, int to_epoch) {
  const auto f = static_cast<std::size_t>(factors_);
  std::vector<double> grad(theta_.size(), 0.0);
  std::vector<std::size_t> rows;
  while (epochs_done_ < to_epoch) {
    const int epoch = epochs_done_ + 1;
    Rng rng(derive_seed(seed_, {kEpochStream, static_cast<std::uint64_t>(epoch)}));
    auto triples = sample_triples(data.positives, data.exclude, data.n_items, num_ng_, rng);
    rng.shuffle(triples);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < triples.size(); start += static_cast<std::size_t>(batch_size_)) {
      const std::size_t end = std::min(triples.size(), start + static_cast<std::size_t>(batch_size_));
      const std::span<const Triple> batch(triples.data() + start, end - start);
      total += accumulate(batch, &rng, grad);
      ++batches;
      rows.clear();
      for (const auto& t : batch)
        for (std::size_t base : {pg(t.user), qg(t.pos), qg(t.neg), pm(t.user), qm(t.pos), qm(t.neg)})
          rows.push_back(base);
      std::sort(rows.begin(), rows.end());
      rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
      for (std::size_t base : rows) {
        for (std::size_t k = 0; k < f; ++k) {
          theta_[base + k] -= lr_ * grad[base + k];
          grad[base + k] = 0.0;
        }
      }
      for (std::size_t k = dense_begin_; k < theta_.size(); ++k) {
        theta_[k] -= lr_ * grad[k];
        grad[k] = 0.0;
      }
    }
    epoch_losses_.push_back(batches == 0 ? 0.0 : total / static_cast<double>(batches));
    check_finite(epoch);
    epochs_done_ = epoch;
  }
}

double NeuMf::score(Index user, Index item) const {
  Pass pass;
  forward(user, item, nullptr, pass);
  return pass.pred;
}

double NeuMf::train_mode_score(Index user, Index item, Rng& rng) const {
  Pass pass;
  forward(user, item, &rng, pass);
  return pass.pred;
}

std::vector<ParamBlock> NeuMf::parameter_blocks() { return {{"theta", &theta_}}; }

}  // namespace recbench
