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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "recbench/bpr.hpp"
#include "recbench/error.hpp"
#include "test_support.hpp"

namespace recbench {
namespace {

using test_support::bpr_config;

std::vector<double> gaussian(Rng& rng, std::size_t n, double sd) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal(0.0, sd);
  return v;
}

template <typename Loss>
std::vector<double> central_difference(std::vector<double>& x, Loss loss, double eps = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double keep = x[k];
    x[k] = keep + eps;
    const double up = loss();
    x[k] = keep - eps;
    const double down = loss();
    x[k] = keep;
    g[k] = (up - down) / (2 * eps);
  }
  return g;
}

std::vector<double> concat(std::initializer_list<const std::vector<double>*> parts) {
  std::vector<double> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

TEST(BprMf, ZeroParametersGiveLogTwo) {
  const std::vector<double> z(8, 0.0);
  EXPECT_NEAR(bprmf_triple_loss(z, z, z, 0.01), std::log(2.0), 1e-15);
  EXPECT_NEAR(fm_triple_loss(0.0, 0.0, z, z, z, 0.01), std::log(2.0), 1e-15);
}

TEST(BprMf, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  const std::size_t k = 6;
  for (int rep = 0; rep < 5; ++rep) {
    auto p = gaussian(rng, k, 0.5), qi = gaussian(rng, k, 0.5), qj = gaussian(rng, k, 0.5);
    const double reg = 0.01;
    std::vector<double> gp(k), gi(k), gj(k);
    const double loss = bprmf_triple_gradient(p, qi, qj, reg, gp, gi, gj);
    EXPECT_DOUBLE_EQ(loss, bprmf_triple_loss(p, qi, qj, reg));
    const auto eval = [&] { return bprmf_triple_loss(p, qi, qj, reg); };
    const auto fd_p = central_difference(p, eval);
    const auto fd_i = central_difference(qi, eval);
    const auto fd_j = central_difference(qj, eval);
    EXPECT_LT(test_support::relative_error(concat({&gp, &gi, &gj}), concat({&fd_p, &fd_i, &fd_j})), 1e-4);
  }
}

TEST(Fm, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  const std::size_t k = 5;
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> w = gaussian(rng, 2, 0.5);
    auto vu = gaussian(rng, k, 0.5), vi = gaussian(rng, k, 0.5), vj = gaussian(rng, k, 0.5);
    const double reg = 0.02;
    const auto g = fm_triple_gradient(w[0], w[1], vu, vi, vj, reg);
    const auto eval = [&] { return fm_triple_loss(w[0], w[1], vu, vi, vj, reg); };
    EXPECT_DOUBLE_EQ(g.loss, eval());
    const std::vector<double> gw{g.w_i, g.w_j};
    const auto fd_w = central_difference(w, eval);
    const auto fd_u = central_difference(vu, eval);
    const auto fd_i = central_difference(vi, eval);
    const auto fd_j = central_difference(vj, eval);
    EXPECT_LT(test_support::relative_error(concat({&gw, &g.v_u, &g.v_i, &g.v_j}), concat({&fd_w, &fd_u, &fd_i, &fd_j})),
              1e-4);
  }
}

TEST(Fm, PairDifferenceIdentity) {
  Rng rng(12);
  const Index users = 4, items = 6;
  FactorizationMachine model(bpr_config(3, 1, 0.01, 0.01), 1, users, items);
  for (auto& block : model.parameter_blocks())
    for (auto& x : *block.values) x = rng.normal();
  auto blocks = model.parameter_blocks();
  const auto& w0 = *blocks[0].values;
  const auto& wu = *blocks[1].values;
  const auto& wi = *blocks[2].values;
  const auto& vu = *blocks[3].values;
  const auto& vi = *blocks[4].values;
  auto full = [&](Index u, Index i) {
    double s = w0[0] + wu[u] + wi[i];
    for (int f = 0; f < 3; ++f) s += vu[u * 3 + f] * vi[i * 3 + f];
    return s;
  };
  for (Index u = 0; u < users; ++u)
    for (Index i = 0; i < items; ++i)
      for (Index j = 0; j < items; ++j) {
        const std::span<const double> ru(vu.data() + u * 3, 3), ri(vi.data() + i * 3, 3), rj(vi.data() + j * 3, 3);
        EXPECT_NEAR(fm_pair_difference(wi[i], wi[j], ru, ri, rj), full(u, i) - full(u, j), 1e-12);
        EXPECT_NEAR(model.score(u, i) - model.score(u, j), full(u, i) - full(u, j), 1e-12);
      }
}

// Users 0,1 like items 0,1; users 2,3 like items 2,3.
UserItems separable() { return UserItems(4, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}, {2, 3}, {3, 2}, {3, 3}}); }

double auc(const Recommender& model, const UserItems& pos, Index n_items) {
  double good = 0, total = 0;
  for (Index u = 0; u < pos.n_users(); ++u)
    for (Index i : pos.of(u))
      for (Index j = 0; j < n_items; ++j) {
        if (pos.contains(u, j)) continue;
        total += 1;
        good += model.score(u, i) > model.score(u, j) ? 1.0 : 0.0;
      }
  return good / total;
}

template <typename Model>
void check_learns_separable() {
  const auto ui = separable();
  const TrainingData data{4, 4, ui, ui};
  int settled = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    Model model(bpr_config(8, 10, 0.01, 1e-4), seed, 4, 4);
    model.train_to(data, 200);
    EXPECT_GT(auc(model, ui, 4), 0.95) << "seed " << seed;
    const auto& losses = model.epoch_losses();
    ASSERT_EQ(losses.size(), 200u);
    bool monotone = true;
    for (std::size_t e = 151; e < 200; ++e) monotone = monotone && losses[e] <= losses[e - 1];
    settled += monotone ? 1 : 0;
  }
  EXPECT_GE(settled, 2);
}

TEST(BprMf, LearnsSeparableData) { check_learns_separable<BprMf>(); }
TEST(Fm, LearnsSeparableData) { check_learns_separable<FactorizationMachine>(); }

TEST(BprMf, HugeStepDiverges) {
  const auto ui = separable();
  BprMf model(bpr_config(4, 2, 1e200, 0.0), 1, 4, 4);
  try {
    model.train_to({4, 4, ui, ui}, 5);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergedTraining);
  }
}

TEST(BprMf, RejectsBadSettings) {
  EXPECT_THROW(BprMf(bpr_config(0, 1, 0.01, 0.01), 1, 2, 2), Error);
  EXPECT_THROW(BprMf(bpr_config(2, 0, 0.01, 0.01), 1, 2, 2), Error);
  EXPECT_THROW(BprMf(bpr_config(2, 1, 0.0, 0.01), 1, 2, 2), Error);
}

}  // namespace
}  // namespace recbench
