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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "recbench/error.hpp"
#include "recbench/metrics.hpp"
#include "test_support.hpp"

namespace recbench {
namespace {

using List = std::vector<Index>;

double dcg_oracle(const List& ranked, const std::set<Index>& relevant, std::size_t n) {
  double dcg = 0.0;
  for (std::size_t pos = 0; pos < std::min(n, ranked.size()); ++pos)
    if (relevant.count(ranked[pos])) dcg += 1.0 / std::log2(static_cast<double>(pos) + 2.0);
  return dcg;
}

// Best DCG over every ordering of the candidates.
double best_dcg_by_permutation(List cands, const std::set<Index>& relevant, std::size_t n) {
  std::sort(cands.begin(), cands.end());
  double best = 0.0;
  do best = std::max(best, dcg_oracle(cands, relevant, n));
  while (std::next_permutation(cands.begin(), cands.end()));
  return best;
}

struct Instance {
  List topn;
  List test;
  std::size_t n;
};

Instance random_instance(Rng& rng) {
  const std::size_t catalog = 3 + rng.index(15);
  List items(catalog);
  std::iota(items.begin(), items.end(), 0);
  rng.shuffle(items);
  Instance x;
  x.n = 1 + rng.index(catalog);
  x.topn.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(x.n));
  for (Index i = 0; i < static_cast<Index>(catalog); ++i)
    if (rng.bernoulli(0.25)) x.test.push_back(i);
  return x;
}

TEST(Ndcg, ClosedForms) {
  const List top{7, 3, 9, 1, 4};
  EXPECT_DOUBLE_EQ(ndcg_at_n(top, List{7}, 5), 1.0);
  EXPECT_DOUBLE_EQ(ndcg_at_n(top, List{9}, 5), 0.5);
  const double expected = (1 / std::log2(3.0) + 1 / std::log2(5.0)) / (1 + 1 / std::log2(3.0));
  EXPECT_NEAR(ndcg_at_n(top, List{3, 1}, 5), expected, 1e-15);
  EXPECT_NEAR(expected, 0.6510, 1e-4);
  EXPECT_DOUBLE_EQ(ndcg_at_n(top, List{}, 5), 0.0);
}

TEST(Ndcg, MatchesBruteForceOracle) {
  Rng rng(1);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto x = random_instance(rng);
    const std::set<Index> rel(x.test.begin(), x.test.end());
    double idcg = 0.0;
    for (std::size_t k = 0; k < std::min(x.n, rel.size()); ++k) idcg += 1.0 / std::log2(static_cast<double>(k) + 2.0);
    const double want = rel.empty() ? 0.0 : dcg_oracle(x.topn, rel, x.n) / idcg;
    const double got = ndcg_at_n(x.topn, x.test, x.n);
    ASSERT_NEAR(got, want, 1e-12);
    ASSERT_GE(got, 0.0);
    ASSERT_LE(got, 1.0 + 1e-15);
    // HR is the any-hit indicator, so it agrees with NDCG > 0.
    ASSERT_EQ(hr_at_n(x.topn, x.test, x.n), got > 0.0 ? 1.0 : 0.0);
  }
}

TEST(Ndcg, PerfectOnlyWhenTopPositionsAreRelevant) {
  Rng rng(2);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t size = 2 + rng.index(5);
    List cands(size);
    std::iota(cands.begin(), cands.end(), 0);
    std::set<Index> rel;
    for (Index i = 0; i < static_cast<Index>(size); ++i)
      if (rng.bernoulli(0.4)) rel.insert(i);
    if (rel.empty()) continue;
    const std::size_t n = 1 + rng.index(size);
    const double best = best_dcg_by_permutation(cands, rel, n);
    rng.shuffle(cands);
    const List test(rel.begin(), rel.end());
    const double ndcg = ndcg_at_n(List(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(n)), test, n);
    bool front_relevant = true;
    for (std::size_t k = 0; k < std::min(n, rel.size()); ++k) front_relevant = front_relevant && rel.count(cands[k]);
    ASSERT_EQ(ndcg == 1.0, front_relevant);
    ASSERT_NEAR(ndcg, dcg_oracle(cands, rel, n) / best, 1e-12);
  }
}

TEST(Ndcg, MovingAHitUpNeverHurts) {
  Rng rng(3);
  for (int rep = 0; rep < 500; ++rep) {
    const auto x = random_instance(rng);
    if (x.n < 2) continue;
    auto better = x.topn;
    const std::size_t from = 1 + rng.index(x.n - 1);
    const std::size_t to = rng.index(from);
    std::swap(better[from], better[to]);
    const std::set<Index> rel(x.test.begin(), x.test.end());
    if (!rel.count(x.topn[from])) continue;
    ASSERT_GE(ndcg_at_n(better, x.test, x.n) + 1e-15, ndcg_at_n(x.topn, x.test, x.n));
  }
}

TEST(Hr, AnyHit) {
  const List top{4, 2, 8};
  EXPECT_EQ(hr_at_n(top, List{8}, 3), 1.0);
  EXPECT_EQ(hr_at_n(top, List{5, 6}, 3), 0.0);
  EXPECT_EQ(hr_at_n(top, List{2, 8, 9}, 3), 1.0);
}

TEST(Aggregate, ClosedForms) {
  const std::vector<double> same{0.5, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(aggregate_rounds(same).mean, 0.5);
  EXPECT_DOUBLE_EQ(aggregate_rounds(same).std, 0.0);
  const std::vector<double> two{0.4, 0.6};
  EXPECT_NEAR(aggregate_rounds(two).mean, 0.5, 1e-15);
  EXPECT_NEAR(aggregate_rounds(two).std, 0.1414, 5e-5);
  const std::vector<double> one{0.3};
  EXPECT_EQ(aggregate_rounds(one).std, 0.0);
  try {
    aggregate_rounds(std::vector<double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyAggregate);
  }
}

TEST(Aggregate, MatchesFormula) {
  Rng rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    const std::vector<double> v{rng.uniform(), rng.uniform(), rng.uniform()};
    const double mean = (v[0] + v[1] + v[2]) / 3.0;
    const double var = ((v[0] - mean) * (v[0] - mean) + (v[1] - mean) * (v[1] - mean) + (v[2] - mean) * (v[2] - mean)) / 2.0;
    const auto agg = aggregate_rounds(v);
    ASSERT_NEAR(agg.mean, mean, 1e-12);
    ASSERT_NEAR(agg.std, std::sqrt(var), 1e-12);
  }
}

TEST(Evaluate, SkipsUsersWithoutTargets) {
  // User 1 has no test items and must not pull the mean down.
  const test_support::FixedScores model({{0.9, 0.5, 0.1, 0.0}, {0.9, 0.5, 0.1, 0.0}, {0.1, 0.2, 0.3, 0.4}});
  const UserItems targets(3, {{0, 0}, {2, 0}});
  const CandidateLists cands{{0, 1, 2, 3}, {}, {0, 1, 2, 3}};
  const std::vector<std::size_t> cutoffs{1, 4};
  const auto results = evaluate(model, targets, cands, cutoffs);
  const auto& hr1 = find_result(results, Metric::kHr, 1);
  EXPECT_EQ(hr1.per_user.size(), 2u);
  EXPECT_DOUBLE_EQ(hr1.mean, 0.5);
  const auto& ndcg4 = find_result(results, Metric::kNdcg, 4);
  EXPECT_NEAR(ndcg4.mean, (1.0 + 1.0 / std::log2(5.0)) / 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(find_result(results, Metric::kHr, 4).mean, 1.0);
}

TEST(Evaluate, CsvRows) {
  std::ostringstream out;
  const std::vector<MetricRow> rows{{"lastfm", "bprmf", "tpe", Metric::kNdcg, 10, 2, 0.25}};
  write_metrics_csv(out, rows);
  EXPECT_EQ(out.str(), "dataset,model,optimizer,metric,cutoff,round,value\nlastfm,bprmf,tpe,ndcg,10,2,0.25\n");
  EXPECT_EQ(parse_metric("hr"), Metric::kHr);
  EXPECT_THROW(parse_metric("mrr"), Error);
}

}  // namespace
}  // namespace recbench
