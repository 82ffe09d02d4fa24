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

#include "recbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "recbench/error.hpp"

namespace recbench {

namespace {

std::vector<Index> sorted_copy(std::span<const Index> items) {
  std::vector<Index> v(items.begin(), items.end());
  if (!std::is_sorted(v.begin(), v.end())) std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::string_view metric_name(Metric m) { return m == Metric::kHr ? "hr" : "ndcg"; }

Metric parse_metric(std::string_view s) {
  if (s == "hr") return Metric::kHr;
  if (s == "ndcg") return Metric::kNdcg;
  throw Error(ErrorCode::kInvalidSpec, "unknown metric '" + std::string(s) + "'");
}

double ndcg_at_n(std::span<const Index> topn, std::span<const Index> test_items, std::size_t n) {
  if (test_items.empty() || n == 0) return 0.0;
  const auto test = sorted_copy(test_items);
  const std::size_t len = std::min(n, topn.size());
  double dcg = 0.0;
  for (std::size_t pos = 0; pos < len; ++pos)
    if (std::binary_search(test.begin(), test.end(), topn[pos])) dcg += 1.0 / std::log2(static_cast<double>(pos) + 2.0);
  double idcg = 0.0;
  const std::size_t ideal = std::min(n, test.size());
  for (std::size_t k = 0; k < ideal; ++k) idcg += 1.0 / std::log2(static_cast<double>(k) + 2.0);
  return dcg / idcg;
}

double hr_at_n(std::span<const Index> topn, std::span<const Index> test_items, std::size_t n) {
  const auto test = sorted_copy(test_items);
  const std::size_t len = std::min(n, topn.size());
  for (std::size_t pos = 0; pos < len; ++pos)
    if (std::binary_search(test.begin(), test.end(), topn[pos])) return 1.0;
  return 0.0;
}

std::vector<EvalResult> evaluate(const Recommender& model, const UserItems& targets, const CandidateLists& candidates,
                                 std::span<const std::size_t> cutoffs) {
  std::vector<EvalResult> results;
  std::size_t max_cut = 0;
  for (std::size_t c : cutoffs) {
    results.push_back({Metric::kHr, c, {}, 0.0});
    results.push_back({Metric::kNdcg, c, {}, 0.0});
    max_cut = std::max(max_cut, c);
  }
  std::vector<double> scores;
  std::vector<Index> top;
  for (Index u = 0; u < targets.n_users(); ++u) {
    const auto tgt = targets.of(u);
    if (tgt.empty() || static_cast<std::size_t>(u) >= candidates.size()) continue;
    const auto& cand = candidates[static_cast<std::size_t>(u)];
    if (cand.empty()) continue;
    scores.resize(cand.size());
    model.score_items(u, cand, scores);
    top.clear();
    for (std::size_t p : topn_positions(scores, cand, max_cut)) top.push_back(cand[p]);
    for (auto& r : results) {
      const double v = r.metric == Metric::kHr ? hr_at_n(top, tgt, r.cutoff) : ndcg_at_n(top, tgt, r.cutoff);
      r.per_user.emplace_back(u, v);
    }
  }
  for (auto& r : results) {
    double s = 0.0;
    for (const auto& [u, v] : r.per_user) s += v;
    r.mean = r.per_user.empty() ? 0.0 : s / static_cast<double>(r.per_user.size());
  }
  return results;
}

const EvalResult& find_result(const std::vector<EvalResult>& results, Metric metric, std::size_t cutoff) {
  for (const auto& r : results)
    if (r.metric == metric && r.cutoff == cutoff) return r;
  throw Error(ErrorCode::kInvalidSpec, "no result for " + std::string(metric_name(metric)) + "@" + std::to_string(cutoff));
}

Aggregate aggregate_rounds(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyAggregate, "no values to aggregate");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows) {
  out << "dataset,model,optimizer,metric,cutoff,round,value\n";
  char buf[32];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.value);
    out << r.dataset << ',' << r.model << ',' << r.optimizer << ',' << metric_name(r.metric) << ',' << r.cutoff << ','
        << r.round << ',' << buf << '\n';
  }
}

}  // namespace recbench
