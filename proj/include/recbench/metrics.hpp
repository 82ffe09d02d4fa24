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

#ifndef RECBENCH_METRICS_HPP
#define RECBENCH_METRICS_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "recbench/dataio.hpp"
#include "recbench/models.hpp"

namespace recbench {

enum class Metric { kHr, kNdcg };

std::string_view metric_name(Metric m);
Metric parse_metric(std::string_view s);

// Binary-gain NDCG of a top-N list; 0 when test_items is empty.
double ndcg_at_n(std::span<const Index> topn, std::span<const Index> test_items, std::size_t n);

// 1 if any test item appears in the top-N list.
double hr_at_n(std::span<const Index> topn, std::span<const Index> test_items, std::size_t n);

struct EvalResult {
  Metric metric = Metric::kNdcg;
  std::size_t cutoff = 10;
  std::vector<std::pair<Index, double>> per_user;  // users with targets only
  double mean = 0.0;
};

// Ranks each user's candidates once (at the largest cutoff) and scores HR and
// NDCG at every cutoff. Users without targets or candidates are excluded.
std::vector<EvalResult> evaluate(const Recommender& model, const UserItems& targets, const CandidateLists& candidates,
                                 std::span<const std::size_t> cutoffs);

const EvalResult& find_result(const std::vector<EvalResult>& results, Metric metric, std::size_t cutoff);

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for one value
};

Aggregate aggregate_rounds(std::span<const double> values);

struct MetricRow {
  std::string dataset;
  std::string model;
  std::string optimizer;
  Metric metric = Metric::kNdcg;
  std::size_t cutoff = 10;
  int round = 0;
  double value = 0.0;
};

void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows);

}  // namespace recbench

#endif  // RECBENCH_METRICS_HPP
