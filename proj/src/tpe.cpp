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

#include "recbench/tpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "recbench/error.hpp"
#include "recbench/gp.hpp"
#include "recbench/hpo.hpp"

namespace recbench {

std::pair<std::size_t, std::size_t> tpe_split_sizes(std::size_t n, double gamma) {
  if (n == 0) return {0, 0};
  const auto good = std::min(n, std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n)))));
  return {good, n - good};
}

double parzen_bandwidth(std::span<const double> centers, double min_bandwidth) {
  const std::size_t n = centers.size();
  if (n < 2) return min_bandwidth;
  const double mean = std::accumulate(centers.begin(), centers.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double c : centers) var += (c - mean) * (c - mean);
  const double sd = std::sqrt(var / static_cast<double>(n - 1));
  return std::max(sd * std::pow(static_cast<double>(n), -0.2), min_bandwidth);
}

TruncatedParzen::TruncatedParzen(std::vector<double> centers, double min_bandwidth)
    : centers_(std::move(centers)), bandwidth_(parzen_bandwidth(centers_, min_bandwidth)) {
  log_mass_.reserve(centers_.size());
  for (double c : centers_) {
    const double mass = normal_cdf((1.0 - c) / bandwidth_) - normal_cdf(-c / bandwidth_);
    log_mass_.push_back(std::log(std::max(mass, std::numeric_limits<double>::min())));
  }
}

double TruncatedParzen::log_pdf(double x) const {
  if (x < 0.0 || x > 1.0) return -std::numeric_limits<double>::infinity();
  if (centers_.empty()) return 0.0;
  const double log_norm = std::log(bandwidth_ * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> terms(centers_.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < centers_.size(); ++k) {
    const double z = (x - centers_[k]) / bandwidth_;
    terms[k] = -0.5 * z * z - log_norm - log_mass_[k];
    top = std::max(top, terms[k]);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  return top + std::log(sum) - std::log(static_cast<double>(centers_.size()));
}

double TruncatedParzen::sample(Rng& rng) const {
  if (centers_.empty()) return rng.uniform();
  const double c = centers_[rng.index(centers_.size())];
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double x = rng.normal(c, bandwidth_);
    if (x >= 0.0 && x <= 1.0) return x;
  }
  return std::clamp(c, 0.0, 1.0);
}

std::vector<double> categorical_probabilities(std::span<const std::size_t> counts) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  const double k = static_cast<double>(counts.size());
  std::vector<double> p;
  p.reserve(counts.size());
  for (std::size_t c : counts) p.push_back((static_cast<double>(c) + 1.0) / (total + k));
  return p;
}

namespace {

std::size_t category_of(double u, std::size_t n_choices) {
  if (n_choices <= 1) return 0;
  const double idx = round_half_up(std::clamp(u, 0.0, 1.0) * static_cast<double>(n_choices - 1));
  return std::min(static_cast<std::size_t>(idx), n_choices - 1);
}

}  // namespace

TpeDensity::TpeDensity(const SearchSpace& space, const std::vector<std::vector<double>>& points,
                       double min_bandwidth) {
  dims_.resize(space.dim());
  for (std::size_t d = 0; d < space.dim(); ++d) {
    Dim& dim = dims_[d];
    const ParamSpec& p = space.params()[d];
    if (p.is_categorical()) {
      dim.categorical = true;
      dim.n_choices = std::get<Categorical>(p.kind()).choices.size();
      std::vector<std::size_t> counts(dim.n_choices, 0);
      for (const auto& u : points) ++counts[category_of(u[d], dim.n_choices)];
      dim.probs = categorical_probabilities(counts);
      for (double q : dim.probs) dim.log_probs.push_back(std::log(q));
    } else {
      std::vector<double> column;
      column.reserve(points.size());
      for (const auto& u : points) column.push_back(u[d]);
      dim.parzen = TruncatedParzen(std::move(column), min_bandwidth);
    }
  }
}

double TpeDensity::log_density(std::span<const double> u) const {
  double total = 0.0;
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    const Dim& dim = dims_[d];
    total += dim.categorical ? dim.log_probs[category_of(u[d], dim.n_choices)] : dim.parzen.log_pdf(u[d]);
  }
  return total;
}

std::vector<double> TpeDensity::sample(Rng& rng) const {
  std::vector<double> u(dims_.size());
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    const Dim& dim = dims_[d];
    if (!dim.categorical) {
      u[d] = dim.parzen.sample(rng);
      continue;
    }
    const double r = rng.uniform();
    double acc = 0.0;
    std::size_t pick = dim.n_choices - 1;
    for (std::size_t k = 0; k < dim.n_choices; ++k) {
      acc += dim.probs[k];
      if (r < acc) {
        pick = k;
        break;
      }
    }
    u[d] = dim.n_choices > 1 ? static_cast<double>(pick) / static_cast<double>(dim.n_choices - 1) : 0.0;
  }
  return u;
}

TpeProposal tpe_propose(const SearchSpace& space, const std::vector<std::vector<double>>& points,
                        std::span<const double> objectives, const TpeSettings& settings, Rng& rng) {
  if (points.empty() || points.size() != objectives.size())
    throw Error(ErrorCode::kInvalidVector, "TPE needs matching non-empty observations");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return objectives[a] < objectives[b]; });
  const auto [n_good, n_bad] = tpe_split_sizes(points.size(), settings.gamma);
  std::vector<std::vector<double>> good, bad;
  for (std::size_t r = 0; r < order.size(); ++r) (r < n_good ? good : bad).push_back(points[order[r]]);

  const TpeDensity l(space, good, settings.min_bandwidth);
  const TpeDensity g(space, bad, settings.min_bandwidth);
  TpeProposal best;
  best.log_ratio = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < settings.n_candidates; ++c) {
    std::vector<double> u = l.sample(rng);
    const double ratio = l.log_density(u) - g.log_density(u);
    if (best.unit.empty() || ratio > best.log_ratio) {
      best.unit = std::move(u);
      best.log_ratio = ratio;
    }
  }
  return best;
}

TpeOptimizer::TpeOptimizer(SearchSpace space, std::uint64_t seed, int full_budget, TpeSettings settings)
    : Optimizer(std::move(space), seed, full_budget), settings_(settings) {}

Suggestion TpeOptimizer::suggest() {
  const auto trials = full_budget_trials();
  if (static_cast<int>(trials.size()) < settings_.n_startup || trials.empty()) return random_suggestion(full_budget_);
  std::vector<std::vector<double>> points;
  std::vector<double> objectives;
  for (const Trial* t : trials) {
    points.push_back(encode_unit(space_, t->config));
    objectives.push_back(t->objective);
  }
  const TpeProposal p = tpe_propose(space_, points, objectives, settings_, rng_);
  return {next_trial_id(), decode_unit(space_, p.unit), full_budget_};
}

}  // namespace recbench
