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

#ifndef RECBENCH_TPE_HPP
#define RECBENCH_TPE_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "recbench/random.hpp"
#include "recbench/searchspace.hpp"

namespace recbench {

struct TpeSettings {
  double gamma = 0.25;
  int n_candidates = 24;
  int n_startup = 5;
  double min_bandwidth = 0.02;
};

// (|good|, |bad|) for n observations: good = max(1, ceil(gamma * n)).
std::pair<std::size_t, std::size_t> tpe_split_sizes(std::size_t n, double gamma);

// Equal-weight mixture of Gaussians truncated to [0, 1]. With no centers it
// is the uniform density.
class TruncatedParzen {
 public:
  TruncatedParzen() = default;
  TruncatedParzen(std::vector<double> centers, double min_bandwidth);

  double bandwidth() const { return bandwidth_; }
  const std::vector<double>& centers() const { return centers_; }
  double log_pdf(double x) const;
  double sample(Rng& rng) const;

 private:
  std::vector<double> centers_;
  std::vector<double> log_mass_;  // log of each component's mass inside [0, 1]
  double bandwidth_ = 1.0;
};

// Scott-style bandwidth sigma * n^(-1/5), floored at min_bandwidth.
double parzen_bandwidth(std::span<const double> centers, double min_bandwidth);

// Add-one smoothed frequencies: (count_k + 1) / (n + K).
std::vector<double> categorical_probabilities(std::span<const std::size_t> counts);

// Per-dimension densities over one observation group.
class TpeDensity {
 public:
  TpeDensity(const SearchSpace& space, const std::vector<std::vector<double>>& points, double min_bandwidth);

  double log_density(std::span<const double> u) const;
  std::vector<double> sample(Rng& rng) const;

 private:
  struct Dim {
    bool categorical = false;
    std::size_t n_choices = 0;
    TruncatedParzen parzen;
    std::vector<double> log_probs;
    std::vector<double> probs;
  };
  std::vector<Dim> dims_;
};

struct TpeProposal {
  std::vector<double> unit;
  double log_ratio = 0.0;
};

// Ranks observations by objective (stable), splits off the best gamma
// fraction, draws candidates from the good density and returns the one
// maximising log l(x) - log g(x). Requires at least one observation.
TpeProposal tpe_propose(const SearchSpace& space, const std::vector<std::vector<double>>& points,
                        std::span<const double> objectives, const TpeSettings& settings, Rng& rng);

}  // namespace recbench

#endif  // RECBENCH_TPE_HPP
