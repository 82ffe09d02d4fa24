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

#include "recbench/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "recbench/error.hpp"
#include "recbench/hpo.hpp"

namespace recbench {

double matern52(double distance, double length_scale) {
  const double a = std::sqrt(5.0) * distance / length_scale;
  return (1.0 + a + a * a / 3.0) * std::exp(-a);
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mean, double stddev, double best, double xi) {
  const double gain = best - mean - xi;
  if (!(stddev > 0.0)) return std::max(0.0, gain);
  const double z = gain / stddev;
  return std::max(0.0, gain * normal_cdf(z) + stddev * normal_pdf(z));
}

std::size_t argmax_first(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

std::vector<double> standardize(std::span<const double> y) {
  std::vector<double> out(y.begin(), y.end());
  if (y.empty()) return out;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  double sd = y.size() > 1 ? std::sqrt(var / static_cast<double>(y.size() - 1)) : 0.0;
  if (!(sd > 0.0)) sd = 1.0;
  for (double& v : out) v = (v - mean) / sd;
  return out;
}

namespace {

double distance(const Eigen::MatrixXd& x, Eigen::Index i, std::span<const double> q) {
  double s = 0.0;
  for (Eigen::Index d = 0; d < x.cols(); ++d) {
    const double diff = x(i, d) - q[static_cast<std::size_t>(d)];
    s += diff * diff;
  }
  return std::sqrt(s);
}

}  // namespace

bool GaussianProcess::try_fit(double ell, double jitter) {
  const Eigen::Index n = x_.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double r = (x_.row(i) - x_.row(j)).norm();
      k(i, j) = k(j, i) = matern52(r, ell);
    }
    k(i, i) += jitter;
  }
  llt_.compute(k);
  if (llt_.info() != Eigen::Success) return false;
  const Eigen::MatrixXd l = llt_.matrixL();
  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i))) return false;
    log_det_half += std::log(l(i, i));
  }
  alpha_ = llt_.solve(z_);
  if (!alpha_.allFinite()) return false;
  length_scale_ = ell;
  jitter_ = jitter;
  lml_ = -0.5 * z_.dot(alpha_) - log_det_half - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  return true;
}

void GaussianProcess::fit(const std::vector<std::vector<double>>& x, std::span<const double> y,
                          const Options& options) {
  if (x.empty() || x.size() != y.size()) throw Error(ErrorCode::kInvalidVector, "GP needs matching non-empty X and y");
  const bool scales_ok = !options.length_scales.empty() &&
                         std::all_of(options.length_scales.begin(), options.length_scales.end(), [](double l) { return l > 0.0; });
  if (!scales_ok || !(options.jitter > 0.0) || !(options.max_jitter >= options.jitter))
    throw Error(ErrorCode::kInvalidConfig, "GP needs positive length scales and 0 < jitter <= max_jitter");
  const std::size_t d = x.front().size();
  x_.resize(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != d) throw Error(ErrorCode::kInvalidVector, "GP inputs have mixed dimensions");
    for (std::size_t j = 0; j < d; ++j) x_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i][j];
  }
  z_ = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));

  double best_lml = -std::numeric_limits<double>::infinity();
  double best_ell = 0.0, best_jitter = 0.0;
  bool found = false;
  for (double ell : options.length_scales) {
    for (double jitter = options.jitter; jitter <= options.max_jitter * (1.0 + 1e-9); jitter *= 10.0) {
      if (!try_fit(ell, jitter)) continue;
      if (!found || lml_ > best_lml) {
        best_lml = lml_;
        best_ell = ell;
        best_jitter = jitter;
        found = true;
      }
      break;
    }
  }
  if (!found) throw Error(ErrorCode::kNumericalFailure, "kernel matrix not positive definite up to max jitter");
  try_fit(best_ell, best_jitter);
}

GpPrediction GaussianProcess::predict(std::span<const double> x) const {
  const Eigen::Index n = x_.rows();
  if (static_cast<Eigen::Index>(x.size()) != x_.cols()) throw Error(ErrorCode::kInvalidVector, "GP query dimension");
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k(i) = matern52(distance(x_, i, x), length_scale_);
  GpPrediction p;
  p.mean = k.dot(alpha_);
  const Eigen::VectorXd v = llt_.matrixL().solve(k);
  p.variance = std::max(0.0, 1.0 - v.squaredNorm());
  return p;
}

Gpbo::Gpbo(SearchSpace space, std::uint64_t seed, int full_budget, SurrogateSettings settings)
    : Optimizer(std::move(space), seed, full_budget), settings_(settings) {}

Suggestion Gpbo::suggest() {
  last_candidates_.clear();
  last_acquisition_.clear();
  const auto trials = full_budget_trials();
  if (static_cast<int>(trials.size()) < settings_.n_startup) return random_suggestion(full_budget_);

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (const Trial* t : trials) {
    x.push_back(encode_unit(space_, t->config));
    y.push_back(t->objective);
  }
  const std::vector<double> z = standardize(y);
  GaussianProcess gp;
  try {
    gp.fit(x, z);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNumericalFailure) throw;
    warnings_.push_back(std::string("gpbo: ") + e.what() + "; falling back to random");
    return random_suggestion(full_budget_);
  }
  const double best = *std::min_element(z.begin(), z.end());

  const std::size_t d = space_.dim();
  last_candidates_.reserve(static_cast<std::size_t>(settings_.gp_candidates));
  last_acquisition_.reserve(static_cast<std::size_t>(settings_.gp_candidates));
  for (int c = 0; c < settings_.gp_candidates; ++c) {
    std::vector<double> u(d);
    for (double& v : u) v = rng_.uniform();
    const GpPrediction p = gp.predict(u);
    last_acquisition_.push_back(expected_improvement(p.mean, std::sqrt(p.variance), best, settings_.xi));
    last_candidates_.push_back(std::move(u));
  }
  const std::size_t pick = argmax_first(last_acquisition_);
  return {next_trial_id(), decode_unit(space_, last_candidates_[pick]), full_budget_};
}

}  // namespace recbench
