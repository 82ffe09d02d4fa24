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

#ifndef RECBENCH_GP_HPP
#define RECBENCH_GP_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace recbench {

double matern52(double distance, double length_scale);

double normal_pdf(double z);
double normal_cdf(double z);

// EI for minimisation: (best - mu - xi) Phi(z) + sigma phi(z); with sigma = 0
// it degenerates to max(0, best - mu - xi).
double expected_improvement(double mean, double stddev, double best, double xi);

// Index of the first maximum.
std::size_t argmax_first(std::span<const double> values);

struct GpPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

// Shifts to mean 0 and scales to unit sample std (scale 1 when constant).
std::vector<double> standardize(std::span<const double> y);

// Zero-mean GP with a unit-variance isotropic Matern-5/2 kernel, meant for
// standardised targets. The length scale is picked from a fixed grid by log
// marginal likelihood. Throws NumericalFailure when no Cholesky succeeds with
// jitter up to max_jitter.
class GaussianProcess {
 public:
  struct Options {
    std::vector<double> length_scales{0.1, 0.2, 0.5, 1.0};
    double jitter = 1e-6;
    double max_jitter = 1e-3;
  };

  GaussianProcess() = default;

  void fit(const std::vector<std::vector<double>>& x, std::span<const double> y, const Options& options);
  void fit(const std::vector<std::vector<double>>& x, std::span<const double> y) { fit(x, y, Options{}); }

  GpPrediction predict(std::span<const double> x) const;

  double length_scale() const { return length_scale_; }
  double jitter() const { return jitter_; }
  double log_marginal_likelihood() const { return lml_; }


 private:
  bool try_fit(double ell, double jitter);

  Eigen::MatrixXd x_;
  Eigen::VectorXd z_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double length_scale_ = 0.0;
  double jitter_ = 0.0;
  double lml_ = 0.0;
};

}  // namespace recbench

#endif  // RECBENCH_GP_HPP
