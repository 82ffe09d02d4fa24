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

#include "recbench/hpo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recbench/error.hpp"

namespace recbench {

std::string_view trial_status_name(TrialStatus s) {
  switch (s) {
    case TrialStatus::kCompleted: return "completed";
    case TrialStatus::kPruned: return "pruned";
    case TrialStatus::kFailed: return "failed";
  }
  return "unknown";
}

TrialStatus parse_trial_status(std::string_view s) {
  if (s == "completed") return TrialStatus::kCompleted;
  if (s == "pruned") return TrialStatus::kPruned;
  if (s == "failed") return TrialStatus::kFailed;
  throw Error(ErrorCode::kParseError, "unknown trial status '" + std::string(s) + "'");
}

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kRandom: return "random";
    case Algorithm::kAnneal: return "anneal";
    case Algorithm::kTpe: return "tpe";
    case Algorithm::kSmac: return "smac";
    case Algorithm::kGpbo: return "gpbo";
    case Algorithm::kHyperband: return "hyperband";
    case Algorithm::kBohb: return "bohb";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view s) {
  for (Algorithm a : {Algorithm::kRandom, Algorithm::kAnneal, Algorithm::kTpe, Algorithm::kSmac, Algorithm::kGpbo,
                      Algorithm::kHyperband, Algorithm::kBohb})
    if (algorithm_name(a) == s) return a;
  throw Error(ErrorCode::kInvalidConfig, "unknown optimizer '" + std::string(s) + "'");
}

bool is_multi_fidelity(Algorithm a) { return a == Algorithm::kHyperband || a == Algorithm::kBohb; }

namespace {

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
}

}  // namespace

OptimizerSettings optimizer_settings_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "optimizer settings must be an object");
  OptimizerSettings s;
  try {
    if (j.contains("algorithm")) s.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    read_if(j, "trials", s.trials);
    read_if(j, "eta", s.eta);
    read_if(j, "b_min", s.b_min);
    read_if(j, "b_max", s.b_max);
    read_if(j, "seed", s.seed);
    read_if(j, "epoch_budget", s.epoch_budget);
    if (j.contains("anneal")) {
      const Json& a = j.at("anneal");
      read_if(a, "initial_sigma", s.anneal.initial_sigma);
      read_if(a, "sigma_decay", s.anneal.sigma_decay);
      read_if(a, "temperature_decay", s.anneal.temperature_decay);
      read_if(a, "temperature_window", s.anneal.temperature_window);
      read_if(a, "categorical_resample", s.anneal.categorical_resample);
    }
    if (j.contains("tpe")) {
      const Json& t = j.at("tpe");
      read_if(t, "gamma", s.tpe.gamma);
      read_if(t, "n_candidates", s.tpe.n_candidates);
      read_if(t, "n_startup", s.tpe.n_startup);
      read_if(t, "min_bandwidth", s.tpe.min_bandwidth);
    }
    if (j.contains("surrogate")) {
      const Json& g = j.at("surrogate");
      read_if(g, "n_startup", s.surrogate.n_startup);
      read_if(g, "xi", s.surrogate.xi);
      read_if(g, "gp_candidates", s.surrogate.gp_candidates);
      read_if(g, "smac_pool", s.surrogate.smac_pool);
      read_if(g, "smac_neighbors", s.surrogate.smac_neighbors);
      read_if(g, "smac_neighbor_sigma", s.surrogate.smac_neighbor_sigma);
      read_if(g, "smac_trees", s.surrogate.smac_trees);
      read_if(g, "smac_min_leaf", s.surrogate.smac_min_leaf);
    }
    if (j.contains("bohb")) {
      const Json& b = j.at("bohb");
      read_if(b, "random_fraction", s.bohb.random_fraction);
      read_if(b, "min_points_offset", s.bohb.min_points_offset);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("optimizer settings: ") + e.what());
  }
  require(s.trials >= 1, "optimizer.trials must be >= 1");
  require(s.epoch_budget >= 0, "optimizer.epoch_budget must be >= 0");
  require(s.tpe.gamma > 0.0 && s.tpe.gamma <= 1.0, "tpe.gamma must be in (0, 1]");
  require(s.tpe.n_candidates >= 1, "tpe.n_candidates must be >= 1");
  require(s.tpe.min_bandwidth > 0.0, "tpe.min_bandwidth must be > 0");
  require(s.surrogate.gp_candidates >= 1 && s.surrogate.smac_pool + s.surrogate.smac_neighbors >= 1,
          "surrogate candidate pools must be non-empty");
  require(s.surrogate.smac_trees >= 1 && s.surrogate.smac_min_leaf >= 1, "smac forest shape must be positive");
  require(s.bohb.random_fraction >= 0.0 && s.bohb.random_fraction <= 1.0, "bohb.random_fraction must be in [0, 1]");
  if (is_multi_fidelity(s.algorithm)) hyperband_schedule(s.b_min, s.b_max, s.eta);
  return s;
}

Json optimizer_settings_to_json(const OptimizerSettings& s) {
  Json j;
  j["algorithm"] = std::string(algorithm_name(s.algorithm));
  j["trials"] = s.trials;
  j["eta"] = s.eta;
  j["b_min"] = s.b_min;
  j["b_max"] = s.b_max;
  j["seed"] = s.seed;
  j["epoch_budget"] = s.effective_epoch_budget();
  j["anneal"] = {{"initial_sigma", s.anneal.initial_sigma},
                 {"sigma_decay", s.anneal.sigma_decay},
                 {"temperature_decay", s.anneal.temperature_decay},
                 {"temperature_window", s.anneal.temperature_window},
                 {"categorical_resample", s.anneal.categorical_resample}};
  j["tpe"] = {{"gamma", s.tpe.gamma},
              {"n_candidates", s.tpe.n_candidates},
              {"n_startup", s.tpe.n_startup},
              {"min_bandwidth", s.tpe.min_bandwidth}};
  j["surrogate"] = {{"n_startup", s.surrogate.n_startup},
                    {"xi", s.surrogate.xi},
                    {"gp_candidates", s.surrogate.gp_candidates},
                    {"smac_pool", s.surrogate.smac_pool},
                    {"smac_neighbors", s.surrogate.smac_neighbors},
                    {"smac_neighbor_sigma", s.surrogate.smac_neighbor_sigma},
                    {"smac_trees", s.surrogate.smac_trees},
                    {"smac_min_leaf", s.surrogate.smac_min_leaf}};
  j["bohb"] = {{"random_fraction", s.bohb.random_fraction}, {"min_points_offset", s.bohb.min_points_offset}};
  return j;
}

Optimizer::Optimizer(SearchSpace space, std::uint64_t seed, int full_budget)
    : space_(std::move(space)), rng_(seed), full_budget_(full_budget) {}

void Optimizer::observe(const Trial& trial) {
  for (const Trial& t : history_)
    if (t.trial_id == trial.trial_id)
      throw Error(ErrorCode::kDuplicateTrial, "trial " + std::to_string(trial.trial_id) + " already observed");
  on_observe(trial);
  history_.push_back(trial);
  if (trial.status == TrialStatus::kCompleted && trial.budget_epochs == full_budget_ &&
      (!incumbent_ || trial.objective < history_[*incumbent_].objective))
    incumbent_ = history_.size() - 1;
}

std::vector<const Trial*> Optimizer::full_budget_trials() const {
  std::vector<const Trial*> out;
  for (const Trial& t : history_)
    if (t.status != TrialStatus::kPruned && t.budget_epochs == full_budget_) out.push_back(&t);
  return out;
}

Suggestion Optimizer::random_suggestion(int budget) {
  Config c = sample_uniform(space_, rng_);
  return {next_trial_id(), std::move(c), budget};
}

Anneal::Anneal(SearchSpace space, std::uint64_t seed, int full_budget, AnnealSettings settings)
    : Optimizer(std::move(space), seed, full_budget), settings_(settings) {}

double Anneal::acceptance_probability(double delta, double temperature) {
  if (delta < 0.0) return 1.0;
  if (!(temperature > 0.0)) return delta <= 0.0 ? 1.0 : 0.0;
  return std::exp(-delta / temperature);
}

double Anneal::sigma(int k) const { return settings_.initial_sigma * std::pow(settings_.sigma_decay, k); }

double Anneal::temperature(int k) const {
  double t0 = 1.0;
  const auto window = static_cast<std::size_t>(std::max(2, settings_.temperature_window));
  if (early_objectives_.size() >= window) {
    double mean = 0.0;
    for (double v : early_objectives_) mean += v;
    mean /= static_cast<double>(early_objectives_.size());
    double var = 0.0;
    for (double v : early_objectives_) var += (v - mean) * (v - mean);
    t0 = std::sqrt(var / static_cast<double>(early_objectives_.size() - 1));
  }
  return t0 * std::pow(settings_.temperature_decay, k);
}

Suggestion Anneal::suggest() {
  const int k = proposals_++;
  Config x;
  if (!center_) {
    x = sample_uniform(space_, rng_);
  } else {
    std::vector<double> u = encode_unit(space_, *center_);
    const double step = sigma(k);
    std::vector<std::pair<std::size_t, std::string>> relabel;
    for (std::size_t d = 0; d < space_.dim(); ++d) {
      const ParamSpec& p = space_.params()[d];
      if (p.is_categorical()) {
        if (rng_.bernoulli(settings_.categorical_resample)) {
          const auto& choices = std::get<Categorical>(p.kind()).choices;
          relabel.emplace_back(d, choices[rng_.index(choices.size())]);
        }
      } else {
        u[d] = std::clamp(u[d] + step * rng_.normal(), 0.0, 1.0);
      }
    }
    x = decode_unit(space_, u);
    for (auto& [d, label] : relabel) x.set(space_.params()[d].name(), std::move(label));
  }
  const int id = next_trial_id();
  pending_.emplace_back(id, k);
  return {id, std::move(x), full_budget_};
}

void Anneal::on_observe(const Trial& trial) {
  int k = std::max(0, proposals_ - 1);
  const auto it = std::find_if(pending_.begin(), pending_.end(), [&](const auto& p) { return p.first == trial.trial_id; });
  if (it != pending_.end()) {
    k = it->second;
    pending_.erase(it);
  }
  if (early_objectives_.size() < static_cast<std::size_t>(std::max(2, settings_.temperature_window)))
    early_objectives_.push_back(trial.objective);

  if (!center_) {
    center_ = trial.config;
    center_objective_ = trial.objective;
    return;
  }
  const double delta = trial.objective - *center_objective_;
  bool accept = delta < 0.0;
  if (!accept) accept = rng_.uniform() < acceptance_probability(delta, temperature(k));
  if (accept) {
    center_ = trial.config;
    center_objective_ = trial.objective;
  }
}

std::unique_ptr<Optimizer> make_optimizer(const OptimizerSettings& s, const SearchSpace& space, int full_budget) {
  switch (s.algorithm) {
    case Algorithm::kRandom: return std::make_unique<RandomSearch>(space, s.seed, full_budget);
    case Algorithm::kAnneal: return std::make_unique<Anneal>(space, s.seed, full_budget, s.anneal);
    case Algorithm::kTpe: return std::make_unique<TpeOptimizer>(space, s.seed, full_budget, s.tpe);
    case Algorithm::kSmac: return std::make_unique<Smac>(space, s.seed, full_budget, s.surrogate);
    case Algorithm::kGpbo: return std::make_unique<Gpbo>(space, s.seed, full_budget, s.surrogate);
    case Algorithm::kHyperband: return std::make_unique<Hyperband>(space, s.seed, s.b_min, s.b_max, s.eta);
    case Algorithm::kBohb: return std::make_unique<Bohb>(space, s.seed, s.b_min, s.b_max, s.eta, s.tpe, s.bohb);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown optimizer");
}

}  // namespace recbench
