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

#ifndef RECBENCH_HPO_HPP
#define RECBENCH_HPO_HPP

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recbench/hyperband.hpp"
#include "recbench/random.hpp"
#include "recbench/searchspace.hpp"
#include "recbench/tpe.hpp"

namespace recbench {

enum class TrialStatus { kCompleted, kPruned, kFailed };

std::string_view trial_status_name(TrialStatus s);
TrialStatus parse_trial_status(std::string_view s);

// One evaluated (config, budget) pair. objective = 1 - validation NDCG@10.
struct Trial {
  int trial_id = 0;
  Config config;
  int budget_epochs = 0;
  double objective = 1.0;
  double wall_seconds = 0.0;
  TrialStatus status = TrialStatus::kCompleted;
};

struct Suggestion {
  int trial_id = 0;
  Config config;
  int budget_epochs = 0;
};

enum class Algorithm { kRandom, kAnneal, kTpe, kSmac, kGpbo, kHyperband, kBohb };

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view s);
bool is_multi_fidelity(Algorithm a);

struct AnnealSettings {
  double initial_sigma = 0.2;
  double sigma_decay = 0.95;
  double temperature_decay = 0.9;
  int temperature_window = 5;
  double categorical_resample = 0.2;
};

struct SurrogateSettings {
  int n_startup = 5;
  double xi = 0.01;
  int gp_candidates = 1024;
  int smac_pool = 1000;
  int smac_neighbors = 10;
  double smac_neighbor_sigma = 0.1;
  int smac_trees = 10;
  int smac_min_leaf = 3;
};

struct BohbSettings {
  double random_fraction = 1.0 / 3.0;
  int min_points_offset = 2;  // a budget level qualifies with >= dim + offset points
};

struct OptimizerSettings {
  Algorithm algorithm = Algorithm::kRandom;
  int trials = 20;
  int eta = 3;
  int b_min = 5;
  int b_max = 30;
  std::uint64_t seed = 0;
  // Multi-fidelity optimizers repeat whole schedules until this many epochs
  // are consumed; 0 means trials * b_max.
  long epoch_budget = 0;
  AnnealSettings anneal;
  TpeSettings tpe;
  SurrogateSettings surrogate;
  BohbSettings bohb;

  long effective_epoch_budget() const { return epoch_budget > 0 ? epoch_budget : static_cast<long>(trials) * b_max; }
};

OptimizerSettings optimizer_settings_from_json(const Json& j);
Json optimizer_settings_to_json(const OptimizerSettings& s);

// Sequential model-based contract: suggest() and observe() strictly alternate
// per pending trial. History is append-only.
class Optimizer {
 public:
  Optimizer(SearchSpace space, std::uint64_t seed, int full_budget);
  virtual ~Optimizer() = default;

  virtual Algorithm algorithm() const = 0;
  virtual Suggestion suggest() = 0;
  void observe(const Trial& trial);

  // False while a multi-fidelity schedule is mid-way; always true otherwise.
  virtual bool at_schedule_boundary() const { return true; }

  const SearchSpace& space() const { return space_; }
  int full_budget() const { return full_budget_; }
  const std::vector<Trial>& history() const { return history_; }
  const Trial* incumbent() const { return incumbent_ ? &history_[*incumbent_] : nullptr; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Full-budget, non-pruned trials: the data non-fidelity surrogates fit on.
  std::vector<const Trial*> full_budget_trials() const;

 protected:
  virtual void on_observe(const Trial& /*trial*/) {}
  int next_trial_id() { return next_id_++; }
  Suggestion random_suggestion(int budget);

  SearchSpace space_;
  Rng rng_;
  int full_budget_;
  std::vector<Trial> history_;
  std::optional<std::size_t> incumbent_;
  std::vector<std::string> warnings_;

 private:
  int next_id_ = 0;
};

class RandomSearch final : public Optimizer {
 public:
  RandomSearch(SearchSpace space, std::uint64_t seed, int full_budget) : Optimizer(std::move(space), seed, full_budget) {}
  Algorithm algorithm() const override { return Algorithm::kRandom; }
  Suggestion suggest() override { return random_suggestion(full_budget_); }
};

// Simulated annealing around a center config in the unit cube.
class Anneal final : public Optimizer {
 public:
  Anneal(SearchSpace space, std::uint64_t seed, int full_budget, AnnealSettings settings = {});
  Algorithm algorithm() const override { return Algorithm::kAnneal; }
  Suggestion suggest() override;

  static double acceptance_probability(double delta, double temperature);
  double sigma(int k) const;
  double temperature(int k) const;
  const std::optional<Config>& center() const { return center_; }
  std::optional<double> center_objective() const { return center_objective_; }

 protected:
  void on_observe(const Trial& trial) override;

 private:
  AnnealSettings settings_;
  int proposals_ = 0;
  std::optional<Config> center_;
  std::optional<double> center_objective_;
  std::vector<double> early_objectives_;
  // trial_id -> proposal index k
  std::vector<std::pair<int, int>> pending_;
};

class TpeOptimizer final : public Optimizer {
 public:
  TpeOptimizer(SearchSpace space, std::uint64_t seed, int full_budget, TpeSettings settings = {});
  Algorithm algorithm() const override { return Algorithm::kTpe; }
  Suggestion suggest() override;

 private:
  TpeSettings settings_;
};

class Gpbo final : public Optimizer {
 public:
  Gpbo(SearchSpace space, std::uint64_t seed, int full_budget, SurrogateSettings settings = {});
  Algorithm algorithm() const override { return Algorithm::kGpbo; }
  Suggestion suggest() override;

  // Unit-cube candidates and their EI from the most recent model-based
  // suggestion (empty after a random fallback).
  const std::vector<std::vector<double>>& last_candidates() const { return last_candidates_; }
  const std::vector<double>& last_acquisition() const { return last_acquisition_; }

 private:
  SurrogateSettings settings_;
  std::vector<std::vector<double>> last_candidates_;
  std::vector<double> last_acquisition_;
};

class Smac final : public Optimizer {
 public:
  Smac(SearchSpace space, std::uint64_t seed, int full_budget, SurrogateSettings settings = {});
  Algorithm algorithm() const override { return Algorithm::kSmac; }
  Suggestion suggest() override;

  const std::vector<Config>& last_pool() const { return last_pool_; }
  const std::vector<double>& last_acquisition() const { return last_acquisition_; }

 private:
  SurrogateSettings settings_;
  std::vector<Config> last_pool_;
  std::vector<double> last_acquisition_;
};

// Successive-halving brackets over the epoch budget. New configurations are
// drawn lazily, at the moment their first-rung trial is suggested.
class Hyperband : public Optimizer {
 public:
  Hyperband(SearchSpace space, std::uint64_t seed, int b_min, int b_max, int eta);
  Algorithm algorithm() const override { return Algorithm::kHyperband; }
  Suggestion suggest() override;
  bool at_schedule_boundary() const override;

  const std::vector<Bracket>& schedule() const { return schedule_; }
  int schedules_started() const { return schedules_started_; }

  // Draws a configuration for a first rung.
  virtual Config propose_new_config(bool* was_random);

 protected:
  void on_observe(const Trial& trial) override;

 private:
  struct Member {
    Config config;
    int trial_id = -1;
    bool observed = false;
    double objective = 1.0;
  };

  void advance();

  std::vector<Bracket> schedule_;
  int eta_;
  int schedules_started_ = 0;
  std::size_t bracket_ = 0;
  std::size_t rung_ = 0;
  bool active_ = false;
  std::vector<Member> members_;  // current rung
  std::size_t next_member_ = 0;  // next member to suggest
};

class Bohb final : public Hyperband {
 public:
  Bohb(SearchSpace space, std::uint64_t seed, int b_min, int b_max, int eta, TpeSettings tpe = {},
       BohbSettings settings = {});
  Algorithm algorithm() const override { return Algorithm::kBohb; }
  Config propose_new_config(bool* was_random) override;

  // Largest budget with at least dim + offset observations, if any.
  std::optional<int> model_budget() const;

 private:
  TpeSettings tpe_;
  BohbSettings settings_;
};

std::unique_ptr<Optimizer> make_optimizer(const OptimizerSettings& settings, const SearchSpace& space,
                                          int full_budget);

}  // namespace recbench

#endif  // RECBENCH_HPO_HPP
