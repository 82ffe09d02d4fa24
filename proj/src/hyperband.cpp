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

#include "recbench/hyperband.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "recbench/error.hpp"
#include "recbench/hpo.hpp"

namespace recbench {

std::vector<Bracket> hyperband_schedule(int b_min, int b_max, int eta) {
  if (b_min <= 0 || b_max < b_min || eta < 2)
    throw Error(ErrorCode::kInvalidSchedule, "need 0 < b_min <= b_max and eta >= 2, got b_min=" +
                                                 std::to_string(b_min) + " b_max=" + std::to_string(b_max) +
                                                 " eta=" + std::to_string(eta));
  // Largest s with eta^s * b_min <= b_max, in exact integer arithmetic.
  int s_max = 0;
  for (long p = eta; p * b_min <= b_max; p *= eta) ++s_max;

  std::vector<Bracket> schedule;
  for (int s = s_max; s >= 0; --s) {
    long eta_s = 1;
    for (int i = 0; i < s; ++i) eta_s *= eta;
    const long numerator = static_cast<long>(s_max + 1) * eta_s;
    int n = static_cast<int>((numerator + s) / (s + 1));
    int r = static_cast<int>(b_max / eta_s);
    Bracket bracket{s, {}};
    for (int i = 0; i <= s && n > 0; ++i) {
      bracket.rungs.push_back({n, i == s ? b_max : std::min(r, b_max)});
      n /= eta;
      r = std::min(r * eta, b_max);
    }
    schedule.push_back(std::move(bracket));
  }
  return schedule;
}

long schedule_epoch_cost(const std::vector<Bracket>& schedule) {
  long total = 0;
  for (const Bracket& b : schedule) {
    int previous = 0;
    for (const Rung& r : b.rungs) {
      total += static_cast<long>(r.n_configs) * (r.budget - previous);
      previous = r.budget;
    }
  }
  return total;
}

long schedule_epoch_cost_from_scratch(const std::vector<Bracket>& schedule) {
  long total = 0;
  for (const Bracket& b : schedule)
    for (const Rung& r : b.rungs) total += static_cast<long>(r.n_configs) * r.budget;
  return total;
}

Hyperband::Hyperband(SearchSpace space, std::uint64_t seed, int b_min, int b_max, int eta)
    : Optimizer(std::move(space), seed, b_max), schedule_(hyperband_schedule(b_min, b_max, eta)), eta_(eta) {}

Config Hyperband::propose_new_config(bool* was_random) {
  if (was_random) *was_random = true;
  return sample_uniform(space_, rng_);
}

bool Hyperband::at_schedule_boundary() const {
  if (!active_) return true;
  if (bracket_ + 1 != schedule_.size() || rung_ + 1 != schedule_[bracket_].rungs.size()) return false;
  if (next_member_ < members_.size()) return false;
  return std::all_of(members_.begin(), members_.end(), [](const Member& m) { return m.observed; });
}

void Hyperband::advance() {
  const auto fresh_rung = [this] {
    members_.assign(static_cast<std::size_t>(schedule_[bracket_].rungs[rung_].n_configs), Member{});
    next_member_ = 0;
  };
  if (!active_) {
    active_ = true;
    ++schedules_started_;
    bracket_ = 0;
    rung_ = 0;
    fresh_rung();
    return;
  }
  if (!std::all_of(members_.begin(), members_.end(), [](const Member& m) { return m.observed; }))
    throw Error(ErrorCode::kInvalidSchedule, "rung advanced before all its trials were observed");

  const Bracket& bracket = schedule_[bracket_];
  if (rung_ + 1 < bracket.rungs.size()) {
    std::vector<Member> ranked = members_;
    std::stable_sort(ranked.begin(), ranked.end(), [](const Member& a, const Member& b) {
      return a.objective != b.objective ? a.objective < b.objective : a.trial_id < b.trial_id;
    });
    ++rung_;
    ranked.resize(static_cast<std::size_t>(bracket.rungs[rung_].n_configs));
    for (Member& m : ranked) m = Member{m.config, -1, false, 1.0};
    members_ = std::move(ranked);
    next_member_ = 0;
    return;
  }
  rung_ = 0;
  if (bracket_ + 1 < schedule_.size()) {
    ++bracket_;
  } else {
    bracket_ = 0;
    ++schedules_started_;
  }
  fresh_rung();
}

Suggestion Hyperband::suggest() {
  if (!active_ || next_member_ >= members_.size()) advance();
  Member& m = members_[next_member_++];
  if (rung_ == 0) m.config = propose_new_config(nullptr);
  m.trial_id = next_trial_id();
  return {m.trial_id, m.config, schedule_[bracket_].rungs[rung_].budget};
}

void Hyperband::on_observe(const Trial& trial) {
  for (Member& m : members_) {
    if (m.trial_id == trial.trial_id) {
      m.observed = true;
      m.objective = trial.objective;
      return;
    }
  }
  throw Error(ErrorCode::kInvalidConfig, "trial " + std::to_string(trial.trial_id) + " is not pending in this rung");
}

Bohb::Bohb(SearchSpace space, std::uint64_t seed, int b_min, int b_max, int eta, TpeSettings tpe,
           BohbSettings settings)
    : Hyperband(std::move(space), seed, b_min, b_max, eta), tpe_(tpe), settings_(settings) {}

std::optional<int> Bohb::model_budget() const {
  std::map<int, std::size_t> counts;
  for (const Trial& t : history_)
    if (t.status != TrialStatus::kFailed) ++counts[t.budget_epochs];
  const std::size_t needed = space_.dim() + static_cast<std::size_t>(std::max(0, settings_.min_points_offset));
  for (auto it = counts.rbegin(); it != counts.rend(); ++it)
    if (it->second >= needed) return it->first;
  return std::nullopt;
}

Config Bohb::propose_new_config(bool* was_random) {
  const bool coin = rng_.bernoulli(settings_.random_fraction);
  const std::optional<int> budget = model_budget();
  if (coin || !budget) {
    if (was_random) *was_random = true;
    return sample_uniform(space_, rng_);
  }
  std::vector<std::vector<double>> points;
  std::vector<double> objectives;
  for (const Trial& t : history_) {
    if (t.status == TrialStatus::kFailed || t.budget_epochs != *budget) continue;
    points.push_back(encode_unit(space_, t.config));
    objectives.push_back(t.objective);
  }
  if (was_random) *was_random = false;
  return decode_unit(space_, tpe_propose(space_, points, objectives, tpe_, rng_).unit);
}

}  // namespace recbench
