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

#ifndef RECBENCH_HYPERBAND_HPP
#define RECBENCH_HYPERBAND_HPP

#include <vector>

namespace recbench {

struct Rung {
  int n_configs = 0;
  int budget = 0;
};

struct Bracket {
  int s = 0;
  std::vector<Rung> rungs;
};

// Brackets s = s_max..0. Rung i+1 keeps floor(n_i / eta) configs at
// min(r_i * eta, b_max) epochs; the last rung of every bracket runs at b_max.
// Throws InvalidSchedule unless 0 < b_min <= b_max and eta >= 2.
std::vector<Bracket> hyperband_schedule(int b_min, int b_max, int eta);

// Epochs one pass over the schedule costs when promoted configs resume from
// their previous rung instead of restarting.
long schedule_epoch_cost(const std::vector<Bracket>& schedule);

// The same pass counted with every rung trained from scratch.
long schedule_epoch_cost_from_scratch(const std::vector<Bracket>& schedule);

}  // namespace recbench

#endif  // RECBENCH_HYPERBAND_HPP
