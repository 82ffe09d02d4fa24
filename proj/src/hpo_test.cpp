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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "recbench/error.hpp"
#include "recbench/gp.hpp"
#include "recbench/hpo.hpp"

namespace recbench {
namespace {

const SearchSpace& line() {
  static const SearchSpace space({ParamSpec::real("x", 0.0, 1.0)});
  return space;
}

Trial completed(const Suggestion& s, double objective) {
  return {s.trial_id, s.config, s.budget_epochs, objective, 0.0, TrialStatus::kCompleted};
}

Trial status_for(const Optimizer& opt, const Suggestion& s, double objective) {
  Trial t = completed(s, objective);
  if (s.budget_epochs < opt.full_budget()) t.status = TrialStatus::kPruned;
  return t;
}

SearchSpace random_space(Rng& rng) {
  std::vector<ParamSpec> params;
  const std::size_t dims = 1 + rng.index(5);
  for (std::size_t d = 0; d < dims; ++d) {
    const std::string name = "p" + std::to_string(d);
    switch (rng.index(4)) {
      case 0: {
        const double lo = rng.uniform(-5, 5);
        params.push_back(ParamSpec::real(name, lo, lo + rng.uniform(0.1, 10)));
        break;
      }
      case 1: {
        const double lo = std::pow(10.0, rng.uniform(-6, 0));
        params.push_back(ParamSpec::real(name, lo, lo * std::pow(10.0, rng.uniform(0.5, 4)), Scale::kLog));
        break;
      }
      case 2: {
        const auto lo = rng.uniform_int(-10, 10);
        params.push_back(ParamSpec::integer(name, lo, lo + rng.uniform_int(1, 50)));
        break;
      }
      default: {
        std::vector<std::string> labels;
        const std::size_t k = 1 + rng.index(5);
        for (std::size_t c = 0; c < k; ++c) labels.push_back("c" + std::to_string(c));
        params.push_back(ParamSpec::categorical(name, labels));
      }
    }
  }
  return SearchSpace(std::move(params));
}

// A smooth objective in [0, 1] over the unit encoding.
double bowl(const SearchSpace& space, const Config& c) {
  const auto u = encode_unit(space, c);
  double s = 0.0;
  for (double v : u) s += (v - 0.3) * (v - 0.3);
  return s / static_cast<double>(u.size());
}

OptimizerSettings settings_for(Algorithm a, std::uint64_t seed) {
  OptimizerSettings s;
  s.algorithm = a;
  s.seed = seed;
  return s;
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all{Algorithm::kRandom, Algorithm::kAnneal, Algorithm::kTpe, Algorithm::kSmac,
                                          Algorithm::kGpbo, Algorithm::kHyperband, Algorithm::kBohb};
  return all;
}

TEST(Observe, IncumbentFollowsStrictImprovement) {
  RandomSearch opt(line(), 1, 30);
  EXPECT_EQ(opt.incumbent(), nullptr);
  const auto a = opt.suggest();
  opt.observe(completed(a, 0.5));
  ASSERT_NE(opt.incumbent(), nullptr);
  EXPECT_EQ(opt.incumbent()->trial_id, a.trial_id);
  const auto b = opt.suggest();
  opt.observe(completed(b, 0.5));
  EXPECT_EQ(opt.incumbent()->trial_id, a.trial_id);
  const auto c = opt.suggest();
  opt.observe(completed(c, 0.4));
  EXPECT_EQ(opt.incumbent()->trial_id, c.trial_id);
  EXPECT_EQ(opt.history().size(), 3u);
}

TEST(Observe, DuplicateTrialIsRejected) {
  RandomSearch opt(line(), 1, 30);
  const auto a = opt.suggest();
  opt.observe(completed(a, 0.5));
  try {
    opt.observe(completed(a, 0.2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateTrial);
  }
  EXPECT_EQ(opt.history().size(), 1u);
}

TEST(Observe, IncumbentIsTheMinimum) {
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    RandomSearch opt(line(), static_cast<std::uint64_t>(rep), 30);
    double best = 2.0;
    int best_id = -1;
    for (int k = 0; k < 50; ++k) {
      const auto s = opt.suggest();
      // Coarse values so equal objectives occur.
      const double y = static_cast<double>(rng.uniform_int(0, 20)) / 20.0;
      opt.observe(completed(s, y));
      if (y < best) {
        best = y;
        best_id = s.trial_id;
      }
    }
    ASSERT_EQ(opt.incumbent()->trial_id, best_id);
  }
}

TEST(Observe, PrunedTrialsNeverBecomeIncumbent) {
  RandomSearch opt(line(), 1, 30);
  auto s = opt.suggest();
  Trial t = completed(s, 0.1);
  t.budget_epochs = 10;
  t.status = TrialStatus::kPruned;
  opt.observe(t);
  EXPECT_EQ(opt.incumbent(), nullptr);
  EXPECT_TRUE(opt.full_budget_trials().empty());
}

TEST(Random, ValidDeterministicFullBudget) {
  const auto space = default_space("neumf");
  RandomSearch a(space, 9, 30), b(space, 9, 30);
  for (int k = 0; k < 10000; ++k) {
    const auto sa = a.suggest();
    const auto sb = b.suggest();
    ASSERT_NO_THROW(validate(space, sa.config));
    ASSERT_TRUE(sa.config.bitwise_equal(sb.config));
    ASSERT_EQ(sa.budget_epochs, 30);
  }
}

TEST(Anneal, AcceptanceProbability) {
  EXPECT_NEAR(Anneal::acceptance_probability(0.7, 0.7), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(std::exp(-1.0), 0.3679, 5e-5);
  EXPECT_EQ(Anneal::acceptance_probability(-0.1, 0.5), 1.0);
  EXPECT_EQ(Anneal::acceptance_probability(-0.1, 0.0), 1.0);
  EXPECT_EQ(Anneal::acceptance_probability(0.1, 0.0), 0.0);
}

TEST(Anneal, Schedules) {
  Anneal opt(line(), 1, 30);
  EXPECT_NEAR(opt.sigma(0), 0.2, 1e-15);
  EXPECT_NEAR(opt.sigma(10), 0.2 * std::pow(0.95, 10), 1e-15);
  EXPECT_EQ(opt.temperature(3), std::pow(0.9, 3));  // T0 = 1 until 5 objectives exist
  for (double y : {0.1, 0.3, 0.2, 0.6, 0.4}) opt.observe(completed(opt.suggest(), y));
  const double mean = 0.32;
  double var = 0.0;
  for (double y : {0.1, 0.3, 0.2, 0.6, 0.4}) var += (y - mean) * (y - mean);
  EXPECT_NEAR(opt.temperature(0), std::sqrt(var / 4.0), 1e-12);
}

TEST(Anneal, ImprovementMovesTheCenter) {
  Anneal opt(line(), 3, 30);
  opt.observe(completed(opt.suggest(), 0.5));
  ASSERT_TRUE(opt.center_objective().has_value());
  const auto s = opt.suggest();
  opt.observe(completed(s, 0.2));
  EXPECT_EQ(*opt.center_objective(), 0.2);
  EXPECT_TRUE(opt.center()->bitwise_equal(s.config));
}

TEST(Anneal, ConvergesOnAQuadratic) {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Anneal opt(line(), seed, 30);
    const double target = Rng(seed + 1000).uniform(0.1, 0.9);
    double first = 0.0, last = 0.0;
    for (int k = 0; k < 40; ++k) {
      const auto s = opt.suggest();
      const double x = s.config.as_double("x");
      if (k < 10) first += std::abs(x - target);
      if (k >= 30) last += std::abs(x - target);
      opt.observe(completed(s, (x - target) * (x - target)));
    }
    wins += last < first ? 1 : 0;
  }
  EXPECT_GE(wins, 90);
}

// Trial ids far above anything the optimizer hands out.
void observe_random_history(Optimizer& opt, Rng& rng, double target, int n) {
  for (int k = 0; k < n; ++k) {
    const double x = rng.uniform();
    opt.observe({100000 + k, Config({{"x", x}}), 30, (x - target) * (x - target), 0.0, TrialStatus::kCompleted});
  }
}

TEST(Tpe, StartsRandomThenUsesTheModel) {
  TpeOptimizer a(line(), 5, 30), b(line(), 5, 30);
  RandomSearch r(line(), 5, 30);
  // Below n_startup TPE draws exactly what random search draws.
  for (int k = 0; k < 5; ++k) {
    const auto sa = a.suggest();
    EXPECT_TRUE(sa.config.bitwise_equal(r.suggest().config));
    a.observe(completed(sa, 0.5));
    const auto sb = b.suggest();
    b.observe(completed(sb, 0.5));
  }
  EXPECT_TRUE(a.suggest().config.bitwise_equal(b.suggest().config));
}

TEST(Tpe, ConvergesOnAQuadratic) {
  int tpe_hits = 0, random_hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed + 500);
    const double target = rng.uniform(0.1, 0.9);
    TpeOptimizer opt(line(), seed, 30);
    observe_random_history(opt, rng, target, 50);
    tpe_hits += std::abs(opt.suggest().config.as_double("x") - target) < 0.15 ? 1 : 0;
    random_hits += std::abs(rng.uniform() - target) < 0.15 ? 1 : 0;
  }
  EXPECT_GE(tpe_hits, 80);
  EXPECT_LT(random_hits, tpe_hits);
}

TEST(Smac, ConvergesOnAQuadratic) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed + 700);
    const double target = rng.uniform(0.1, 0.9);
    Smac opt(line(), seed, 30);
    observe_random_history(opt, rng, target, 50);
    hits += std::abs(opt.suggest().config.as_double("x") - target) < 0.2 ? 1 : 0;
  }
  EXPECT_GE(hits, 70);
}

TEST(Smac, ConstantHistoryPicksFirstPoolEntry) {
  Smac opt(default_space("bprmf"), 4, 30);
  for (int k = 0; k < 8; ++k) opt.observe(completed(opt.suggest(), 0.6));
  const auto s = opt.suggest();
  ASSERT_FALSE(opt.last_pool().empty());
  EXPECT_TRUE(s.config.bitwise_equal(opt.last_pool().front()));
  EXPECT_EQ(opt.last_pool().size(), 1010u);
  for (double ei : opt.last_acquisition()) EXPECT_EQ(ei, opt.last_acquisition().front());
}

TEST(Gpbo, PicksTheScanMaximum) {
  const auto space = default_space("bprmf");
  Gpbo opt(space, 6, 30);
  for (int k = 0; k < 9; ++k) {
    const auto s = opt.suggest();
    opt.observe(completed(s, bowl(space, s.config)));
  }
  const auto s = opt.suggest();
  const auto& cands = opt.last_candidates();
  ASSERT_EQ(cands.size(), 1024u);

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (const auto& t : opt.history()) {
    x.push_back(encode_unit(space, t.config));
    y.push_back(t.objective);
  }
  const auto z = standardize(y);
  GaussianProcess gp;
  gp.fit(x, z);
  const double best = *std::min_element(z.begin(), z.end());
  std::size_t arg = 0;
  double top = -1.0;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    const auto p = gp.predict(cands[k]);
    const double ei = expected_improvement(p.mean, std::sqrt(p.variance), best, 0.01);
    ASSERT_NEAR(ei, opt.last_acquisition()[k], 1e-12);
    if (ei > top) {
      top = ei;
      arg = k;
    }
  }
  EXPECT_TRUE(s.config.bitwise_equal(decode_unit(space, cands[arg])));
}

TEST(Gpbo, AllCategoricalSpace) {
  const SearchSpace space({ParamSpec::categorical("kind", {"a", "b", "c"})});
  Gpbo opt(space, 2, 30);
  Rng rng(1);
  for (int k = 0; k < 25; ++k) {
    const auto s = opt.suggest();
    ASSERT_NO_THROW(validate(space, s.config));
    opt.observe(completed(s, rng.uniform()));
  }
}

TEST(Hyperband, ScheduleTable) {
  const auto sched = hyperband_schedule(5, 30, 3);
  ASSERT_EQ(sched.size(), 2u);
  EXPECT_EQ(sched[0].s, 1);
  ASSERT_EQ(sched[0].rungs.size(), 2u);
  EXPECT_EQ(sched[0].rungs[0].n_configs, 3);
  EXPECT_EQ(sched[0].rungs[0].budget, 10);
  EXPECT_EQ(sched[0].rungs[1].n_configs, 1);
  EXPECT_EQ(sched[0].rungs[1].budget, 30);
  EXPECT_EQ(sched[1].s, 0);
  ASSERT_EQ(sched[1].rungs.size(), 1u);
  EXPECT_EQ(sched[1].rungs[0].n_configs, 2);
  EXPECT_EQ(sched[1].rungs[0].budget, 30);
  EXPECT_EQ(schedule_epoch_cost(sched), 110);
  EXPECT_EQ(schedule_epoch_cost_from_scratch(sched), 120);
}

TEST(Hyperband, ClassicTable) {
  // R = 81, eta = 3: the textbook five-bracket table.
  const auto sched = hyperband_schedule(1, 81, 3);
  const std::vector<std::vector<std::pair<int, int>>> want{
      {{81, 1}, {27, 3}, {9, 9}, {3, 27}, {1, 81}},
      {{34, 3}, {11, 9}, {3, 27}, {1, 81}},
      {{15, 9}, {5, 27}, {1, 81}},
      {{8, 27}, {2, 81}},
      {{5, 81}}};
  ASSERT_EQ(sched.size(), want.size());
  for (std::size_t b = 0; b < want.size(); ++b) {
    ASSERT_EQ(sched[b].rungs.size(), want[b].size());
    for (std::size_t r = 0; r < want[b].size(); ++r) {
      EXPECT_EQ(sched[b].rungs[r].n_configs, want[b][r].first) << b << "/" << r;
      EXPECT_EQ(sched[b].rungs[r].budget, want[b][r].second) << b << "/" << r;
    }
  }
}

TEST(Hyperband, DegenerateAndInvalid) {
  const auto one = hyperband_schedule(7, 7, 2);
  ASSERT_EQ(one.size(), 1u);
  ASSERT_EQ(one[0].rungs.size(), 1u);
  EXPECT_EQ(one[0].rungs[0].n_configs, 1);
  EXPECT_EQ(one[0].rungs[0].budget, 7);
  for (auto [lo, hi, eta] : std::vector<std::tuple<int, int, int>>{{5, 30, 1}, {0, 30, 3}, {31, 30, 3}, {-1, 5, 2}}) {
    try {
      hyperband_schedule(lo, hi, eta);
      FAIL() << lo << " " << hi << " " << eta;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidSchedule);
    }
  }
}

// Runs whole schedules with random objectives and checks every rung against
// an independent replay of the promotion rule.
void check_schedule_replay(Hyperband& opt, int b_min, int b_max, int eta, int schedules, std::uint64_t seed) {
  Rng rng(seed);
  const auto sched = hyperband_schedule(b_min, b_max, eta);
  std::map<std::string, int> reached;  // config -> highest budget trained
  long epochs = 0;
  for (int rep = 0; rep < schedules; ++rep) {
    for (const auto& bracket : sched) {
      std::vector<std::pair<double, int>> previous;  // (objective, trial_id) of the last rung
      std::map<int, std::string> configs;
      for (std::size_t r = 0; r < bracket.rungs.size(); ++r) {
        std::vector<std::string> expected;
        if (r > 0) {
          std::sort(previous.begin(), previous.end());
          ASSERT_EQ(static_cast<int>(previous.size()) / eta, bracket.rungs[r].n_configs);
          for (int k = 0; k < bracket.rungs[r].n_configs; ++k) expected.push_back(configs[previous[k].second]);
        }
        previous.clear();
        for (int k = 0; k < bracket.rungs[r].n_configs; ++k) {
          const auto s = opt.suggest();
          ASSERT_EQ(s.budget_epochs, bracket.rungs[r].budget);
          ASSERT_GE(s.budget_epochs, b_min);
          ASSERT_LE(s.budget_epochs, b_max);
          const auto key = s.config.canonical();
          if (r > 0) ASSERT_EQ(key, expected[static_cast<std::size_t>(k)]);
          epochs += s.budget_epochs - std::min(s.budget_epochs, reached[key]);
          reached[key] = std::max(reached[key], s.budget_epochs);
          configs[s.trial_id] = key;
          const double y = static_cast<double>(rng.uniform_int(0, 6)) / 6.0;  // ties on purpose
          previous.emplace_back(y, s.trial_id);
          opt.observe(status_for(opt, s, y));
        }
      }
    }
    ASSERT_TRUE(opt.at_schedule_boundary());
  }
  EXPECT_EQ(epochs, schedule_epoch_cost(sched) * schedules);
  EXPECT_EQ(opt.schedules_started(), schedules);
}

TEST(Hyperband, PromotionsAndAccounting) {
  for (std::uint64_t seed : {1, 2, 3}) {
    Hyperband opt(default_space("bprmf"), seed, 5, 30, 3);
    check_schedule_replay(opt, 5, 30, 3, 4, seed);
  }
  Hyperband wide(default_space("bprmf"), 9, 1, 27, 3);
  check_schedule_replay(wide, 1, 27, 3, 1, 9);
}

TEST(Bohb, PromotionsAndAccounting) {
  Bohb opt(default_space("bprmf"), 5, 5, 30, 3);
  check_schedule_replay(opt, 5, 30, 3, 4, 5);
}

TEST(Bohb, FreshStateDrawsRandomly) {
  Bohb opt(default_space("bprmf"), 1, 5, 30, 3);
  EXPECT_FALSE(opt.model_budget().has_value());
  for (int k = 0; k < 20; ++k) {
    bool was_random = false;
    opt.propose_new_config(&was_random);
    EXPECT_TRUE(was_random);
  }
}

TEST(Bohb, ModelBudgetThreshold) {
  // d = 4. Rung 0 of (10, 90, 3) runs 9 configs at 10 epochs; 3 of them fail,
  // leaving 6 usable points. Then 2 of the 3 promoted run at 30.
  Bohb opt(default_space("bprmf"), 1, 10, 90, 3);
  for (int k = 0; k < 9; ++k) {
    const auto s = opt.suggest();
    ASSERT_EQ(s.budget_epochs, 10);
    Trial t = status_for(opt, s, 0.1 * k);
    if (k >= 6) t.status = TrialStatus::kFailed;
    opt.observe(t);
  }
  EXPECT_EQ(opt.model_budget(), 10);
  for (int k = 0; k < 2; ++k) {
    const auto s = opt.suggest();
    ASSERT_EQ(s.budget_epochs, 30);
    opt.observe(status_for(opt, s, 0.05));
  }
  EXPECT_EQ(opt.model_budget(), 10);
}

TEST(Bohb, RandomFraction) {
  Bohb opt(default_space("bprmf"), 3, 5, 30, 3);
  Rng rng(3);
  for (int k = 0; k < 12; ++k) {
    const auto s = opt.suggest();
    opt.observe(status_for(opt, s, rng.uniform()));
  }
  ASSERT_TRUE(opt.model_budget().has_value());
  int random = 0;
  for (int k = 0; k < 300; ++k) {
    bool was_random = false;
    const auto c = opt.propose_new_config(&was_random);
    ASSERT_NO_THROW(validate(opt.space(), c));
    random += was_random ? 1 : 0;
  }
  EXPECT_NEAR(random / 300.0, 1.0 / 3.0, 0.08);
}

TEST(AllOptimizers, FuzzValidityAndDeterminism) {
  Rng rng(77);
  for (int rep = 0; rep < 15; ++rep) {
    const auto space = random_space(rng);
    for (Algorithm a : all_algorithms()) {
      const auto settings = settings_for(a, static_cast<std::uint64_t>(rep));
      auto first = make_optimizer(settings, space, 30);
      auto second = make_optimizer(settings, space, 30);
      ASSERT_EQ(first->algorithm(), a);
      for (int k = 0; k < 30; ++k) {
        const auto s1 = first->suggest();
        const auto s2 = second->suggest();
        ASSERT_NO_THROW(validate(space, s1.config)) << algorithm_name(a);
        ASSERT_TRUE(s1.config.bitwise_equal(s2.config)) << algorithm_name(a) << " step " << k;
        ASSERT_EQ(s1.budget_epochs, s2.budget_epochs);
        ASSERT_EQ(s1.trial_id, s2.trial_id);
        const double y = bowl(space, s1.config);
        first->observe(status_for(*first, s1, y));
        second->observe(status_for(*second, s2, y));
      }
    }
  }
}

TEST(AllOptimizers, DifferentSeedsDiffer) {
  for (Algorithm a : all_algorithms()) {
    auto x = make_optimizer(settings_for(a, 1), default_space("bprmf"), 30);
    auto y = make_optimizer(settings_for(a, 2), default_space("bprmf"), 30);
    EXPECT_FALSE(x->suggest().config.bitwise_equal(y->suggest().config)) << algorithm_name(a);
  }
}

TEST(Settings, JsonRoundTripAndValidation) {
  for (Algorithm a : all_algorithms()) {
    EXPECT_EQ(parse_algorithm(algorithm_name(a)), a);
    auto s = settings_for(a, 42);
    s.trials = 7;
    const auto back = optimizer_settings_from_json(optimizer_settings_to_json(s));
    EXPECT_EQ(back.algorithm, a);
    EXPECT_EQ(back.trials, 7);
    EXPECT_EQ(back.seed, 42u);
  }
  EXPECT_EQ(settings_for(Algorithm::kRandom, 0).effective_epoch_budget(), 600);
  EXPECT_THROW(parse_algorithm("cmaes"), Error);
  EXPECT_THROW(optimizer_settings_from_json(Json::parse(R"({"algorithm":"hyperband","eta":1})")), Error);
  EXPECT_THROW(optimizer_settings_from_json(Json::parse(R"({"algorithm":"random","trials":0})")), Error);
  EXPECT_TRUE(is_multi_fidelity(Algorithm::kBohb));
  EXPECT_FALSE(is_multi_fidelity(Algorithm::kTpe));
}

}  // namespace
}  // namespace recbench
