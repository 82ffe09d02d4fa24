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

// Acceptance checks for the property-based criteria. Prints one PASS/FAIL
// line per criterion and exits non-zero if any fails.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "recbench/bpr.hpp"
#include "recbench/dataio.hpp"
#include "recbench/gp.hpp"
#include "recbench/hpo.hpp"
#include "recbench/hyperband.hpp"
#include "recbench/metrics.hpp"
#include "recbench/neumf.hpp"
#include "recbench/runner.hpp"
#include "test_support.hpp"

namespace recbench {
namespace {

namespace fs = std::filesystem;
namespace ts = test_support;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// 4 ------------------------------------------------------------------------
Verdict metric_oracles() {
  Rng rng(404);
  double worst = 0.0;
  int hr_mismatch = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t catalog = 3 + rng.index(20);
    std::vector<Index> items(catalog);
    for (std::size_t k = 0; k < catalog; ++k) items[k] = static_cast<Index>(k);
    rng.shuffle(items);
    const std::size_t n = 1 + rng.index(catalog);
    const std::vector<Index> top(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<Index> test;
    for (std::size_t k = 0; k < catalog; ++k)
      if (rng.bernoulli(0.3)) test.push_back(static_cast<Index>(k));
    const std::set<Index> rel(test.begin(), test.end());
    double dcg = 0.0, idcg = 0.0;
    bool hit = false;
    for (std::size_t p = 0; p < n; ++p)
      if (rel.count(top[p])) {
        dcg += 1.0 / std::log2(p + 2.0);
        hit = true;
      }
    for (std::size_t p = 0; p < std::min(n, rel.size()); ++p) idcg += 1.0 / std::log2(p + 2.0);
    const double want = rel.empty() ? 0.0 : dcg / idcg;
    worst = std::max(worst, std::abs(ndcg_at_n(top, test, n) - want));
    if (hr_at_n(top, test, n) != (hit ? 1.0 : 0.0)) ++hr_mismatch;
  }
  return {worst <= 1e-12 && hr_mismatch == 0,
          "200 instances, max NDCG error " + fmt("%.3g", worst) + ", HR mismatches " + std::to_string(hr_mismatch)};
}

// 5 ------------------------------------------------------------------------
std::vector<double> central(std::vector<double>& x, const std::function<double()>& loss) {
  std::vector<double> g(x.size());
  const double eps = 1e-5;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double keep = x[k];
    x[k] = keep + eps;
    const double up = loss();
    x[k] = keep - eps;
    const double down = loss();
    x[k] = keep;
    g[k] = (up - down) / (2 * eps);
  }
  return g;
}

std::vector<double> gaussian(Rng& rng, std::size_t n, double sd) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal(0.0, sd);
  return v;
}

Verdict gradient_checks() {
  Rng rng(505);
  double bpr = 0.0, fm = 0.0, neumf = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const std::size_t k = 8;
    auto p = gaussian(rng, k, 0.5), qi = gaussian(rng, k, 0.5), qj = gaussian(rng, k, 0.5);
    std::vector<double> gp(k), gi(k), gj(k);
    bprmf_triple_gradient(p, qi, qj, 0.01, gp, gi, gj);
    const auto eval = [&] { return bprmf_triple_loss(p, qi, qj, 0.01); };
    auto fd = central(p, eval);
    auto fi = central(qi, eval);
    auto fj = central(qj, eval);
    std::vector<double> a = gp, b = fd;
    a.insert(a.end(), gi.begin(), gi.end());
    a.insert(a.end(), gj.begin(), gj.end());
    b.insert(b.end(), fi.begin(), fi.end());
    b.insert(b.end(), fj.begin(), fj.end());
    bpr = std::max(bpr, ts::relative_error(a, b));

    std::vector<double> w = gaussian(rng, 2, 0.5);
    auto vu = gaussian(rng, k, 0.5), vi = gaussian(rng, k, 0.5), vj = gaussian(rng, k, 0.5);
    const auto g = fm_triple_gradient(w[0], w[1], vu, vi, vj, 0.01);
    const auto fm_eval = [&] { return fm_triple_loss(w[0], w[1], vu, vi, vj, 0.01); };
    std::vector<double> fa{g.w_i, g.w_j}, fb = central(w, fm_eval);
    for (auto [vec, grad] : {std::pair{&vu, &g.v_u}, std::pair{&vi, &g.v_i}, std::pair{&vj, &g.v_j}}) {
      const auto f = central(*vec, fm_eval);
      fa.insert(fa.end(), grad->begin(), grad->end());
      fb.insert(fb.end(), f.begin(), f.end());
    }
    fm = std::max(fm, ts::relative_error(fa, fb));
  }
  NeuMf model(ts::neumf_config(4, 2, 0.0, 0.001, 0.01, "64"), 7, 5, 6);
  for (auto& x : model.parameters()) x = rng.normal(0.0, 0.3);
  for (int b = 0; b < 3; ++b) {
    std::vector<Triple> batch;
    for (int t = 0; t < 4; ++t)
      batch.push_back({static_cast<Index>(rng.index(5)), static_cast<Index>(rng.index(6)), static_cast<Index>(rng.index(6))});
    const auto analytic = model.batch_gradient(batch);
    const auto fd = central(model.parameters(), [&] { return model.batch_loss(batch); });
    neumf = std::max(neumf, ts::relative_error(analytic, fd));
  }
  return {bpr < 1e-4 && fm < 1e-4 && neumf < 1e-3, "max relative error BPRMF " + fmt("%.2e", bpr) + ", FM " +
                                                       fmt("%.2e", fm) + ", NeuMF " + fmt("%.2e", neumf)};
}

// 6 ------------------------------------------------------------------------
Verdict stepwise_equivalence() {
  Rng rng(606);
  const auto ui = ts::random_user_items(rng, 30, 40, 0.15);
  const TrainingData data{30, 40, ui, ui};
  int equal = 0, total = 0;
  for (ModelKind kind : {ModelKind::kBprMf, ModelKind::kFm, ModelKind::kNeuMf}) {
    const auto config = kind == ModelKind::kNeuMf ? ts::neumf_config(8, 2, 0.2, 0.005, 0.001, "64")
                                                  : ts::bpr_config(8, 3, 0.01, 0.001);
    for (std::uint64_t seed : {1, 2, 3}) {
      auto staged = make_model(kind, config, seed, 30, 40);
      auto straight = make_model(kind, config, seed, 30, 40);
      staged->train_to(data, 10);
      staged->train_to(data, 30);
      straight->train_to(data, 30);
      ++total;
      equal += ts::same_parameters(*staged, *straight) ? 1 : 0;
    }
  }
  return {equal == total, std::to_string(equal) + "/" + std::to_string(total) + " model/seed pairs bit-identical"};
}

// 7 ------------------------------------------------------------------------
Verdict hyperband_table(const fs::path& data) {
  const auto sched = hyperband_schedule(5, 30, 3);
  const bool table = sched.size() == 2 && sched[0].s == 1 && sched[0].rungs.size() == 2 &&
                     sched[0].rungs[0].n_configs == 3 && sched[0].rungs[0].budget == 10 &&
                     sched[0].rungs[1].n_configs == 1 && sched[0].rungs[1].budget == 30 && sched[1].s == 0 &&
                     sched[1].rungs.size() == 1 && sched[1].rungs[0].n_configs == 2 && sched[1].rungs[0].budget == 30;
  ts::TempDir dir("acc_hyperband");
  ExperimentConfig cfg;
  cfg.dataset.path = data;
  cfg.model = ModelKind::kBprMf;
  cfg.optimizer.algorithm = Algorithm::kHyperband;
  cfg.rounds = 1;
  run_experiment(cfg, dir.path());
  long logged = 0;
  std::size_t trials = 0;
  std::map<std::string, int> reached;
  long replayed = 0;
  for (const auto& r : read_jsonl(dir.path() / "trials.jsonl")) {
    if (r.at("record") != "trial") continue;
    ++trials;
    logged += r.at("epochs_trained").get<long>();
    const int b = r.at("budget_epochs");
    auto& top = reached[r.at("config").dump()];
    replayed += b - std::min(b, top);
    top = std::max(top, b);
  }
  const long passes = static_cast<long>(trials / 6);
  const bool ledger = trials % 6 == 0 && logged == replayed && logged == schedule_epoch_cost(sched) * passes;
  return {table && ledger, std::string(table ? "table matches" : "table differs") + "; " + std::to_string(passes) +
                               " passes, " + std::to_string(logged) + " epochs logged vs " +
                               std::to_string(schedule_epoch_cost(sched) * passes) + " scheduled"};
}

// 8 ------------------------------------------------------------------------
Verdict gp_and_ei() {
  Rng rng(808);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int k = 0; k < 3; ++k) {
      x.push_back({rng.uniform()});
      y.push_back(rng.normal());
    }
    GaussianProcess gp;
    gp.fit(x, y);
    Eigen::Matrix3d kmat;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        kmat(a, b) = matern52(std::abs(x[a][0] - x[b][0]), gp.length_scale()) + (a == b ? gp.jitter() : 0.0);
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(kmat);
    const Eigen::Vector3d yv(y[0], y[1], y[2]);
    for (int q = 0; q < 5; ++q) {
      const double at = rng.uniform();
      Eigen::Vector3d ks;
      for (int a = 0; a < 3; ++a) ks(a) = matern52(std::abs(at - x[a][0]), gp.length_scale());
      const auto p = gp.predict(std::vector<double>{at});
      worst = std::max({worst, std::abs(p.mean - ks.dot(lu.solve(yv))), std::abs(p.variance - (1 - ks.dot(lu.solve(ks))))});
    }
  }
  double ei_err = 0.0;
  for (double s : {0.05, 0.1, 0.5, 1.0, 2.0}) ei_err = std::max(ei_err, std::abs(expected_improvement(0.4, s, 0.4, 0.0) - 0.39894 * s));
  return {worst <= 1e-8 && ei_err <= 1e-5,
          "GP max error " + fmt("%.2e", worst) + " over 20 problems; EI max error " + fmt("%.2e", ei_err)};
}

// 9 ------------------------------------------------------------------------
const SearchSpace& line() {
  static const SearchSpace space({ParamSpec::real("x", 0.0, 1.0)});
  return space;
}

void observe_random(Optimizer& opt, Rng& rng, double target, int n) {
  for (int k = 0; k < n; ++k) {
    const double x = rng.uniform();
    opt.observe({100000 + k, Config({{"x", x}}), 30, (x - target) * (x - target), 0.0, TrialStatus::kCompleted});
  }
}

Verdict convergence_screens() {
  int anneal = 0, tpe = 0, smac = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    {
      Anneal opt(line(), seed, 30);
      const double target = Rng(seed + 1000).uniform(0.1, 0.9);
      double first = 0.0, last = 0.0;
      for (int k = 0; k < 40; ++k) {
        const auto s = opt.suggest();
        const double x = s.config.as_double("x");
        if (k < 10) first += std::abs(x - target);
        if (k >= 30) last += std::abs(x - target);
        opt.observe({s.trial_id, s.config, 30, (x - target) * (x - target), 0.0, TrialStatus::kCompleted});
      }
      anneal += last < first ? 1 : 0;
    }
    {
      Rng rng(seed + 500);
      const double target = rng.uniform(0.1, 0.9);
      TpeOptimizer opt(line(), seed, 30);
      observe_random(opt, rng, target, 50);
      tpe += std::abs(opt.suggest().config.as_double("x") - target) < 0.15 ? 1 : 0;
    }
    {
      Rng rng(seed + 700);
      const double target = rng.uniform(0.1, 0.9);
      Smac opt(line(), seed, 30);
      observe_random(opt, rng, target, 50);
      smac += std::abs(opt.suggest().config.as_double("x") - target) < 0.2 ? 1 : 0;
    }
  }
  return {anneal >= 90 && tpe >= 80 && smac >= 70, "Anneal " + std::to_string(anneal) + "/100 (>=90), TPE " +
                                                       std::to_string(tpe) + "/100 (>=80), SMAC " +
                                                       std::to_string(smac) + "/100 (>=70)"};
}

// 10 -----------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism(const fs::path& data) {
  int same = 0, total = 0;
  for (Algorithm a : {Algorithm::kRandom, Algorithm::kAnneal, Algorithm::kTpe, Algorithm::kSmac, Algorithm::kGpbo,
                      Algorithm::kHyperband, Algorithm::kBohb}) {
    for (ModelKind m : {ModelKind::kItemKnn, ModelKind::kBprMf, ModelKind::kNeuMf}) {
      ExperimentConfig cfg;
      cfg.dataset.path = data;
      cfg.model = m;
      cfg.optimizer.algorithm = a;
      cfg.optimizer.trials = 6;
      cfg.optimizer.epoch_budget = 110;
      cfg.rounds = 2;
      cfg.epochs = m == ModelKind::kNeuMf ? 5 : 30;
      cfg.optimizer.b_max = m == ModelKind::kNeuMf ? 5 : 30;
      cfg.optimizer.b_min = m == ModelKind::kNeuMf ? 1 : 5;
      ts::TempDir x("acc_det_a"), y("acc_det_b");
      run_experiment(cfg, x.path());
      run_experiment(cfg, y.path());
      ++total;
      same += slurp(x.path() / "trials.jsonl") == slurp(y.path() / "trials.jsonl") ? 1 : 0;
    }
  }
  return {same == total, std::to_string(same) + "/" + std::to_string(total) + " optimizer/model configs byte-identical on rerun"};
}

// 11 -----------------------------------------------------------------------
Verdict split_invariants() {
  Rng rng(1111);
  int bad = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const auto n_users = rng.uniform_int(1, 30), n_items = rng.uniform_int(1, 40);
    const auto n = rng.uniform_int(1, 200);
    std::vector<Interaction> rows;
    for (std::int64_t k = 0; k < n; ++k)
      rows.push_back({"u" + std::to_string(rng.uniform_int(0, n_users - 1)), "i" + std::to_string(rng.uniform_int(0, n_items - 1)),
                      std::nullopt, rng.uniform_int(0, 50)});
    const Dataset d = build_dataset(rows);
    const SplitMethod method = rep % 2 ? SplitMethod::kTemporal : SplitMethod::kRandom;
    const SplitDataset s = split_global(d, {method, rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.4), rng.next_u64()});
    std::vector<int> seen(d.n_interactions(), 0);
    for (const auto* part : {&s.train_records(), &s.valid_records(), &s.test_records()})
      for (std::size_t r : *part) ++seen[r];
    bool ok = std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
    if (method == SplitMethod::kTemporal) {
      auto span = [&](const std::vector<std::size_t>& part) {
        std::pair<std::int64_t, std::int64_t> mm{INT64_MAX, INT64_MIN};
        for (std::size_t r : part) {
          mm.first = std::min(mm.first, d.records()[r].timestamp);
          mm.second = std::max(mm.second, d.records()[r].timestamp);
        }
        return mm;
      };
      const auto tr = span(s.train_records()), va = span(s.valid_records()), te = span(s.test_records());
      ok = ok && tr.second <= std::min(va.first, te.first) && va.second <= te.first;
    }
    bad += ok ? 0 : 1;
  }
  return {bad == 0, "500 fuzzed datasets, " + std::to_string(bad) + " violations"};
}

}  // namespace
}  // namespace recbench

int main() {
  using namespace recbench;
  const fs::path data = fs::path(RECBENCH_TEST_DATA_DIR) / "synthetic50.tsv";
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"4 metric oracle equivalence", metric_oracles},
      {"5 gradient checks", gradient_checks},
      {"6 stepwise equivalence", stepwise_equivalence},
      {"7 hyperband schedule and epoch ledger", [&] { return hyperband_table(data); }},
      {"8 GP direct-solve oracle and EI closed form", gp_and_ei},
      {"9 TPE/Anneal/SMAC convergence screens", convergence_screens},
      {"10 byte-identical reruns", [&] { return determinism(data); }},
      {"11 split invariants", split_invariants},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
