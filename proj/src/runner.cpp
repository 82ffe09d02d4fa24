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

#include "recbench/runner.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "recbench/error.hpp"

namespace recbench {

namespace fs = std::filesystem;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string metric_key(Metric m, std::size_t cutoff) {
  return std::string(metric_name(m)) + "@" + std::to_string(cutoff);
}

std::pair<Metric, std::size_t> parse_metric_key(const std::string& key) {
  const auto at = key.find('@');
  if (at == std::string::npos) throw Error(ErrorCode::kParseError, "bad metric key '" + key + "'");
  return {parse_metric(key.substr(0, at)), static_cast<std::size_t>(std::stoul(key.substr(at + 1)))};
}

const std::set<std::string> kTopLevelKeys{"dataset", "split",  "model", "space", "optimizer", "rounds",
                                          "cutoffs", "pool_size", "epochs", "seed", "cache", "wall_clock_in_log"};

}  // namespace

SearchSpace ExperimentConfig::effective_space() const {
  return space ? *space : default_space(model_name(model));
}

ExperimentConfig experiment_config_from_json(const Json& j, const fs::path& base_dir) {
  require(j.is_object(), "experiment config must be a JSON object");
  for (const auto& [key, value] : j.items()) require(kTopLevelKeys.count(key) > 0, "unknown config key '" + key + "'");
  ExperimentConfig cfg;
  try {
    require(j.contains("dataset"), "missing 'dataset'");
    const Json& d = j.at("dataset");
    require(d.contains("path"), "missing 'dataset.path'");
    cfg.dataset.path = resolve(d.at("path").get<std::string>(), base_dir);
    const std::string format = d.value("format", std::string("generic-tsv"));
    if (format == "prepared")
      cfg.dataset.format.reset();
    else
      cfg.dataset.format = parse_input_format(format);
    cfg.dataset.mode = parse_feedback_mode(d.value("mode", std::string("implicit")));
    cfg.dataset.threshold = d.value("threshold", 4.0);
    cfg.dataset.name = d.value("name", std::string());

    if (j.contains("split")) {
      const Json& s = j.at("split");
      cfg.split.method = parse_split_method(s.value("method", std::string("random")));
      cfg.split.test_ratio = s.value("test_ratio", cfg.split.test_ratio);
      cfg.split.valid_ratio = s.value("valid_ratio", cfg.split.valid_ratio);
    }
    require(j.contains("model"), "missing 'model'");
    cfg.model = parse_model_kind(j.at("model").get<std::string>());
    if (j.contains("space")) cfg.space = space_from_json(j.at("space"));
    if (j.contains("optimizer")) cfg.optimizer = optimizer_settings_from_json(j.at("optimizer"));
    cfg.rounds = j.value("rounds", cfg.rounds);
    if (j.contains("cutoffs")) cfg.cutoffs = j.at("cutoffs").get<std::vector<std::size_t>>();
    cfg.pool_size = j.value("pool_size", cfg.pool_size);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("cache")) {
      const Json& c = j.at("cache");
      cfg.cache.enabled = c.value("enabled", true);
      cfg.cache.keep = c.value("keep", false);
      if (c.contains("dir") && !c.at("dir").is_null()) cfg.cache.dir = resolve(c.at("dir").get<std::string>(), base_dir);
    }
    cfg.wall_clock_in_log = j.value("wall_clock_in_log", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidConfig) throw;
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  require(cfg.rounds >= 1, "rounds must be >= 1");
  require(cfg.epochs >= 1, "epochs must be >= 1");
  require(cfg.pool_size >= 1, "pool_size must be >= 1");
  require(!cfg.cutoffs.empty(), "cutoffs must be non-empty");
  for (std::size_t c : cfg.cutoffs) require(c >= 1, "cutoffs must be >= 1");
  const SearchSpace space = cfg.effective_space();
  require(space.dim() > 0, "search space is empty");
  return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j, path.parent_path());
}

Json experiment_config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["dataset"] = {{"path", cfg.dataset.path.string()},
                  {"format", cfg.dataset.format ? std::string(cfg.dataset.format == InputFormat::kGenericTsv ? "generic-tsv"
                                                              : cfg.dataset.format == InputFormat::kMl1m ? "ml1m"
                                                                                                         : "lastfm")
                                                : std::string("prepared")},
                  {"mode", cfg.dataset.mode == FeedbackMode::kExplicit ? "explicit" : "implicit"},
                  {"threshold", cfg.dataset.threshold},
                  {"name", cfg.dataset.name}};
  j["split"] = {{"method", std::string(split_method_name(cfg.split.method))},
                {"test_ratio", cfg.split.test_ratio},
                {"valid_ratio", cfg.split.valid_ratio}};
  j["model"] = std::string(model_name(cfg.model));
  j["space"] = space_to_json(cfg.effective_space());
  j["optimizer"] = optimizer_settings_to_json(cfg.optimizer);
  j["rounds"] = cfg.rounds;
  j["cutoffs"] = cfg.cutoffs;
  j["pool_size"] = cfg.pool_size;
  j["epochs"] = cfg.epochs;
  j["seed"] = cfg.seed;
  j["cache"] = {{"enabled", cfg.cache.enabled}, {"keep", cfg.cache.keep}, {"dir", cfg.cache.dir.string()}};
  j["wall_clock_in_log"] = cfg.wall_clock_in_log;
  return j;
}

std::string experiment_config_schema() {
  return R"(Experiment config (JSON object):
  dataset            {"path": str, "format": "generic-tsv"|"ml1m"|"lastfm"|"prepared",
                      "mode": "implicit"|"explicit", "threshold": 4.0, "name": str}
                     relative paths resolve against the config file's directory;
                     "prepared" reads a directory written by `recbench prepare`
  split              {"method": "random"|"temporal", "test_ratio": 0.2, "valid_ratio": 0.1}
                     valid_ratio is a fraction of what remains after the test split
  model              "itemknn"|"puresvd"|"bprmf"|"fm"|"neumf"
  space              optional list of {"name", "kind": "int"|"float"|"categorical",
                      "lo", "hi", "scale": "linear"|"log", "choices": [str]}
  optimizer          {"algorithm": "random"|"anneal"|"tpe"|"smac"|"gpbo"|"hyperband"|"bohb",
                      "trials": 20, "eta": 3, "b_min": 5, "b_max": 30, "seed": 0,
                      "epoch_budget": trials*b_max, "anneal": {...}, "tpe": {...},
                      "surrogate": {...}, "bohb": {...}}
  rounds             3
  cutoffs            [5, 10]
  pool_size          1000
  epochs             30
  seed               0      (RECBENCH_SEED overrides)
  cache              {"enabled": true, "keep": false, "dir": "<out>/checkpoints"}
  wall_clock_in_log  false  (true writes measured seconds into trials.jsonl)
)";
}

Dataset load_source(const DatasetSource& source) {
  if (!source.format) return load_dataset(source.path);
  const auto raw = load_interactions(source.path, *source.format);
  return build_dataset(binarize(raw, source.threshold, source.mode));
}

TrainOutcome train_with_cache(const TrainingData& data, const std::string& data_tag, ModelKind kind,
                              const Config& config, std::uint64_t seed, int to_epoch, const CheckpointStore* store) {
  TrainOutcome out;
  std::string key;
  if (store) {
    key = checkpoint_key(kind, data_tag, config, seed);
    try {
      out.model = store->load(key, kind, config, seed, data.n_users, data.n_items);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kCorruptCheckpoint) throw;
      out.warnings.push_back(std::string("discarding checkpoint: ") + e.what());
      store->remove(key);
    }
    if (out.model && out.model->epochs_done() > to_epoch) out.model.reset();
  }
  if (!out.model) out.model = make_model(kind, config, seed, data.n_users, data.n_items);
  out.resumed_from = out.model->epochs_done();
  try {
    out.model->train_to(data, to_epoch);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDivergedTraining) throw;
    out.diverged = e.what();
    out.epochs_trained = std::min(to_epoch, out.model->epochs_done() + 1) - out.resumed_from;
    return out;
  }
  out.epochs_trained = to_epoch - out.resumed_from;
  if (store) store->save(key, *out.model);
  return out;
}

const ReportCell* RunReport::cell(Metric metric, std::size_t cutoff) const {
  for (const ReportCell& c : cells)
    if (c.metric == metric && c.cutoff == cutoff) return &c;
  return nullptr;
}

std::vector<Json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<Json> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

RunReport build_report(const std::vector<Json>& records) {
  RunReport report;
  std::vector<std::string> keys;
  for (const Json& r : records) {
    const std::string kind = r.value("record", std::string());
    if (report.dataset.empty() && r.contains("dataset")) {
      report.dataset = r.at("dataset").get<std::string>();
      report.model = r.value("model", std::string());
      report.optimizer = r.value("optimizer", std::string());
    }
    if (kind == "trial") {
      ++report.trials;
      switch (parse_trial_status(r.at("status").get<std::string>())) {
        case TrialStatus::kCompleted: ++report.completed; break;
        case TrialStatus::kPruned: ++report.pruned; break;
        case TrialStatus::kFailed: ++report.failed; break;
      }
      report.epochs += r.value("epochs_trained", 0L);
      report.wall_seconds += r.value("wall_seconds", 0.0);
    } else if (kind == "final") {
      RoundResult rr;
      rr.round = r.at("round").get<int>();
      rr.best_trial_id = r.value("best_trial_id", -1);
      rr.best_config = r.at("best_config");
      for (const auto& [key, value] : r.at("test_metrics").items()) {
        rr.test_metrics.emplace_back(key, value.get<double>());
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
      }
      report.rounds.push_back(std::move(rr));
    } else if (kind == "round_failed") {
      RoundResult rr;
      rr.round = r.at("round").get<int>();
      rr.failed = true;
      rr.error = r.value("error", std::string());
      report.rounds.push_back(std::move(rr));
    }
  }
  if (std::none_of(report.rounds.begin(), report.rounds.end(), [](const RoundResult& r) { return !r.failed; }))
    throw Error(ErrorCode::kEmptyAggregate, "trial log holds no completed round");
  for (const std::string& key : keys) {
    std::vector<double> values;
    for (const RoundResult& rr : report.rounds) {
      if (rr.failed) continue;
      for (const auto& [k, v] : rr.test_metrics)
        if (k == key) values.push_back(v);
    }
    const auto [metric, cutoff] = parse_metric_key(key);
    report.cells.push_back({metric, cutoff, aggregate_rounds(values), values.size()});
  }
  return report;
}

void write_report_csv(std::ostream& out, const std::vector<RunReport>& reports) {
  out << "dataset,model,optimizer,metric,cutoff,mean,std,rounds\n";
  for (const RunReport& r : reports)
    for (const ReportCell& c : r.cells)
      out << r.dataset << ',' << r.model << ',' << r.optimizer << ',' << metric_name(c.metric) << ',' << c.cutoff << ','
          << format_double(c.value.mean, "%.17g") << ',' << format_double(c.value.std, "%.17g") << ',' << c.rounds
          << '\n';
}

void write_report_table(std::ostream& out, const std::vector<RunReport>& reports, std::optional<Metric> metric,
                        std::optional<std::size_t> cutoff) {
  std::vector<std::array<std::string, 7>> rows;
  rows.push_back({"dataset", "model", "optimizer", "metric", "cutoff", "mean+-std", "rounds"});
  for (const RunReport& r : reports) {
    for (const ReportCell& c : r.cells) {
      if (metric && c.metric != *metric) continue;
      if (cutoff && c.cutoff != *cutoff) continue;
      rows.push_back({r.dataset, r.model, r.optimizer, std::string(metric_name(c.metric)), std::to_string(c.cutoff),
                      format_double(c.value.mean, "%.4f") + "+-" + format_double(c.value.std, "%.4f"),
                      std::to_string(c.rounds)});
    }
  }
  std::array<std::size_t, 7> width{};
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) line += std::string(width[i] - row[i].size() + 2, ' ');
    }
    out << line << '\n';
  }
}

namespace {

class JsonlWriter {
 public:
  explicit JsonlWriter(const fs::path& path) : out_(path, std::ios::trunc) {
    if (!out_) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  void write(const Json& record) {
    out_ << record.dump() << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

struct RoundContext {
  const ExperimentConfig& cfg;
  const Dataset& dataset;
  const std::string& dataset_name;
  const SearchSpace& space;
  JsonlWriter& log;
  JsonlWriter& timings;
  const CheckpointStore& store;
  std::ostream* progress;
};

void say(std::ostream* progress, const std::string& line) {
  if (progress) *progress << line << std::endl;
}

void run_round(const RoundContext& ctx, int round) {
  using Clock = std::chrono::steady_clock;
  const ExperimentConfig& cfg = ctx.cfg;
  const std::uint64_t round_seed = cfg.seed + static_cast<std::uint64_t>(round);
  const std::string model = std::string(model_name(cfg.model));
  const std::string optimizer = std::string(algorithm_name(cfg.optimizer.algorithm));

  SplitSpec spec = cfg.split;
  spec.seed = round_seed;
  SplitDataset split = split_global(ctx.dataset, spec);
  {
    Rng rng(derive_seed(round_seed, {kTestCandidateStream}));
    split.set_test_candidates(build_eval_candidates(split, cfg.pool_size, rng));
  }
  {
    Rng rng(derive_seed(round_seed, {kValidCandidateStream}));
    split.set_valid_candidates(build_valid_candidates(split, cfg.pool_size, rng));
  }
  const TrainingData tune = tuning_data(split);
  const std::string tag = ctx.dataset.id() + "/round" + std::to_string(round);

  OptimizerSettings settings = cfg.optimizer;
  settings.seed = derive_seed(round_seed, {kOptimizerStream, cfg.optimizer.seed});
  const bool fidelity = is_multi_fidelity(settings.algorithm);
  const int full_budget = fidelity ? settings.b_max : cfg.epochs;
  auto opt = make_optimizer(settings, ctx.space, full_budget);
  const std::uint64_t model_seed = derive_seed(round_seed, {kModelStream});
  const CheckpointStore* store = cfg.cache.enabled ? &ctx.store : nullptr;
  const std::array<std::size_t, 1> valid_cutoff{10};

  const long epoch_budget = settings.effective_epoch_budget();
  long consumed = 0;
  int n_trials = 0;
  const auto loop_start = Clock::now();
  const auto keep_going = [&] {
    return fidelity ? !(consumed >= epoch_budget && opt->at_schedule_boundary()) : n_trials < settings.trials;
  };
  std::size_t warnings_seen = 0;
  while (keep_going()) {
    const Suggestion s = opt->suggest();
    for (; warnings_seen < opt->warnings().size(); ++warnings_seen) say(ctx.progress, "warning: " + opt->warnings()[warnings_seen]);
    const auto t0 = Clock::now();
    Trial trial{s.trial_id, s.config, s.budget_epochs, 1.0, 0.0, TrialStatus::kFailed};
    std::optional<double> ndcg;
    TrainOutcome out = train_with_cache(tune, tag, cfg.model, s.config, model_seed, s.budget_epochs, store);
    for (const auto& w : out.warnings) say(ctx.progress, "warning: " + w);
    if (!out.diverged) {
      const auto results = evaluate(*out.model, split.valid(), split.valid_candidates(), valid_cutoff);
      ndcg = find_result(results, Metric::kNdcg, 10).mean;
      trial.objective = 1.0 - *ndcg;
      trial.status = s.budget_epochs < full_budget ? TrialStatus::kPruned : TrialStatus::kCompleted;
    }
    const auto t1 = Clock::now();
    const double wall = std::chrono::duration<double>(t1 - t0).count();
    const double elapsed = std::chrono::duration<double>(t1 - loop_start).count();
    trial.wall_seconds = cfg.wall_clock_in_log ? wall : 0.0;
    opt->observe(trial);
    consumed += out.epochs_trained;
    ++n_trials;

    Json rec;
    rec["record"] = "trial";
    rec["trial_id"] = trial.trial_id;
    rec["round"] = round;
    rec["model"] = model;
    rec["optimizer"] = optimizer;
    rec["dataset"] = ctx.dataset_name;
    rec["config"] = config_to_json(trial.config);
    rec["budget_epochs"] = trial.budget_epochs;
    rec["objective"] = trial.objective;
    rec["valid_ndcg10"] = ndcg ? Json(*ndcg) : Json(nullptr);
    rec["wall_seconds"] = trial.wall_seconds;
    rec["status"] = std::string(trial_status_name(trial.status));
    rec["epochs_trained"] = out.epochs_trained;
    rec["resumed_from"] = out.resumed_from;
    if (out.diverged) rec["error"] = *out.diverged;
    ctx.log.write(rec);
    ctx.timings.write({{"round", round}, {"trial_id", trial.trial_id}, {"wall_seconds", wall}, {"elapsed_seconds", elapsed}});
    say(ctx.progress, "round " + std::to_string(round) + " trial " + std::to_string(trial.trial_id) + " budget " +
                          std::to_string(trial.budget_epochs) + " " + std::string(trial_status_name(trial.status)) +
                          " objective " + format_double(trial.objective, "%.5f") + " (" + config_to_json(trial.config).dump() + ")");
  }

  const Trial* best = opt->incumbent();
  if (!best) throw Error(ErrorCode::kEmptyAggregate, "no trial completed at full budget");
  TrainOutcome final_model = train_with_cache(final_data(split), tag + "/final", cfg.model, best->config, model_seed,
                                              cfg.epochs, nullptr);
  if (final_model.diverged) throw Error(ErrorCode::kDivergedTraining, "final retrain: " + *final_model.diverged);
  const auto results = evaluate(*final_model.model, split.test(), split.test_candidates(), cfg.cutoffs);
  Json metrics = Json::object();
  for (std::size_t c : cfg.cutoffs)
    for (Metric m : {Metric::kHr, Metric::kNdcg}) metrics[metric_key(m, c)] = find_result(results, m, c).mean;

  Json rec;
  rec["record"] = "final";
  rec["round"] = round;
  rec["model"] = model;
  rec["optimizer"] = optimizer;
  rec["dataset"] = ctx.dataset_name;
  rec["best_trial_id"] = best->trial_id;
  rec["best_config"] = config_to_json(best->config);
  rec["best_objective"] = best->objective;
  rec["test_metrics"] = metrics;
  rec["trials"] = n_trials;
  rec["tuning_epochs"] = consumed;
  rec["final_epochs"] = cfg.epochs;
  ctx.log.write(rec);
  say(ctx.progress, "round " + std::to_string(round) + " test " + metrics.dump());
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir, const RunOptions& options) {
  const Dataset dataset = load_source(cfg.dataset);
  std::string dataset_name = cfg.dataset.name;
  if (dataset_name.empty())
    dataset_name = cfg.dataset.format ? cfg.dataset.path.stem().string() : cfg.dataset.path.filename().string();
  const SearchSpace space = cfg.effective_space();

  fs::create_directories(out_dir);
  {
    std::ofstream c(out_dir / "config.json", std::ios::trunc);
    c << experiment_config_to_json(cfg).dump(2) << '\n';
  }
  const CheckpointStore store(cfg.cache.dir.empty() ? out_dir / "checkpoints" : cfg.cache.dir);
  {
    JsonlWriter log(out_dir / "trials.jsonl");
    JsonlWriter timings(out_dir / "timings.jsonl");
    const RoundContext ctx{cfg, dataset, dataset_name, space, log, timings, store, options.progress};
    for (int r = 0; r < cfg.rounds; ++r) {
      try {
        run_round(ctx, r);
      } catch (const std::exception& e) {
        say(options.progress, "round " + std::to_string(r) + " failed: " + e.what());
        log.write({{"record", "round_failed"},
                   {"round", r},
                   {"model", std::string(model_name(cfg.model))},
                   {"optimizer", std::string(algorithm_name(cfg.optimizer.algorithm))},
                   {"dataset", dataset_name},
                   {"error", e.what()}});
      }
      if (cfg.cache.enabled && !cfg.cache.keep) store.purge();
    }
  }
  const RunReport report = build_report(read_jsonl(out_dir / "trials.jsonl"));

  std::vector<MetricRow> rows;
  for (const RoundResult& rr : report.rounds) {
    if (rr.failed) continue;
    for (const auto& [key, value] : rr.test_metrics) {
      const auto [metric, cutoff] = parse_metric_key(key);
      rows.push_back({report.dataset, report.model, report.optimizer, metric, cutoff, rr.round, value});
    }
  }
  {
    std::ofstream m(out_dir / "metrics.csv", std::ios::trunc);
    write_metrics_csv(m, rows);
    std::ofstream csv(out_dir / "report.csv", std::ios::trunc);
    write_report_csv(csv, {report});
    std::ofstream txt(out_dir / "report.txt", std::ios::trunc);
    write_report_table(txt, {report});
  }
  return report;
}

std::vector<TraceRow> export_trace(const std::vector<Json>& log, const std::string& param,
                                   const std::vector<Json>& timings) {
  std::map<int, int> incumbent;
  for (const Json& r : log)
    if (r.value("record", std::string()) == "final") incumbent[r.at("round").get<int>()] = r.value("best_trial_id", -1);
  std::map<std::pair<int, int>, double> elapsed_of;
  for (const Json& t : timings)
    elapsed_of[{t.at("round").get<int>(), t.at("trial_id").get<int>()}] = t.at("elapsed_seconds").get<double>();

  std::vector<TraceRow> rows;
  bool any_trial = false;
  int current_round = -1;
  double offset = 0.0, round_clock = 0.0, last = 0.0;
  for (const Json& r : log) {
    if (r.value("record", std::string()) != "trial") continue;
    if (!any_trial) {
      any_trial = true;
      if (!r.at("config").contains(param)) throw Error(ErrorCode::kUnknownParam, "no parameter named '" + param + "'");
    }
    const int round = r.at("round").get<int>();
    const int trial_id = r.at("trial_id").get<int>();
    if (round != current_round) {
      offset = last;
      round_clock = 0.0;
      current_round = round;
    }
    const auto found = elapsed_of.find({round, trial_id});
    if (found != elapsed_of.end())
      round_clock = found->second;
    else
      round_clock += r.value("wall_seconds", 0.0);
    last = std::max(last, offset + round_clock);
    if (r.at("status").get<std::string>() == "failed") continue;

    TraceRow row;
    row.round = round;
    row.trial_id = trial_id;
    row.elapsed_seconds = last;
    const Json& v = r.at("config").at(param);
    row.value = v.is_string() ? v.get<std::string>() : v.dump();
    row.objective = r.at("objective").get<double>();
    const auto inc = incumbent.find(round);
    row.is_incumbent = inc != incumbent.end() && inc->second == trial_id;
    rows.push_back(std::move(row));
  }
  if (!any_trial) throw Error(ErrorCode::kEmptyAggregate, "trial log holds no trials");
  return rows;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows, const std::string& param) {
  out << "round,trial_id,elapsed_seconds," << param << ",objective,is_incumbent\n";
  for (const TraceRow& r : rows)
    out << r.round << ',' << r.trial_id << ',' << format_double(r.elapsed_seconds, "%.6f") << ',' << r.value << ','
        << format_double(r.objective, "%.17g") << ',' << (r.is_incumbent ? 1 : 0) << '\n';
}

}  // namespace recbench
