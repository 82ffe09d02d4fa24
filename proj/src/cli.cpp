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

#include "recbench/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "recbench/error.hpp"
#include "recbench/runner.hpp"

namespace recbench {

namespace fs = std::filesystem;

namespace {

// Thrown for problems detected before any work starts.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<fs::path> find_logs(const fs::path& dir) {
  std::vector<fs::path> logs;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() == "trials.jsonl") logs.push_back(entry.path());
  std::sort(logs.begin(), logs.end());
  return logs;
}

std::vector<fs::path> require_logs(const std::string& results) {
  if (!fs::is_directory(results)) throw UsageError("results directory '" + results + "' does not exist");
  auto logs = find_logs(results);
  if (logs.empty()) throw UsageError("no trial logs found under '" + results + "'");
  return logs;
}

int cmd_prepare(const std::string& input, const std::string& format, const std::string& mode, double threshold,
                const std::string& out_dir, std::ostream& out) {
  if (!fs::is_regular_file(input)) throw UsageError("input file '" + input + "' does not exist");
  InputFormat fmt;
  FeedbackMode fb;
  try {
    fmt = parse_input_format(format);
    fb = parse_feedback_mode(mode);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const Dataset dataset = build_dataset(binarize(load_interactions(input, fmt), threshold, fb));
  save_dataset(dataset, out_dir);
  out << "users " << dataset.n_users() << "\nitems " << dataset.n_items() << "\ninteractions "
      << dataset.n_interactions() << "\nsparsity " << dataset.sparsity() << "\nid " << dataset.id() << '\n';
  return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  if (!fs::is_regular_file(config_path)) throw UsageError("config file '" + config_path + "' does not exist");
  ExperimentConfig cfg;
  try {
    cfg = load_experiment_config(config_path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (const char* seed = std::getenv("RECBENCH_SEED"); seed && *seed) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(seed, &used);
      if (used != std::string(seed).size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw UsageError(std::string("RECBENCH_SEED is not an unsigned integer: ") + seed);
    }
  }
  if (!fs::exists(cfg.dataset.path)) throw UsageError("dataset '" + cfg.dataset.path.string() + "' does not exist");
  RunOptions options;
  options.progress = &err;
  const RunReport report = run_experiment(cfg, out_dir, options);
  write_report_table(out, {report});
  return kExitOk;
}

int cmd_report(const std::string& results, const std::string& metric, std::size_t cutoff, std::ostream& out) {
  std::optional<Metric> m;
  if (!metric.empty()) {
    try {
      m = parse_metric(metric);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  std::vector<RunReport> reports;
  for (const fs::path& log : require_logs(results)) reports.push_back(build_report(read_jsonl(log)));
  write_report_table(out, reports, m, cutoff > 0 ? std::optional<std::size_t>(cutoff) : std::nullopt);
  return kExitOk;
}

int cmd_trace(const std::string& results, const std::string& param, const std::string& out_path, std::ostream& out) {
  const auto logs = require_logs(results);
  if (logs.size() > 1) throw UsageError("several trial logs under '" + results + "'; point at one run directory");
  const std::vector<Json> log = read_jsonl(logs.front());
  std::vector<Json> timings;
  if (const fs::path t = logs.front().parent_path() / "timings.jsonl"; fs::is_regular_file(t)) timings = read_jsonl(t);
  std::vector<TraceRow> rows;
  try {
    rows = export_trace(log, param, timings);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUnknownParam) throw UsageError(e.what());
    throw;
  }
  if (out_path.empty() || out_path == "-") {
    write_trace_csv(out, rows, param);
  } else {
    if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream f(out_path, std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIoError, "cannot write " + out_path);
    write_trace_csv(f, rows, param);
  }
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperparameter optimization benchmark for top-N recommenders", "recbench"};
  app.footer("\n" + experiment_config_schema());
  app.require_subcommand(1);

  std::string input, format = "generic-tsv", mode = "implicit", prep_out;
  double threshold = 4.0;
  auto* prepare = app.add_subcommand("prepare", "Index a raw interaction file into a dataset directory");
  prepare->add_option("--input", input, "Raw interaction file")->required();
  prepare->add_option("--format", format, "generic-tsv | ml1m | lastfm")->capture_default_str();
  prepare->add_option("--mode", mode, "implicit | explicit")->capture_default_str();
  prepare->add_option("--threshold", threshold, "Explicit mode keeps ratings above this")->capture_default_str();
  prepare->add_option("--out", prep_out, "Output directory")->required();

  std::string config_path, run_out;
  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  run->add_option("--config", config_path, "Experiment config JSON")->required();
  run->add_option("--out", run_out, "Output directory")->required();

  std::string results, metric;
  std::size_t cutoff = 0;
  auto* report = app.add_subcommand("report", "Aggregate trial logs into a metric table");
  report->add_option("--results", results, "Directory holding one or more runs")->required();
  report->add_option("--metric", metric, "hr | ndcg (default: both)");
  report->add_option("--cutoff", cutoff, "Cutoff N (default: all)");

  std::string trace_results, param, trace_out;
  auto* trace = app.add_subcommand("trace", "Export a per-trial trajectory for one hyperparameter");
  trace->add_option("--results", trace_results, "Run directory")->required();
  trace->add_option("--param", param, "Hyperparameter name")->required();
  trace->add_option("--out", trace_out, "CSV path, '-' for stdout")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*prepare) return cmd_prepare(input, format, mode, threshold, prep_out, out);
    if (*run) return cmd_run(config_path, run_out, out, err);
    if (*report) return cmd_report(results, metric, cutoff, out);
    if (*trace) return cmd_trace(trace_results, param, trace_out, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace recbench
