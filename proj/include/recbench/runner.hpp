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

#ifndef RECBENCH_RUNNER_HPP
#define RECBENCH_RUNNER_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "recbench/checkpoint.hpp"
#include "recbench/dataio.hpp"
#include "recbench/hpo.hpp"
#include "recbench/metrics.hpp"
#include "recbench/models.hpp"
#include "recbench/searchspace.hpp"

namespace recbench {

struct DatasetSource {
  std::filesystem::path path;
  // Empty format means `path` is a directory written by save_dataset.
  std::optional<InputFormat> format = InputFormat::kGenericTsv;
  FeedbackMode mode = FeedbackMode::kImplicit;
  double threshold = 4.0;
  std::string name;  // label used in logs; defaults to the file stem
};

struct CacheSettings {
  bool enabled = true;
  bool keep = false;
  std::filesystem::path dir;  // empty: <out>/checkpoints
};

struct ExperimentConfig {
  DatasetSource dataset;
  SplitSpec split;  // seed is replaced per round
  ModelKind model = ModelKind::kBprMf;
  std::optional<SearchSpace> space;
  OptimizerSettings optimizer;
  int rounds = 3;
  std::vector<std::size_t> cutoffs{5, 10};
  std::size_t pool_size = 1000;
  int epochs = 30;
  std::uint64_t seed = 0;
  CacheSettings cache;
  bool wall_clock_in_log = false;

  SearchSpace effective_space() const;
};

// Relative dataset and cache paths resolve against base_dir. Throws
// InvalidConfig with the offending key.
ExperimentConfig experiment_config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
Json experiment_config_to_json(const ExperimentConfig& cfg);

// Human-readable description of the experiment config file.
std::string experiment_config_schema();

Dataset load_source(const DatasetSource& source);

// Stream ids for per-round randomness.
inline constexpr std::uint64_t kTestCandidateStream = 3;
inline constexpr std::uint64_t kValidCandidateStream = 4;
inline constexpr std::uint64_t kOptimizerStream = 5;
inline constexpr std::uint64_t kModelStream = 6;

struct TrainOutcome {
  std::unique_ptr<Recommender> model;
  int resumed_from = 0;
  int epochs_trained = 0;
  std::optional<std::string> diverged;  // set when training produced non-finite values
  std::vector<std::string> warnings;
};

// Resumes from a stored checkpoint with epochs_done <= to_epoch when one
// exists, trains the rest and stores the result. A null store trains from
// scratch and stores nothing. Corrupt checkpoints are discarded with a warning.
// Divergence is reported in the outcome rather than thrown.
TrainOutcome train_with_cache(const TrainingData& data, const std::string& data_tag, ModelKind kind,
                              const Config& config, std::uint64_t seed, int to_epoch, const CheckpointStore* store);

struct RoundResult {
  int round = 0;
  bool failed = false;
  std::string error;
  int best_trial_id = -1;
  Json best_config;
  std::vector<std::pair<std::string, double>> test_metrics;  // "ndcg@5" -> value
};

struct ReportCell {
  Metric metric = Metric::kNdcg;
  std::size_t cutoff = 10;
  Aggregate value;
  std::size_t rounds = 0;
};

struct RunReport {
  std::string dataset;
  std::string model;
  std::string optimizer;
  std::vector<RoundResult> rounds;
  std::vector<ReportCell> cells;
  std::size_t trials = 0;
  std::size_t completed = 0;
  std::size_t pruned = 0;
  std::size_t failed = 0;
  long epochs = 0;
  double wall_seconds = 0.0;

  const ReportCell* cell(Metric metric, std::size_t cutoff) const;
};

std::vector<Json> read_jsonl(const std::filesystem::path& path);

// A pure function of the trial log. Throws EmptyAggregate without a completed
// round.
RunReport build_report(const std::vector<Json>& records);

void write_report_csv(std::ostream& out, const std::vector<RunReport>& reports);
void write_report_table(std::ostream& out, const std::vector<RunReport>& reports,
                        std::optional<Metric> metric = std::nullopt, std::optional<std::size_t> cutoff = std::nullopt);

struct RunOptions {
  std::ostream* progress = nullptr;
};

// Writes trials.jsonl, timings.jsonl, metrics.csv, report.csv, report.txt and
// config.json into out_dir. Rounds that throw are logged as failed.
RunReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                         const RunOptions& options = {});

struct TraceRow {
  int round = 0;
  int trial_id = 0;
  double elapsed_seconds = 0.0;
  std::string value;
  double objective = 1.0;
  bool is_incumbent = false;
};

// One row per completed or pruned trial in log order. Elapsed time comes from
// the timings records when given, else from the logged wall_seconds.
std::vector<TraceRow> export_trace(const std::vector<Json>& log, const std::string& param,
                                   const std::vector<Json>& timings = {});

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows, const std::string& param);

}  // namespace recbench

#endif  // RECBENCH_RUNNER_HPP
