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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "recbench/cli.hpp"
#include "recbench/error.hpp"
#include "recbench/gp.hpp"
#include "recbench/hyperband.hpp"
#include "recbench/metrics.hpp"
#include "recbench/runner.hpp"
#include "recbench/searchspace.hpp"

namespace py = pybind11;

namespace {

// Configs and reports cross the boundary as JSON text; the Python side
// turns them into dicts.
std::string report_json(const std::filesystem::path& log) {
  const auto report = recbench::build_report(recbench::read_jsonl(log));
  recbench::Json j;
  j["dataset"] = report.dataset;
  j["model"] = report.model;
  j["optimizer"] = report.optimizer;
  j["trials"] = report.trials;
  j["completed"] = report.completed;
  j["pruned"] = report.pruned;
  j["failed"] = report.failed;
  j["epochs"] = report.epochs;
  auto& cells = j["metrics"] = recbench::Json::object();
  for (const auto& c : report.cells) {
    const std::string key = std::string(recbench::metric_name(c.metric)) + "@" + std::to_string(c.cutoff);
    cells[key] = {{"mean", c.value.mean}, {"std", c.value.std}, {"rounds", c.rounds}};
  }
  return j.dump();
}

std::string run_json(const std::string& config_json, const std::filesystem::path& out_dir,
                     const std::filesystem::path& base_dir) {
  const auto cfg = recbench::experiment_config_from_json(recbench::Json::parse(config_json), base_dir);
  {
    py::gil_scoped_release release;
    recbench::run_experiment(cfg, out_dir);
  }
  return report_json(out_dir / "trials.jsonl");
}

std::vector<std::vector<double>> unit_vectors(const std::string& model, int count, std::uint64_t seed) {
  const auto space = recbench::default_space(model);
  recbench::Rng rng(seed);
  std::vector<std::vector<double>> out;
  for (int k = 0; k < count; ++k) out.push_back(recbench::encode_unit(space, recbench::sample_uniform(space, rng)));
  return out;
}

std::string decode_json(const std::string& model, const std::vector<double>& u) {
  const auto space = recbench::default_space(model);
  return recbench::config_to_json(recbench::decode_unit(space, u)).dump();
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = recbench::dispatch(args, out, err);
  py::print(out.str(), py::arg("end") = "");
  if (!err.str().empty()) py::print(err.str(), py::arg("end") = "", py::arg("file") = py::module_::import("sys").attr("stderr"));
  return code;
}

}  // namespace

PYBIND11_MODULE(_recbench, m) {
  m.doc() = "Native core of recbench: metrics, schedules and the experiment runner.";

  static py::exception<recbench::Error> error(m, "RecbenchError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const recbench::Error& e) {
      py::set_error(error, e.what());
    }
  });

  using Items = std::vector<recbench::Index>;
  m.def(
      "ndcg_at_n", [](const Items& topn, const Items& test, std::size_t n) { return recbench::ndcg_at_n(topn, test, n); },
      py::arg("topn"), py::arg("test_items"), py::arg("n"));
  m.def(
      "hr_at_n", [](const Items& topn, const Items& test, std::size_t n) { return recbench::hr_at_n(topn, test, n); },
      py::arg("topn"), py::arg("test_items"), py::arg("n"));
  m.def(
      "aggregate_rounds",
      [](const std::vector<double>& values) {
        const auto a = recbench::aggregate_rounds(values);
        return py::make_tuple(a.mean, a.std);
      },
      py::arg("values"));
  m.def("expected_improvement", &recbench::expected_improvement, py::arg("mean"), py::arg("stddev"), py::arg("best"),
        py::arg("xi") = 0.01);
  m.def(
      "hyperband_schedule",
      [](int b_min, int b_max, int eta) {
        py::list brackets;
        for (const auto& b : recbench::hyperband_schedule(b_min, b_max, eta)) {
          py::list rungs;
          for (const auto& r : b.rungs) rungs.append(py::make_tuple(r.n_configs, r.budget));
          brackets.append(py::make_tuple(b.s, rungs));
        }
        return brackets;
      },
      py::arg("b_min") = 5, py::arg("b_max") = 30, py::arg("eta") = 3);
  m.def("sample_unit", &unit_vectors, py::arg("model"), py::arg("count"), py::arg("seed"));
  m.def("decode_unit_json", &decode_json, py::arg("model"), py::arg("u"));
  m.def("run_experiment_json", &run_json, py::arg("config_json"), py::arg("out_dir"), py::arg("base_dir") = "");
  m.def("report_json", &report_json, py::arg("log"));
  m.def("cli", &cli, py::arg("args"));
}
