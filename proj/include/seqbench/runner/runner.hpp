// Copyright 2026 The seqbench Authors.
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

#ifndef SEQBENCH_RUNNER_RUNNER_HPP_
#define SEQBENCH_RUNNER_RUNNER_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqbench/data/dataset.hpp"
#include "seqbench/emissions/tracker.hpp"
#include "seqbench/eval/evaluator.hpp"
#include "seqbench/runner/config.hpp"
#include "seqbench/runner/results.hpp"

namespace seqbench::runner {

// "<version> (<git revision>)".
std::string version_string();

struct RunPoint {
  models::Family family = models::Family::kGru4Rec;
  std::size_t d = 0;
  std::size_t length = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
};

// Depends only on its arguments, so adding a value to one sweep axis never
// moves the seed of an existing point.
std::uint64_t point_seed(std::uint64_t base, models::Family family, std::size_t d, std::size_t length, int replicate);

// Cartesian product in model, d, L, replicate order.
std::vector<RunPoint> make_plan(const ExperimentConfig& config);

struct PreparedDataset {
  data::SequenceData data;
  std::string content_hash;  // processed artifact identity
  std::filesystem::path dir;  // canonical directory the data was read from
  bool from_cache = false;
};

// Raw file -> 5-core sequences, cached under cache_dir keyed by the SHA-256 of
// the raw bytes, the format and the pipeline version. Canonical inputs are
// read in place.
PreparedDataset prepare_dataset(const DatasetSpec& spec, const std::filesystem::path& cache_dir);

// Everything that determines the outcome of a point. The run id is a prefix
// of its SHA-256.
nlohmann::json point_snapshot(const ExperimentConfig& config, const RunPoint& point, const std::string& dataset_hash);
std::string run_id(const nlohmann::json& snapshot);

struct RunRecord {
  std::string run_id;
  RunPoint point;
  nlohmann::json snapshot;
  bool ok = false;
  std::string error;
  eval::MetricReport test;
  std::size_t params = 0;
  int best_epoch = 0;
  emissions::EmissionsReport emissions;
  std::string started_at;
  std::string finished_at;

  ResultRow row(const std::string& dataset) const;
  nlohmann::json to_json() const;
};

// Trains and test-evaluates one point. Failures are returned as records with
// ok == false; nothing is written.
RunRecord run_point(const ExperimentConfig& config, const RunPoint& point, const PreparedDataset& dataset,
                    const data::SplitDataset& split, const std::filesystem::path& run_dir);

struct RunOptions {
  std::size_t parallel = 1;
  bool resume = false;
  std::ostream* log = nullptr;
};

struct PlanSummary {
  std::size_t planned = 0;
  std::size_t skipped = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
  std::vector<RunRecord> records;  // points run in this call, plan order
};

// Output layout:
//   results.csv            one row per completed point
//   failures.csv           one row per failed attempt
//   config.resolved.yaml   dump_config of the plan
//   runs/<run id>/         record.json, history.csv, best.ckpt(.json)
// Points whose record.json says "ok" are skipped with resume; without it
// they raise ConfigError so that nothing is trained twice by accident.
PlanSummary run_plan(const ExperimentConfig& config, const RunOptions& options);

}  // namespace seqbench::runner

#endif  // SEQBENCH_RUNNER_RUNNER_HPP_
