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

#ifndef SEQBENCH_RUNNER_CONFIG_HPP_
#define SEQBENCH_RUNNER_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "seqbench/data/dataset.hpp"
#include "seqbench/emissions/tracker.hpp"
#include "seqbench/eval/metrics.hpp"
#include "seqbench/models/model.hpp"
#include "seqbench/train/trainer.hpp"

namespace seqbench::runner {

struct DatasetSpec {
  std::string name;
  data::DatasetFormat format = data::DatasetFormat::kMovielens;
  std::filesystem::path path;  // raw file, or a canonical directory
};

struct EvalConfig {
  std::size_t m_neg = 100;  // eval::kAllItems (0) means "all"
  eval::TieRule ties = eval::TieRule::kPessimistic;
  std::size_t batch_size = 256;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<models::Family> models;
  std::vector<std::size_t> emb{32, 64, 128, 256, 512};
  std::vector<std::size_t> seqlen{20, 50, 100, 200};
  int replicates = 1;
  std::uint64_t seed = 0;
  std::filesystem::path output = "runs";
  std::filesystem::path cache_dir;  // empty: <output>/cache
  bool checkpoints = true;

  // family, d and length are filled in per run point.
  models::ModelConfig model;
  // seed is replaced by the per-point seed.
  train::TrainConfig train;
  EvalConfig eval;
  emissions::EmissionsConfig emissions;

  std::filesystem::path cache() const { return cache_dir.empty() ? output / "cache" : cache_dir; }
};

// Parses the YAML schema documented in the README. Unknown keys, type
// mismatches and out-of-range values raise ConfigError; a missing dataset
// file raises ConfigError too.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::string_view yaml, const std::string& source = "<config>");

// Fully resolved config in canonical key order. parse_config(dump_config(c))
// reproduces c and dumps to the same bytes.
std::string dump_config(const ExperimentConfig& config);

// Dataset name -> raw format for the names the tool knows about.
bool infer_format(std::string_view dataset_name, data::DatasetFormat& format);

// Closest candidate by edit distance, or empty when nothing is close.
std::string closest_key(std::string_view key, const std::vector<std::string>& candidates);

std::string_view seq2item_batching_name(data::BatchMode mode);

}  // namespace seqbench::runner

#endif  // SEQBENCH_RUNNER_CONFIG_HPP_
