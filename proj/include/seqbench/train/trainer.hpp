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

#ifndef SEQBENCH_TRAIN_TRAINER_HPP_
#define SEQBENCH_TRAIN_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "seqbench/data/dataset.hpp"
#include "seqbench/emissions/tracker.hpp"
#include "seqbench/eval/evaluator.hpp"
#include "seqbench/models/model.hpp"

namespace seqbench::train {

struct TrainConfig {
  int epochs = 400;
  std::size_t batch_size = 128;
  std::size_t m_neg_train = 1;
  double lr = 1e-3;
  double grad_clip = 5.0;  // global L2 norm; 0 disables
  std::uint64_t seed = 0;
  std::string val_metric = "ndcg@10";
  int validate_every = 5;
  int patience = 0;  // validations without improvement before stopping; 0 disables
  std::size_t m_neg_eval = 100;
  // Layout for NARM and CORE: kLastStep, kPrefixPacked or kSeq2Item.
  data::BatchMode seq2item_batching = data::BatchMode::kLastStep;

  void validate() const;  // ConfigError
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double val_metric = 0.0;  // NaN when the epoch was not validated
  double seconds = 0.0;     // cumulative wall clock
  double kwh = 0.0;         // cumulative estimate
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_metric = 0.0;

  // epoch,loss,val_metric,seconds,kwh
  void write_csv(const std::filesystem::path& path) const;
};

struct TrainResult {
  std::unique_ptr<models::Model> model;  // parameters of the best epoch
  TrainHistory history;
};

struct TrainHooks {
  std::function<void(const EpochRecord&)> on_epoch;
  std::filesystem::path checkpoint;  // best model is saved here when set
};

// Seeded training: init, shuffle, negatives, dropout and cloze streams all
// come from config.seed. A non-finite batch loss raises TrainingDiverged.
TrainResult train(const models::ModelConfig& model_config, const data::SplitDataset& split, const TrainConfig& config,
                  const emissions::EmissionsConfig& emissions = {}, const TrainHooks& hooks = {});

// Validation metric with the evaluation stream reset on every call.
double validate(const models::Model& model, const data::SplitDataset& split, std::size_t m_neg_eval,
                const std::string& metric, std::uint64_t seed);

}  // namespace seqbench::train

#endif  // SEQBENCH_TRAIN_TRAINER_HPP_
