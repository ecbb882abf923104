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

#include "seqbench/train/trainer.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "seqbench/common/errors.hpp"
#include "seqbench/data/batches.hpp"
#include "seqbench/models/checkpoint.hpp"
#include "seqbench/tensor/adam.hpp"
#include "seqbench/tensor/tape.hpp"

namespace seqbench::train {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be at least 1");
  if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (m_neg_train < 1) throw ConfigError("train.m_neg must be at least 1");
  if (!(lr > 0.0)) throw ConfigError("train.lr must be positive");
  if (grad_clip < 0.0) throw ConfigError("train.grad_clip must not be negative");
  if (validate_every < 1) throw ConfigError("train.validate_every must be at least 1");
  if (patience < 0) throw ConfigError("train.patience must not be negative");
  eval::MetricReport probe;
  probe.at[10] = {};
  probe.at[20] = {};
  probe.metric(val_metric);  // throws on unknown names
  if (seq2item_batching != data::BatchMode::kLastStep && seq2item_batching != data::BatchMode::kPrefixPacked &&
      seq2item_batching != data::BatchMode::kSeq2Item)
    throw ConfigError(std::string("seq2item batching cannot be ") + data::batch_mode_name(seq2item_batching));
}

void TrainHistory::write_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write history " + path.string());
  out << "epoch,loss,val_metric,seconds,kwh\n" << std::setprecision(17);
  for (const EpochRecord& e : epochs) {
    out << e.epoch << ',' << e.loss << ',';
    if (!std::isnan(e.val_metric)) out << e.val_metric;
    out << ',' << e.seconds << ',' << e.kwh << '\n';
  }
}

double validate(const models::Model& model, const data::SplitDataset& split, std::size_t m_neg_eval,
                const std::string& metric, std::uint64_t seed) {
  eval::EvalOptions o;
  o.phase = eval::Phase::kValidation;
  o.m_neg = m_neg_eval;
  o.seed = seed;
  return eval::evaluate(model, split, o).metric(metric);
}

namespace {

std::vector<std::vector<double>> snapshot(const models::Model& model) {
  std::vector<std::vector<double>> out;
  for (const auto& p : model.parameters()) out.emplace_back(p.value.values().begin(), p.value.values().end());
  return out;
}

void restore(models::Model& model, const std::vector<std::vector<double>>& values) {
  auto& params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto dst = params[i].value.mutable_values();
    std::copy(values[i].begin(), values[i].end(), dst.begin());
  }
}

}  // namespace

TrainResult train(const models::ModelConfig& model_config, const data::SplitDataset& split, const TrainConfig& config,
                  const emissions::EmissionsConfig& emissions, const TrainHooks& hooks) {
  config.validate();
  const SeedBundle seeds = set_all_seeds(config.seed);
  TrainResult result;
  result.model = models::build_model(model_config, split.num_items, config.seed);
  models::Model& model = *result.model;

  data::BatchOptions bo;
  bo.length = model_config.length;
  bo.batch_size = config.batch_size;
  bo.mode = model.batch_mode();
  if (models::is_seq2item(model.family())) bo.mode = config.seq2item_batching;
  bo.m_neg = config.m_neg_train;
  bo.mask_prob = model_config.mask_prob;
  bo.mask_token = static_cast<data::ItemId>(split.num_items + 1);

  RngStream shuffle = seeds.stream(streams::kShuffle), negatives = seeds.stream(streams::kNegatives);
  RngStream dropout = seeds.stream(streams::kDropout), cloze = seeds.stream(streams::kCloze);
  const data::TrainView view = split.train_view();
  const bool can_validate = split.num_validation() > 0;

  auto params = model.trainable_tensors();
  tensor::AdamState adam = tensor::make_adam_state(params, {.lr = config.lr});
  emissions::Tracker tracker(emissions);
  tracker.start();

  std::vector<std::vector<double>> best;
  double best_metric = -std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = data::make_batches(view, bo, {shuffle, negatives, cloze});
    double loss_sum = 0.0;
    std::size_t slots = 0;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      const data::Batch& batch = batches[bi];
      const std::size_t n = batch.num_slots();
      if (n == 0) continue;
      tensor::zero_grads(params);
      tensor::GradientTape tape;
      tensor::TapeScope scope(tape);
      const tensor::Tensor loss = models::batch_loss(model, batch, true, &dropout);
      const double value = loss.item();
      if (!std::isfinite(value)) throw TrainingDiverged(epoch, bi, value);
      tape.backward(loss);
      if (config.grad_clip > 0.0) tensor::clip_grad_norm(params, config.grad_clip);
      tensor::adam_step(params, adam);
      loss_sum += value * static_cast<double>(n);
      slots += n;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.loss = slots ? loss_sum / static_cast<double>(slots) : 0.0;
    record.val_metric = std::numeric_limits<double>::quiet_NaN();
    const bool last = epoch == config.epochs;
    bool stop = false;
    if (can_validate && (epoch % config.validate_every == 0 || last)) {
      record.val_metric = validate(model, split, config.m_neg_eval, config.val_metric, config.seed);
      if (record.val_metric > best_metric) {
        best_metric = record.val_metric;
        best = snapshot(model);
        result.history.best_epoch = epoch;
        since_best = 0;
      } else if (config.patience > 0 && ++since_best >= config.patience) {
        stop = true;
      }
    }
    const emissions::EmissionsReport so_far = tracker.report();
    record.seconds = so_far.elapsed_seconds;
    record.kwh = so_far.energy_kwh;
    result.history.epochs.push_back(record);
    if (hooks.on_epoch) hooks.on_epoch(record);
    if (stop) break;
  }

  if (best.empty()) {
    // No validation targets: the final epoch is the only candidate.
    result.history.best_epoch = result.history.epochs.back().epoch;
    result.history.best_metric = std::numeric_limits<double>::quiet_NaN();
  } else {
    restore(model, best);
    result.history.best_metric = best_metric;
  }
  tensor::zero_grads(params);
  if (!hooks.checkpoint.empty()) {
    models::save_checkpoint(model, hooks.checkpoint,
                            {{"seed", config.seed},
                             {"epoch", result.history.best_epoch},
                             {"val_metric_name", config.val_metric},
                             {"val_metric", std::isnan(result.history.best_metric) ? nlohmann::json(nullptr)
                                                                                    : nlohmann::json(result.history.best_metric)}});
  }
  return result;
}

}  // namespace seqbench::train
