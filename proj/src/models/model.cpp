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

#include "seqbench/models/model.hpp"

#include <string>

#include "seqbench/common/errors.hpp"
#include "seqbench/tensor/ops.hpp"

namespace seqbench::models {

using namespace tensor;

Family parse_family(std::string_view name) {
  for (Family f : kAllFamilies)
    if (family_name(f) == name) return f;
  throw ConfigError("unknown model family '" + std::string(name) +
                    "' (expected gru4rec, narm, sasrec, bert4rec or core)");
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::kGru4Rec: return "gru4rec";
    case Family::kNarm: return "narm";
    case Family::kSasRec: return "sasrec";
    case Family::kBert4Rec: return "bert4rec";
    case Family::kCore: return "core";
  }
  return "?";
}

bool is_seq2item(Family family) { return family == Family::kNarm || family == Family::kCore; }

bool uses_attention(Family family) {
  return family == Family::kSasRec || family == Family::kBert4Rec || family == Family::kCore;
}

void ModelConfig::validate() const {
  const std::string name(family_name(family));
  if (d == 0) throw ConfigError(name + ": embedding size must be positive");
  if (length == 0) throw ConfigError(name + ": sequence length must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError(name + ": dropout must be in [0, 1)");
  if (uses_attention(family)) {
    if (layers == 0) throw ConfigError(name + ": layers must be positive");
    if (heads == 0 || d % heads != 0)
      throw ConfigError(name + ": embedding size " + std::to_string(d) + " is not divisible by " +
                        std::to_string(heads) + " heads");
  }
  if (family == Family::kBert4Rec && !(mask_prob > 0.0 && mask_prob < 1.0))
    throw ConfigError(name + ": mask_prob must be in (0, 1)");
}

Model::Model(ModelConfig config, std::size_t num_items) : config_(config), num_items_(num_items) {
  config_.validate();
  if (num_items == 0) throw ConfigError("model needs at least one item");
}

Tensor& Model::add_parameter(std::string name, Tensor value, std::size_t frozen_rows) {
  value.set_requires_grad(true);
  params_.push_back({std::move(name), std::move(value), frozen_rows});
  return params_.back().value;
}

std::vector<Tensor> Model::trainable_tensors() const {
  std::vector<Tensor> out;
  for (const Parameter& p : params_) out.push_back(p.value);
  return out;
}

const Tensor& Model::parameter(std::string_view name) const {
  for (const Parameter& p : params_)
    if (p.name == name) return p.value;
  throw ContractViolation("no parameter named " + std::string(name));
}

std::size_t Model::count_params() const {
  std::size_t n = 0;
  for (const Parameter& p : params_) n += p.value.numel() - p.frozen_rows * p.value.cols();
  return n;
}

std::size_t Model::storage_params() const {
  std::size_t n = 0;
  for (const Parameter& p : params_) n += p.value.numel();
  return n;
}

data::BatchMode Model::batch_mode() const {
  return is_seq2item(family()) ? data::BatchMode::kLastStep : data::BatchMode::kSeq2Seq;
}

Tensor Model::final_representation(const Window& window) const {
  const Tensor z = encode(window, false, nullptr);
  std::vector<std::size_t> rows(window.batch);
  for (std::size_t b = 0; b < window.batch; ++b) rows[b] = b * window.width + window.width - 1;
  return gather_rows(z, rows);
}

Tensor Model::candidate_embeddings(std::span<const ItemId> ids, bool, RngStream*) const {
  return embedding_lookup(item_embeddings(), ids);
}

namespace {

void check_candidates(const Model& model, std::span<const ItemId> ids) {
  for (ItemId id : ids)
    if (id < 1 || static_cast<std::size_t>(id) > model.num_items())
      throw ContractViolation("candidate " + std::to_string(id) + " is not an item id in 1.." +
                              std::to_string(model.num_items()));
}

bool mode_fits(Family family, data::BatchMode mode) {
  switch (family) {
    case Family::kGru4Rec:
    case Family::kSasRec: return mode == data::BatchMode::kSeq2Seq;
    case Family::kBert4Rec: return mode == data::BatchMode::kCloze;
    case Family::kNarm:
    case Family::kCore: return mode == data::BatchMode::kPrefixPacked || mode == data::BatchMode::kSeq2Item ||
                                 mode == data::BatchMode::kLastStep;
  }
  return false;
}

}  // namespace

std::vector<double> score(const Model& model, std::span<const double> z, std::span<const ItemId> candidates) {
  const std::size_t d = model.config().d;
  if (z.size() != d) throw DimensionError("score: representation has " + std::to_string(z.size()) + " values, expected " + std::to_string(d));
  check_candidates(model, candidates);
  const auto table = model.item_embeddings().values();
  std::vector<double> out(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double* e = table.data() + static_cast<std::size_t>(candidates[c]) * d;
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += z[k] * e[k];
    out[c] = s;
  }
  return out;
}

Tensor batch_loss(const Model& model, const data::Batch& batch, bool training, RngStream* dropout_rng) {
  if (!mode_fits(model.family(), batch.mode))
    throw ContractViolation(std::string(family_name(model.family())) + " cannot train on " +
                            data::batch_mode_name(batch.mode) + " batches");
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < batch.targets.size(); ++i)
    if (batch.targets[i] != data::kPad) slots.push_back(i);
  if (slots.empty()) return Tensor::scalar(0.0);

  const Tensor z = model.encode({batch.inputs, batch.size, batch.length}, training, dropout_rng);
  const std::size_t S = slots.size(), k = batch.m_neg;
  std::vector<std::size_t> rep_rows;
  std::vector<ItemId> candidates;
  rep_rows.reserve(S * (1 + k));
  candidates.reserve(S * (1 + k));
  for (std::size_t s : slots) {
    rep_rows.push_back(s);
    candidates.push_back(batch.targets[s]);
  }
  for (std::size_t s : slots)
    for (std::size_t j = 0; j < k; ++j) {
      rep_rows.push_back(s);
      candidates.push_back(batch.negatives[s * k + j]);
    }
  check_candidates(model, candidates);
  std::vector<double> labels(candidates.size(), 0.0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(S), 1.0);
  const Tensor logits =
      rowwise_dot(gather_rows(z, rep_rows), model.candidate_embeddings(candidates, training, dropout_rng));
  return bce_with_logits(logits, labels);
}

}  // namespace seqbench::models
