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
#ifndef SEQBENCH_MODELS_MODEL_HPP_
#define SEQBENCH_MODELS_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqbench/common/rng.hpp"
#include "seqbench/data/batches.hpp"
#include "seqbench/tensor/tensor.hpp"

namespace seqbench::models {

using data::ItemId;
using tensor::Tensor;

enum class Family { kGru4Rec, kNarm, kSasRec, kBert4Rec, kCore };

Family parse_family(std::string_view name);  // ConfigError on unknown names
std::string_view family_name(Family family);
inline constexpr Family kAllFamilies[] = {Family::kGru4Rec, Family::kNarm, Family::kSasRec, Family::kBert4Rec,
                                          Family::kCore};

// Seq-to-item families predict only after the final step.
bool is_seq2item(Family family);
bool uses_attention(Family family);

struct ModelConfig {
  Family family = Family::kGru4Rec;
  std::size_t d = 50;
  std::size_t length = 50;
  std::size_t layers = 2;
  std::size_t heads = 2;
  double dropout = 0.2;
  double mask_prob = 0.2;

  void validate() const;  // ConfigError
};

struct Parameter {
  std::string name;
  Tensor value;
  std::size_t frozen_rows = 0;  // leading rows excluded from training (the pad row)
};

// Representation of a window batch: inputs is batch x width row-major and
// left-padded; width may exceed the configured length as long as at most
// config().length positions hold items.
struct Window {
  std::span<const ItemId> ids;
  std::size_t batch = 0;
  std::size_t width = 0;
};

class Model {
 public:
  Model(ModelConfig config, std::size_t num_items);
  virtual ~Model() = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const { return config_; }
  Family family() const { return config_.family; }
  std::size_t num_items() const { return num_items_; }

  // One d-dimensional row per window position, row b * width + t. For
  // seq-to-seq families row t predicts the item after position t; seq-to-item
  // families return at row t the final representation of the prefix ending
  // at t. Rows at pad positions carry no prediction. dropout_rng is used only
  // when training is true.
  virtual Tensor encode(const Window& window, bool training, RngStream* dropout_rng) const = 0;

  // Representation used to rank the item following each window, batch x d.
  virtual Tensor final_representation(const Window& window) const;

  // Embedding rows for candidate items, dropout-regularised in training for
  // families that ask for it.
  virtual Tensor candidate_embeddings(std::span<const ItemId> ids, bool training, RngStream* dropout_rng) const;

  // The training layout this family consumes.
  virtual data::BatchMode batch_mode() const;

  const Tensor& item_embeddings() const { return params_.front().value; }
  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  std::vector<Tensor> trainable_tensors() const;
  const Tensor& parameter(std::string_view name) const;

  // Trainable scalars; frozen pad rows are not counted.
  std::size_t count_params() const;
  // Every stored scalar including frozen rows.
  std::size_t storage_params() const;

 protected:
  Tensor& add_parameter(std::string name, Tensor value, std::size_t frozen_rows = 0);

  ModelConfig config_;
  std::size_t num_items_;

 private:
  std::vector<Parameter> params_;
};

std::unique_ptr<Model> build_model(const ModelConfig& config, std::size_t num_items, std::uint64_t seed);

// score(c) = <z, E[c]> for one representation z (length d).
std::vector<double> score(const Model& model, std::span<const double> z, std::span<const ItemId> candidates);

// Mean BCE over every prediction slot of a batch: the positive at label 1
// and its m_neg negatives at label 0. Records onto the active tape. Returns
// a scalar 0 (untracked) when the batch has no slot.
Tensor batch_loss(const Model& model, const data::Batch& batch, bool training, RngStream* dropout_rng);

}  // namespace seqbench::models

#endif  // SEQBENCH_MODELS_MODEL_HPP_
