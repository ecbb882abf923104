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

#include <cmath>
#include <string>

#include "blocks.hpp"
#include "seqbench/common/errors.hpp"
#include "seqbench/models/model.hpp"

namespace seqbench::models {
namespace {

using namespace tensor;
using namespace detail;

// Embedding table with zero pad row 0 and `extra` trailing special rows.
Tensor item_table(std::size_t m, std::size_t d, std::size_t extra, RngStream& rng) {
  Tensor t = uniform_init({m + 1 + extra, d}, 0.5 / static_cast<double>(d), rng);
  for (std::size_t k = 0; k < d; ++k) t.mutable_values()[k] = 0.0;
  return t;
}

class RecurrentModel : public Model {
 protected:
  RecurrentModel(const ModelConfig& config, std::size_t m, RngStream& rng) : Model(config, m) {
    const std::size_t d = config.d;
    add_parameter("item_embedding", item_table(m, d, 0, rng), 1);
    // Xavier per gate block, gates stacked as (reset, update, new).
    auto stacked = [&](std::size_t in) {
      std::vector<double> v;
      for (int g = 0; g < 3; ++g) {
        const Tensor block = xavier_init(d, in, rng);
        v.insert(v.end(), block.values().begin(), block.values().end());
      }
      return Tensor({3 * d, in}, std::move(v));
    };
    gru_.weight_ih = add_parameter("gru.weight_ih", stacked(d));
    gru_.weight_hh = add_parameter("gru.weight_hh", stacked(d));
    gru_.bias_ih = add_parameter("gru.bias_ih", Tensor::zeros({3 * d}));
    gru_.bias_hh = add_parameter("gru.bias_hh", Tensor::zeros({3 * d}));
  }

  Tensor hidden_states(const Window& w, bool training, RngStream* rng) const {
    const Tensor x = maybe_dropout(embedding_lookup(item_embeddings(), w.ids), config_.dropout, training, rng);
    return gru_encode(gru_, x, w);
  }

  GruParams gru_;
};

class Gru4Rec final : public RecurrentModel {
 public:
  Gru4Rec(const ModelConfig& c, std::size_t m, RngStream& rng) : RecurrentModel(c, m, rng) {}
  Tensor encode(const Window& w, bool training, RngStream* rng) const override {
    return hidden_states(w, training, rng);
  }
};

class Narm final : public RecurrentModel {
 public:
  Narm(const ModelConfig& c, std::size_t m, RngStream& rng) : RecurrentModel(c, m, rng) {
    const std::size_t d = c.d;
    a1_ = add_parameter("attention.a1", xavier_init(d, d, rng));
    a2_ = add_parameter("attention.a2", xavier_init(d, d, rng));
    v_ = add_parameter("attention.v", uniform_init({d}, std::sqrt(6.0 / static_cast<double>(d + 1)), rng));
    b_ = add_parameter("output.b", xavier_init(d, 2 * d, rng));
  }

  // Row t: global state h_t and local summary sum_{j<=t} v.sigmoid(A1 h_j + A2 h_t) h_j.
  Tensor encode(const Window& w, bool training, RngStream* rng) const override {
    const Tensor h = hidden_states(w, training, rng);
    const Tensor local =
        additive_attention_pool(linear(h, a2_), linear(h, a1_), v_, h, w.batch, sequence_masks(w, true));
    return linear(maybe_dropout(concat_cols(h, local), config_.dropout, training, rng), b_);
  }

 private:
  Tensor a1_, a2_, v_, b_;
};

class AttentionModel : public Model {
 protected:
  AttentionModel(const ModelConfig& c, std::size_t m, std::size_t extra_rows, RngStream& rng) : Model(c, m) {
    const std::size_t d = c.d;
    add_parameter("item_embedding", item_table(m, d, extra_rows, rng), 1);
    positions_ = add_parameter("position_embedding", item_table(c.length, d, 0, rng), 1);
    for (std::size_t l = 0; l < c.layers; ++l) {
      const std::string p = "block" + std::to_string(l) + ".";
      BlockParams b;
      b.ln1_gain = add_parameter(p + "ln1.gain", Tensor::full({d}, 1.0));
      b.ln1_bias = add_parameter(p + "ln1.bias", Tensor::zeros({d}));
      b.wq = add_parameter(p + "attn.wq", xavier_init(d, d, rng));
      b.bq = add_parameter(p + "attn.bq", Tensor::zeros({d}));
      b.wk = add_parameter(p + "attn.wk", xavier_init(d, d, rng));
      b.bk = add_parameter(p + "attn.bk", Tensor::zeros({d}));
      b.wv = add_parameter(p + "attn.wv", xavier_init(d, d, rng));
      b.bv = add_parameter(p + "attn.bv", Tensor::zeros({d}));
      b.wo = add_parameter(p + "attn.wo", xavier_init(d, d, rng));
      b.bo = add_parameter(p + "attn.bo", Tensor::zeros({d}));
      b.ln2_gain = add_parameter(p + "ln2.gain", Tensor::full({d}, 1.0));
      b.ln2_bias = add_parameter(p + "ln2.bias", Tensor::zeros({d}));
      b.w1 = add_parameter(p + "ffn.w1", xavier_init(4 * d, d, rng));
      b.b1 = add_parameter(p + "ffn.b1", Tensor::zeros({4 * d}));
      b.w2 = add_parameter(p + "ffn.w2", xavier_init(d, 4 * d, rng));
      b.b2 = add_parameter(p + "ffn.b2", Tensor::zeros({d}));
      blocks_.push_back(b);
    }
    final_gain_ = add_parameter("final_ln.gain", Tensor::full({d}, 1.0));
    final_bias_ = add_parameter("final_ln.bias", Tensor::zeros({d}));
  }

  Tensor stack(const Window& w, bool causal, bool gelu, bool training, RngStream* rng,
               PositionOrigin origin = PositionOrigin::kLastItem) const {
    Tensor x =
        maybe_dropout(embed_with_positions(item_embeddings(), positions_, w, origin), config_.dropout, training, rng);
    const std::vector<AttentionMask> masks = sequence_masks(w, causal);
    const BlockOptions options{config_.heads, config_.dropout, gelu, training, rng};
    for (const BlockParams& b : blocks_) x = transformer_block(b, x, w, masks, options);
    return layer_norm(x, final_gain_, final_bias_);
  }

  Tensor positions_, final_gain_, final_bias_;
  std::vector<BlockParams> blocks_;
};

class SasRec final : public AttentionModel {
 public:
  SasRec(const ModelConfig& c, std::size_t m, RngStream& rng) : AttentionModel(c, m, 0, rng) {}
  Tensor encode(const Window& w, bool training, RngStream* rng) const override {
    return stack(w, true, false, training, rng);
  }
};

class Bert4Rec final : public AttentionModel {
 public:
  Bert4Rec(const ModelConfig& c, std::size_t m, RngStream& rng) : AttentionModel(c, m, 1, rng) {}

  ItemId mask_token() const { return static_cast<ItemId>(num_items_ + 1); }

  Tensor encode(const Window& w, bool training, RngStream* rng) const override {
    return stack(w, false, true, training, rng);
  }

  // Keeps the last L - 1 items and appends the mask token, whose slot is scored.
  Tensor final_representation(const Window& w) const override {
    std::vector<ItemId> shifted(w.ids.size(), data::kPad);
    const std::size_t keep = std::min(w.width, config_.length) - 1;
    for (std::size_t b = 0; b < w.batch; ++b) {
      const ItemId* src = w.ids.data() + (b + 1) * w.width - keep;
      ItemId* dst = shifted.data() + (b + 1) * w.width - 1 - keep;
      std::copy(src, src + keep, dst);
      dst[keep] = mask_token();
    }
    return Model::final_representation({shifted, w.batch, w.width});
  }

  data::BatchMode batch_mode() const override { return data::BatchMode::kCloze; }
};

class Core final : public AttentionModel {
 public:
  Core(const ModelConfig& c, std::size_t m, RngStream& rng) : AttentionModel(c, m, 0, rng) {
    weight_ = add_parameter("pool.weight", xavier_init(1, c.d, rng));
    bias_ = add_parameter("pool.bias", Tensor::zeros({1}));
  }

  // z_t = sum_{j<=t} softmax_j(w.h_j + b) E[s_j]: a convex combination of the
  // window's own item embeddings. Positions count from the oldest item so
  // that row t of a window equals the final row of its own prefix.
  Tensor encode(const Window& w, bool training, RngStream* rng) const override {
    const Tensor h = stack(w, true, false, training, rng, PositionOrigin::kFirstItem);
    const Tensor logits = linear(h, weight_, bias_);
    const Tensor items =
        maybe_dropout(embedding_lookup(item_embeddings(), w.ids), config_.dropout, training, rng);
    return multi_head_attention(Tensor::full({w.ids.size(), 1}, 1.0), logits, items, w.batch, 1,
                                sequence_masks(w, true));
  }

  Tensor candidate_embeddings(std::span<const ItemId> ids, bool training, RngStream* rng) const override {
    return maybe_dropout(embedding_lookup(item_embeddings(), ids), config_.dropout, training, rng);
  }

 private:
  Tensor weight_, bias_;
};

}  // namespace

std::unique_ptr<Model> build_model(const ModelConfig& config, std::size_t num_items, std::uint64_t seed) {
  config.validate();
  RngStream rng(derive_seed(seed, streams::kInit));
  switch (config.family) {
    case Family::kGru4Rec: return std::make_unique<Gru4Rec>(config, num_items, rng);
    case Family::kNarm: return std::make_unique<Narm>(config, num_items, rng);
    case Family::kSasRec: return std::make_unique<SasRec>(config, num_items, rng);
    case Family::kBert4Rec: return std::make_unique<Bert4Rec>(config, num_items, rng);
    case Family::kCore: return std::make_unique<Core>(config, num_items, rng);
  }
  throw ConfigError("unknown model family");
}

}  // namespace seqbench::models
