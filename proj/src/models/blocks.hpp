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

// Building blocks shared by the model families.
#ifndef SEQBENCH_SRC_MODELS_BLOCKS_HPP_
#define SEQBENCH_SRC_MODELS_BLOCKS_HPP_

#include <vector>

#include "seqbench/models/model.hpp"
#include "seqbench/tensor/ops.hpp"

namespace seqbench::models::detail {

using tensor::AttentionMask;
using tensor::Shape;

Tensor uniform_init(Shape shape, double limit, RngStream& rng);
// Xavier-uniform [out x in] matrix.
Tensor xavier_init(std::size_t out, std::size_t in, RngStream& rng);

std::vector<std::uint8_t> nonpad_flags(const Window& window);

// One mask per sequence. Item positions see item positions (earlier or equal
// ones when causal); a pad position sees only itself so that its row stays
// well defined without touching real rows.
std::vector<AttentionMask> sequence_masks(const Window& window, bool causal);

enum class PositionOrigin {
  kLastItem,   // the last item has position 1
  kFirstItem,  // the oldest item in the window has position 1
};

// Item embeddings plus positional embeddings. Pad positions get the zero pad
// rows of both tables, and neither origin depends on the pad prefix.
Tensor embed_with_positions(const Tensor& items, const Tensor& positions, const Window& window,
                            PositionOrigin origin);

struct GruParams {
  Tensor weight_ih, weight_hh, bias_ih, bias_hh;
};

// Runs a GRU over x [(batch * width) x d] in window order. The state stays at
// zero across the pad prefix, so output rows at pad positions are zero.
Tensor gru_encode(const GruParams& p, const Tensor& x, const Window& window);

struct BlockParams {
  Tensor ln1_gain, ln1_bias;
  Tensor wq, bq, wk, bk, wv, bv, wo, bo;
  Tensor ln2_gain, ln2_bias;
  Tensor w1, b1, w2, b2;
};

struct BlockOptions {
  std::size_t heads = 1;
  double dropout = 0.0;
  bool gelu = false;
  bool training = false;
  RngStream* rng = nullptr;
};

// Pre-norm transformer block: x + attn(LN(x)), then + FFN(LN(.)).
Tensor transformer_block(const BlockParams& p, const Tensor& x, const Window& window,
                         const std::vector<AttentionMask>& masks, const BlockOptions& options);

Tensor maybe_dropout(const Tensor& x, double p, bool training, RngStream* rng);

}  // namespace seqbench::models::detail

#endif  // SEQBENCH_SRC_MODELS_BLOCKS_HPP_
