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

#include "blocks.hpp"

#include <cmath>

#include "seqbench/common/errors.hpp"

namespace seqbench::models::detail {

using namespace tensor;

Tensor uniform_init(Shape shape, double limit, RngStream& rng) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.uniform(-limit, limit);
  return Tensor(std::move(shape), std::move(v), true);
}

Tensor xavier_init(std::size_t out, std::size_t in, RngStream& rng) {
  return uniform_init({out, in}, std::sqrt(6.0 / static_cast<double>(in + out)), rng);
}

std::vector<std::uint8_t> nonpad_flags(const Window& window) {
  std::vector<std::uint8_t> flags(window.ids.size());
  for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = window.ids[i] != data::kPad ? 1 : 0;
  return flags;
}

std::vector<AttentionMask> sequence_masks(const Window& window, bool causal) {
  const std::size_t W = window.width;
  std::vector<AttentionMask> masks;
  masks.reserve(window.batch);
  for (std::size_t b = 0; b < window.batch; ++b) {
    const ItemId* row = window.ids.data() + b * W;
    AttentionMask m(W);
    for (std::size_t i = 0; i < W; ++i) {
      if (row[i] == data::kPad) {
        m.set(i, i, true);
        continue;
      }
      const std::size_t end = causal ? i + 1 : W;
      for (std::size_t j = 0; j < end; ++j)
        if (row[j] != data::kPad) m.set(i, j, true);
    }
    masks.push_back(std::move(m));
  }
  return masks;
}

Tensor embed_with_positions(const Tensor& items, const Tensor& positions, const Window& window,
                            PositionOrigin origin) {
  std::vector<std::int32_t> pos(window.ids.size(), 0);
  for (std::size_t b = 0; b < window.batch; ++b) {
    std::size_t first = window.width;
    for (std::size_t t = 0; t < window.width; ++t) {
      if (window.ids[b * window.width + t] == data::kPad) continue;
      first = std::min(first, t);
      pos[b * window.width + t] =
          static_cast<std::int32_t>(origin == PositionOrigin::kLastItem ? window.width - t : t - first + 1);
    }
  }
  return add(embedding_lookup(items, window.ids), embedding_lookup(positions, pos));
}

Tensor gru_encode(const GruParams& p, const Tensor& x, const Window& window) {
  const std::size_t B = window.batch, W = window.width, d = p.weight_hh.dim(1);
  const std::vector<std::uint8_t> nonpad = nonpad_flags(window);
  std::size_t first = W;
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < W; ++t)
      if (nonpad[b * W + t]) {
        first = std::min(first, t);
        break;
      }

  const Tensor gi_all = linear(x, p.weight_ih, p.bias_ih);
  Tensor h = Tensor::zeros({B, d});
  std::vector<Tensor> steps;
  std::vector<std::size_t> rows(B);
  std::vector<std::uint8_t> keep(B);
  for (std::size_t t = first; t < W; ++t) {
    for (std::size_t b = 0; b < B; ++b) {
      rows[b] = b * W + t;
      keep[b] = nonpad[b * W + t];
    }
    const Tensor gi = gather_rows(gi_all, rows);
    const Tensor gh = linear(h, p.weight_hh, p.bias_hh);
    h = blend_rows(keep, gru_gates(gi, gh, h), h);
    steps.push_back(h);
  }
  // Back to window order; leading all-pad columns read a zero row.
  steps.push_back(Tensor::zeros({1, d}));
  const Tensor stacked = concat_rows(steps);
  const std::size_t zero_row = (W - first) * B;
  std::vector<std::size_t> order(B * W);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < W; ++t) order[b * W + t] = t < first ? zero_row : (t - first) * B + b;
  return gather_rows(stacked, order);
}

Tensor maybe_dropout(const Tensor& x, double p, bool training, RngStream* rng) {
  if (!training || p <= 0.0) return x;
  if (rng == nullptr) throw ContractViolation("training forward pass needs a dropout stream");
  return dropout(x, p, *rng);
}

Tensor transformer_block(const BlockParams& p, const Tensor& x, const Window& window,
                         const std::vector<AttentionMask>& masks, const BlockOptions& o) {
  const Tensor a = layer_norm(x, p.ln1_gain, p.ln1_bias);
  const Tensor att = multi_head_attention(linear(a, p.wq, p.bq), linear(a, p.wk, p.bk), linear(a, p.wv, p.bv),
                                          window.batch, o.heads, masks);
  const Tensor h = add(x, maybe_dropout(linear(att, p.wo, p.bo), o.dropout, o.training, o.rng));
  const Tensor f = layer_norm(h, p.ln2_gain, p.ln2_bias);
  const Tensor inner = linear(f, p.w1, p.b1);
  const Tensor ff = linear(o.gelu ? gelu(inner) : relu(inner), p.w2, p.b2);
  return add(h, maybe_dropout(ff, o.dropout, o.training, o.rng));
}

}  // namespace seqbench::models::detail
