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
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "seqbench/common/rng.hpp"
#include "seqbench/tensor/tensor.hpp"

namespace seqbench::tensor {

// Elementwise and broadcasting arithmetic. Operands of add/sub/mul must have
// equal shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
// x[n x d] + v[d] on every row.
Tensor add_row(const Tensor& x, const Tensor& row);

Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);
// Exact (erf-based) GELU.
Tensor gelu(const Tensor& x);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor reshape(const Tensor& x, Shape shape);

// [m x k] . [k x n] -> [m x n].
Tensor matmul(const Tensor& a, const Tensor& b);
// x[n x in] . weight[out x in]^T + bias[out]. `bias` may be undefined.
// A 1-D x is treated as a single row and a 1-D result is returned.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias = {});

// Gathers rows of table[(m+1) x d]. Gradients scatter-add back into the
// table, except into row `pad_id`, which stays frozen. pad_id < 0 disables
// freezing.
Tensor embedding_lookup(const Tensor& table, std::span<const std::int32_t> ids,
                        std::int32_t pad_id = 0);

// Row gather without pad semantics; repeated indices accumulate gradients.
Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor concat_cols(const Tensor& a, const Tensor& b);
// Row r of the result is updated[r] where keep[r] != 0, else previous[r].
Tensor blend_rows(std::span<const std::uint8_t> keep, const Tensor& updated, const Tensor& previous);
// Per-row inner product of two [n x d] tensors -> [n].
Tensor rowwise_dot(const Tensor& a, const Tensor& b);

// Standardizes over the last axis, then applies gain and bias.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-8);

// Inverted dropout. Identity when p == 0.
Tensor dropout(const Tensor& x, double p, RngStream& rng);

// Weighted mean of the numerically stable logistic loss
//   max(x, 0) - x*y + log(1 + exp(-|x|)).
// Entries with weight 0 (padding) do not contribute. Empty input is an error.
Tensor bce_with_logits(const Tensor& logits, std::span<const double> labels,
                       std::span<const double> weights = {});

// GRU gate arithmetic given both pre-activations (gate order reset, update, new):
//   r = sigmoid(gi_r + gh_r), z = sigmoid(gi_z + gh_z),
//   n = tanh(gi_n + r * gh_n), h' = (1 - z) * n + z * h.
Tensor gru_gates(const Tensor& gi, const Tensor& gh, const Tensor& h);

struct GruWeights {
  Tensor weight_ih;  // [3h x in]
  Tensor weight_hh;  // [3h x h]
  Tensor bias_ih;    // [3h]
  Tensor bias_hh;    // [3h]
};

// One GRU step. x is [in] or [n x in]; h is [h] or [n x h].
Tensor gru_cell(const Tensor& x, const Tensor& h, const GruWeights& weights);

// Square boolean mask; allowed(i, j) means query i may attend to key j.
class AttentionMask {
 public:
  AttentionMask() = default;
  explicit AttentionMask(std::size_t length, bool fill = false)
      : length_(length), allowed_(length * length, fill ? 1 : 0) {}

  static AttentionMask causal(std::size_t length);
  static AttentionMask full(std::size_t length) { return AttentionMask(length, true); }

  std::size_t length() const { return length_; }
  bool operator()(std::size_t i, std::size_t j) const { return allowed_[i * length_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool on) { allowed_[i * length_ + j] = on ? 1 : 0; }

 private:
  std::size_t length_ = 0;
  std::vector<std::uint8_t> allowed_;
};

// softmax(q k^T / sqrt(d_k), masked entries at -inf) v for q, k [L x d_k] and
// v [L x d_v]. A query row with no allowed key is a contract violation.
Tensor scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                            const AttentionMask& mask);

// Batched multi-head form. q, k are [(batch * L) x d_k] and v [(batch * L) x d_v],
// sequences stored contiguously; heads split the feature columns evenly.
Tensor multi_head_attention(const Tensor& q, const Tensor& k, const Tensor& v, std::size_t batch,
                            std::size_t heads, std::span<const AttentionMask> masks);

// Unnormalized additive attention pooling:
//   out_i = sum_{j allowed} (w . sigmoid(query_i + key_j)) * values_j
// with query, key [(batch * L) x d_a], w [d_a], values [(batch * L) x d_v].
Tensor additive_attention_pool(const Tensor& query, const Tensor& key, const Tensor& weight,
                               const Tensor& values, std::size_t batch,
                               std::span<const AttentionMask> masks);

}  // namespace seqbench::tensor
