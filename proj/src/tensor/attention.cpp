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
#include <limits>
#include <string>

#include "op_support.hpp"
#include "seqbench/tensor/ops.hpp"

namespace seqbench::tensor {

using detail::ConstMatMap;
using detail::ConstStridedMap;
using detail::ImplPtr;
using detail::MatMap;
using detail::recording_tape;
using detail::require_defined;
using detail::RowMat;
using detail::StridedMap;

namespace {

const AttentionMask& mask_for(std::span<const AttentionMask> masks, std::size_t b) {
  return masks.size() == 1 ? masks[0] : masks[b];
}

void check_masks(const char* op, std::span<const AttentionMask> masks, std::size_t batch, std::size_t length) {
  if (masks.size() != batch && masks.size() != 1) {
    throw DimensionError(std::string(op) + ": " + std::to_string(masks.size()) + " masks for batch of " +
                         std::to_string(batch));
  }
  for (const AttentionMask& m : masks) {
    if (m.length() != length) {
      throw DimensionError(std::string(op) + ": mask length " + std::to_string(m.length()) +
                           " vs sequence length " + std::to_string(length));
    }
  }
}

std::size_t sequence_length(const char* op, const Tensor& t, std::size_t batch) {
  if (batch == 0 || t.rows() % batch != 0) {
    throw DimensionError(std::string(op) + ": " + shape_str(t.shape()) + " is not " + std::to_string(batch) +
                         " equal-length sequences");
  }
  return t.rows() / batch;
}

}  // namespace

Tensor multi_head_attention(const Tensor& q, const Tensor& k, const Tensor& v, std::size_t batch,
                            std::size_t heads, std::span<const AttentionMask> masks) {
  require_defined("attention", q);
  require_defined("attention", k);
  require_defined("attention", v);
  if (q.shape() != k.shape() || q.rows() != v.rows() || q.ndim() != 2 || v.ndim() != 2) {
    throw DimensionError("attention: q " + shape_str(q.shape()) + ", k " + shape_str(k.shape()) + ", v " +
                         shape_str(v.shape()));
  }
  const std::size_t len = sequence_length("attention", q, batch);
  const std::size_t dk = q.cols(), dv = v.cols();
  if (heads == 0 || dk % heads != 0 || dv % heads != 0) {
    throw DimensionError("attention: feature sizes " + std::to_string(dk) + "/" + std::to_string(dv) +
                         " not divisible by " + std::to_string(heads) + " heads");
  }
  check_masks("attention", masks, batch, len);
  const std::size_t hk = dk / heads, hv = dv / heads;
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(hk));
  const auto L = static_cast<Eigen::Index>(len);

  std::vector<double> probs(batch * heads * len * len, 0.0);
  Tensor out = Tensor::zeros({batch * len, dv});
  RowMat scores(L, L);
  for (std::size_t b = 0; b < batch; ++b) {
    const AttentionMask& mask = mask_for(masks, b);
    for (std::size_t h = 0; h < heads; ++h) {
      ConstStridedMap qh(q.values().data() + b * len * dk + h * hk, L, hk, Eigen::OuterStride<>(dk));
      ConstStridedMap kh(k.values().data() + b * len * dk + h * hk, L, hk, Eigen::OuterStride<>(dk));
      ConstStridedMap vh(v.values().data() + b * len * dv + h * hv, L, hv, Eigen::OuterStride<>(dv));
      scores.noalias() = qh * kh.transpose();
      MatMap p(probs.data() + (b * heads + h) * len * len, L, L);
      for (std::size_t i = 0; i < len; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (std::size_t j = 0; j < len; ++j) {
          if (!mask(i, j)) continue;
          any = true;
          // NaN scores propagate so that divergence surfaces in the loss.
          const double s = scores(i, j) * inv_scale;
          mx = std::isnan(s) || std::isnan(mx) ? std::numeric_limits<double>::quiet_NaN() : std::max(mx, s);
        }
        if (!any) {
          throw ContractViolation("attention: query " + std::to_string(i) + " of sequence " + std::to_string(b) +
                                  " has no key to attend to");
        }
        double total = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
          const double e = mask(i, j) ? std::exp(scores(i, j) * inv_scale - mx) : 0.0;
          p(i, j) = e;
          total += e;
        }
        p.row(i) /= total;
      }
      StridedMap oh(out.mutable_values().data() + b * len * dv + h * hv, L, hv, Eigen::OuterStride<>(dv));
      oh.noalias() = p * vh;
    }
  }

  if (GradientTape* tape = recording_tape({&q, &k, &v})) {
    ImplPtr qi = q.impl(), ki = k.impl(), vi = v.impl(), oi = out.impl();
    tape->record("attention", {qi, ki, vi}, out,
                 [tape, qi, ki, vi, oi, probs = std::move(probs), batch, heads, len, dk, dv, hk, hv, inv_scale] {
                   const auto L = static_cast<Eigen::Index>(len);
                   const bool gq = tape->tracks(*qi), gk = tape->tracks(*ki), gv = tape->tracks(*vi);
                   if (gq) qi->ensure_grad();
                   if (gk) ki->ensure_grad();
                   if (gv) vi->ensure_grad();
                   RowMat dp(L, L), ds(L, L);
                   for (std::size_t b = 0; b < batch; ++b) {
                     for (std::size_t h = 0; h < heads; ++h) {
                       const std::size_t qoff = b * len * dk + h * hk, voff = b * len * dv + h * hv;
                       ConstMatMap p(probs.data() + (b * heads + h) * len * len, L, L);
                       ConstStridedMap dout(oi->grad.data() + voff, L, hv, Eigen::OuterStride<>(dv));
                       ConstStridedMap vh(vi->value.data() + voff, L, hv, Eigen::OuterStride<>(dv));
                       if (gv) {
                         StridedMap dvh(vi->grad.data() + voff, L, hv, Eigen::OuterStride<>(dv));
                         dvh.noalias() += p.transpose() * dout;
                       }
                       if (!gq && !gk) continue;
                       dp.noalias() = dout * vh.transpose();
                       const Eigen::VectorXd row_dot = (dp.array() * p.array()).rowwise().sum();
                       ds = (p.array() * (dp.colwise() - row_dot).array()) * inv_scale;
                       if (gq) {
                         ConstStridedMap kh(ki->value.data() + qoff, L, hk, Eigen::OuterStride<>(dk));
                         StridedMap dqh(qi->grad.data() + qoff, L, hk, Eigen::OuterStride<>(dk));
                         dqh.noalias() += ds * kh;
                       }
                       if (gk) {
                         ConstStridedMap qh(qi->value.data() + qoff, L, hk, Eigen::OuterStride<>(dk));
                         StridedMap dkh(ki->grad.data() + qoff, L, hk, Eigen::OuterStride<>(dk));
                         dkh.noalias() += ds.transpose() * qh;
                       }
                     }
                   }
                 });
  }
  return out;
}

Tensor scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v, const AttentionMask& mask) {
  return multi_head_attention(q, k, v, 1, 1, std::span<const AttentionMask>(&mask, 1));
}

Tensor additive_attention_pool(const Tensor& query, const Tensor& key, const Tensor& weight, const Tensor& values,
                               std::size_t batch, std::span<const AttentionMask> masks) {
  require_defined("additive_attention_pool", query);
  require_defined("additive_attention_pool", key);
  require_defined("additive_attention_pool", weight);
  require_defined("additive_attention_pool", values);
  if (query.shape() != key.shape() || query.ndim() != 2 || weight.numel() != query.cols() ||
      values.rows() != query.rows()) {
    throw DimensionError("additive_attention_pool: query " + shape_str(query.shape()) + ", key " +
                         shape_str(key.shape()) + ", weight " + shape_str(weight.shape()) + ", values " +
                         shape_str(values.shape()));
  }
  const std::size_t len = sequence_length("additive_attention_pool", query, batch);
  check_masks("additive_attention_pool", masks, batch, len);
  const std::size_t da = query.cols(), dv = values.cols();
  const auto L = static_cast<Eigen::Index>(len);

  auto sig = [](double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); };

  std::vector<double> energies(batch * len * len, 0.0);
  Tensor out = Tensor::zeros({batch * len, dv});
  const double* w = weight.values().data();
  for (std::size_t b = 0; b < batch; ++b) {
    const AttentionMask& mask = mask_for(masks, b);
    double* e = energies.data() + b * len * len;
    for (std::size_t i = 0; i < len; ++i) {
      const double* qi = query.values().data() + (b * len + i) * da;
      for (std::size_t j = 0; j < len; ++j) {
        if (!mask(i, j)) continue;
        const double* kj = key.values().data() + (b * len + j) * da;
        double acc = 0.0;
        for (std::size_t c = 0; c < da; ++c) acc += w[c] * sig(qi[c] + kj[c]);
        e[i * len + j] = acc;
      }
    }
    ConstMatMap em(e, L, L);
    ConstMatMap vb(values.values().data() + b * len * dv, L, dv);
    MatMap(out.mutable_values().data() + b * len * dv, L, dv).noalias() = em * vb;
  }

  if (GradientTape* tape = recording_tape({&query, &key, &weight, &values})) {
    ImplPtr qi = query.impl(), ki = key.impl(), wi = weight.impl(), vi = values.impl(), oi = out.impl();
    std::vector<AttentionMask> mask_copy(masks.begin(), masks.end());
    tape->record(
        "additive_attention_pool", {qi, ki, wi, vi}, out,
        [tape, qi, ki, wi, vi, oi, sig, energies = std::move(energies), mask_copy = std::move(mask_copy), batch, len,
         da, dv] {
          const auto L = static_cast<Eigen::Index>(len);
          const bool gq = tape->tracks(*qi), gk = tape->tracks(*ki), gw = tape->tracks(*wi), gv = tape->tracks(*vi);
          if (gq) qi->ensure_grad();
          if (gk) ki->ensure_grad();
          if (gw) wi->ensure_grad();
          if (gv) vi->ensure_grad();
          RowMat de(L, L);
          for (std::size_t b = 0; b < batch; ++b) {
            const AttentionMask& mask = mask_copy.size() == 1 ? mask_copy[0] : mask_copy[b];
            ConstMatMap em(energies.data() + b * len * len, L, L);
            ConstMatMap dout(oi->grad.data() + b * len * dv, L, dv);
            ConstMatMap vb(vi->value.data() + b * len * dv, L, dv);
            if (gv) MatMap(vi->grad.data() + b * len * dv, L, dv).noalias() += em.transpose() * dout;
            if (!gq && !gk && !gw) continue;
            de.noalias() = dout * vb.transpose();
            for (std::size_t i = 0; i < len; ++i) {
              const double* q = qi->value.data() + (b * len + i) * da;
              for (std::size_t j = 0; j < len; ++j) {
                if (!mask(i, j)) continue;
                const double g = de(i, j);
                if (g == 0.0) continue;
                const double* k = ki->value.data() + (b * len + j) * da;
                for (std::size_t c = 0; c < da; ++c) {
                  const double s = sig(q[c] + k[c]);
                  if (gw) wi->grad[c] += g * s;
                  const double dpre = g * wi->value[c] * s * (1.0 - s);
                  if (gq) qi->grad[(b * len + i) * da + c] += dpre;
                  if (gk) ki->grad[(b * len + j) * da + c] += dpre;
                }
              }
            }
          }
        });
  }
  return out;
}

}  // namespace seqbench::tensor
