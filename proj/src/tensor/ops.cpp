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
#include "seqbench/tensor/ops.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "op_support.hpp"

namespace seqbench::tensor {

using detail::as_matrix;
using detail::ConstMatMap;
using detail::grad_matrix;
using detail::ImplPtr;
using detail::MatMap;
using detail::recording_tape;
using detail::require_defined;
using detail::require_same_shape;

namespace {

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Elementwise unary op with derivative expressed through (input, output).
template <class Forward, class Derivative>
Tensor unary(const char* name, const Tensor& x, Forward f, Derivative df) {
  require_defined(name, x);
  std::vector<double> out(x.numel());
  const auto xv = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(xv[i]);
  Tensor y(x.shape(), std::move(out));
  if (GradientTape* tape = recording_tape({&x})) {
    ImplPtr xi = x.impl(), yi = y.impl();
    tape->record(name, {xi}, y, [xi, yi, df] {
      xi->ensure_grad();
      for (std::size_t i = 0; i < yi->grad.size(); ++i) {
        xi->grad[i] += yi->grad[i] * df(xi->value[i], yi->value[i]);
      }
    });
  }
  return y;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  Tensor y(a.shape(), std::move(out));
  if (GradientTape* tape = recording_tape({&a, &b})) {
    ImplPtr ai = a.impl(), bi = b.impl(), yi = y.impl();
    tape->record("add", {ai, bi}, y, [tape, ai, bi, yi] {
      for (const ImplPtr& in : {ai, bi}) {
        if (!tape->tracks(*in)) continue;
        in->ensure_grad();
        for (std::size_t i = 0; i < yi->grad.size(); ++i) in->grad[i] += yi->grad[i];
      }
    });
  }
  return y;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  Tensor y(a.shape(), std::move(out));
  if (GradientTape* tape = recording_tape({&a, &b})) {
    ImplPtr ai = a.impl(), bi = b.impl(), yi = y.impl();
    tape->record("sub", {ai, bi}, y, [tape, ai, bi, yi] {
      if (tape->tracks(*ai)) {
        ai->ensure_grad();
        for (std::size_t i = 0; i < yi->grad.size(); ++i) ai->grad[i] += yi->grad[i];
      }
      if (tape->tracks(*bi)) {
        bi->ensure_grad();
        for (std::size_t i = 0; i < yi->grad.size(); ++i) bi->grad[i] -= yi->grad[i];
      }
    });
  }
  return y;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  Tensor y(a.shape(), std::move(out));
  if (GradientTape* tape = recording_tape({&a, &b})) {
    ImplPtr ai = a.impl(), bi = b.impl(), yi = y.impl();
    tape->record("mul", {ai, bi}, y, [tape, ai, bi, yi] {
      const bool ga = tape->tracks(*ai), gb = tape->tracks(*bi);
      if (ga) ai->ensure_grad();
      if (gb) bi->ensure_grad();
      for (std::size_t i = 0; i < yi->grad.size(); ++i) {
        if (ga) ai->grad[i] += yi->grad[i] * bi->value[i];
        if (gb) bi->grad[i] += yi->grad[i] * ai->value[i];
      }
    });
  }
  return y;
}

Tensor scale(const Tensor& x, double factor) {
  return unary("scale", x, [factor](double v) { return v * factor; },
               [factor](double, double) { return factor; });
}

Tensor add_row(const Tensor& x, const Tensor& row) {
  require_defined("add_row", x);
  require_defined("add_row", row);
  if (row.ndim() != 1 || row.numel() != x.cols()) {
    throw DimensionError("add_row: cannot broadcast " + shape_str(row.shape()) + " over " +
                         shape_str(x.shape()));
  }
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> out(x.numel());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) out[r * d + c] = x[r * d + c] + row[c];
  Tensor y(x.shape(), std::move(out));
  if (GradientTape* tape = recording_tape({&x, &row})) {
    ImplPtr xi = x.impl(), ri = row.impl(), yi = y.impl();
    tape->record("add_row", {xi, ri}, y, [tape, xi, ri, yi, n, d] {
      if (tape->tracks(*xi)) {
        xi->ensure_grad();
        for (std::size_t i = 0; i < yi->grad.size(); ++i) xi->grad[i] += yi->grad[i];
      }
      if (tape->tracks(*ri)) {
        ri->ensure_grad();
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t c = 0; c < d; ++c) ri->grad[c] += yi->grad[r * d + c];
      }
    });
  }
  return y;
}

Tensor sigmoid(const Tensor& x) {
  return unary("sigmoid", x, stable_sigmoid, [](double, double s) { return s * (1.0 - s); });
}

Tensor tanh(const Tensor& x) {
  return unary("tanh", x, [](double v) { return std::tanh(v); },
               [](double, double t) { return 1.0 - t * t; });
}

Tensor relu(const Tensor& x) {
  return unary("relu", x, [](double v) { return v > 0 ? v : 0.0; },
               [](double v, double) { return v > 0 ? 1.0 : 0.0; });
}

Tensor gelu(const Tensor& x) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  return unary(
      "gelu", x, [](double v) { return 0.5 * v * (1.0 + std::erf(v * kInvSqrt2)); },
      [inv_sqrt_2pi](double v, double) {
        const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
        return cdf + v * inv_sqrt_2pi * std::exp(-0.5 * v * v);
      });
}

Tensor sum(const Tensor& x) {
  require_defined("sum", x);
  double total = 0.0;
  for (double v : x.values()) total += v;
  Tensor y = Tensor::scalar(total);
  if (GradientTape* tape = recording_tape({&x})) {
    ImplPtr xi = x.impl(), yi = y.impl();
    tape->record("sum", {xi}, y, [xi, yi] {
      xi->ensure_grad();
      for (double& g : xi->grad) g += yi->grad[0];
    });
  }
  return y;
}

Tensor mean(const Tensor& x) {
  if (x.numel() == 0) throw ContractViolation("mean of an empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.numel()));
}

Tensor reshape(const Tensor& x, Shape shape) {
  require_defined("reshape", x);
  if (shape_numel(shape) != x.numel()) {
    throw DimensionError("reshape: " + shape_str(x.shape()) + " to " + shape_str(shape));
  }
  Tensor y(std::move(shape), std::vector<double>(x.values().begin(), x.values().end()));
  if (GradientTape* tape = recording_tape({&x})) {
    ImplPtr xi = x.impl(), yi = y.impl();
    tape->record("reshape", {xi}, y, [xi, yi] {
      xi->ensure_grad();
      for (std::size_t i = 0; i < yi->grad.size(); ++i) xi->grad[i] += yi->grad[i];
    });
  }
  return y;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_defined("matmul", a);
  require_defined("matmul", b);
  if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: incompatible shapes " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor y = Tensor::zeros({m, n});
  MatMap(y.mutable_values().data(), m, n).noalias() = as_matrix(*a.impl(), m, k) * as_matrix(*b.impl(), k, n);
  if (GradientTape* tape = recording_tape({&a, &b})) {
    ImplPtr ai = a.impl(), bi = b.impl(), yi = y.impl();
    tape->record("matmul", {ai, bi}, y, [tape, ai, bi, yi, m, k, n] {
      ConstMatMap dout(yi->grad.data(), m, n);
      if (tape->tracks(*ai)) grad_matrix(*ai, m, k).noalias() += dout * as_matrix(*bi, k, n).transpose();
      if (tape->tracks(*bi)) grad_matrix(*bi, k, n).noalias() += as_matrix(*ai, m, k).transpose() * dout;
    });
  }
  return y;
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_defined("linear", x);
  require_defined("linear", weight);
  if (weight.ndim() != 2 || x.ndim() == 0 || x.ndim() > 2 || x.cols() != weight.dim(1)) {
    throw DimensionError("linear: input " + shape_str(x.shape()) + " vs weight " +
                         shape_str(weight.shape()));
  }
  const std::size_t n = x.rows(), in = weight.dim(1), out = weight.dim(0);
  if (bias.defined() && (bias.ndim() != 1 || bias.numel() != out)) {
    throw DimensionError("linear: bias " + shape_str(bias.shape()) + " vs weight " +
                         shape_str(weight.shape()));
  }
  Shape out_shape = x.ndim() == 1 ? Shape{out} : Shape{n, out};
  Tensor y = Tensor::zeros(std::move(out_shape));
  MatMap ym(y.mutable_values().data(), n, out);
  ym.noalias() = as_matrix(*x.impl(), n, in) * as_matrix(*weight.impl(), out, in).transpose();
  if (bias.defined()) {
    ym.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias.values().data(), out);
  }
  if (GradientTape* tape = recording_tape({&x, &weight, &bias})) {
    ImplPtr xi = x.impl(), wi = weight.impl(), yi = y.impl();
    ImplPtr bi = bias.defined() ? bias.impl() : nullptr;
    std::vector<ImplPtr> inputs{xi, wi};
    if (bi) inputs.push_back(bi);
    tape->record("linear", std::move(inputs), y, [tape, xi, wi, bi, yi, n, in, out] {
      ConstMatMap dy(yi->grad.data(), n, out);
      if (tape->tracks(*xi)) grad_matrix(*xi, n, in).noalias() += dy * as_matrix(*wi, out, in);
      if (tape->tracks(*wi)) grad_matrix(*wi, out, in).noalias() += dy.transpose() * as_matrix(*xi, n, in);
      if (bi && tape->tracks(*bi)) {
        bi->ensure_grad();
        Eigen::Map<Eigen::RowVectorXd>(bi->grad.data(), out) += dy.colwise().sum();
      }
    });
  }
  return y;
}

Tensor embedding_lookup(const Tensor& table, std::span<const std::int32_t> ids, std::int32_t pad_id) {
  require_defined("embedding_lookup", table);
  if (table.ndim() != 2) {
    throw DimensionError("embedding_lookup: table must be 2-D, got " + shape_str(table.shape()));
  }
  const std::size_t rows = table.dim(0), d = table.dim(1);
  for (std::int32_t id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= rows) {
      throw VocabularyError("embedding_lookup: id " + std::to_string(id) + " outside [0, " +
                            std::to_string(rows) + ")");
    }
  }
  std::vector<double> out(ids.size() * d);
  const auto tv = table.values();
  for (std::size_t r = 0; r < ids.size(); ++r) {
    std::copy_n(tv.begin() + static_cast<std::ptrdiff_t>(ids[r] * d), d, out.begin() + static_cast<std::ptrdiff_t>(r * d));
  }
  Tensor y({ids.size(), d}, std::move(out));
  if (GradientTape* tape = recording_tape({&table})) {
    ImplPtr ti = table.impl(), yi = y.impl();
    std::vector<std::int32_t> idv(ids.begin(), ids.end());
    tape->record("embedding_lookup", {ti}, y, [ti, yi, idv = std::move(idv), d, pad_id] {
      ti->ensure_grad();
      for (std::size_t r = 0; r < idv.size(); ++r) {
        if (idv[r] == pad_id) continue;
        double* g = ti->grad.data() + static_cast<std::size_t>(idv[r]) * d;
        const double* dy = yi->grad.data() + r * d;
        for (std::size_t c = 0; c < d; ++c) g[c] += dy[c];
      }
    });
  }
  return y;
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows) {
  require_defined("gather_rows", x);
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> out(rows.size() * d);
  const auto xv = x.values();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= n) {
      throw DimensionError("gather_rows: row " + std::to_string(rows[r]) + " of " + shape_str(x.shape()));
    }
    std::copy_n(xv.begin() + static_cast<std::ptrdiff_t>(rows[r] * d), d, out.begin() + static_cast<std::ptrdiff_t>(r * d));
  }
  Tensor y({rows.size(), d}, std::move(out));
  if (GradientTape* tape = recording_tape({&x})) {
    ImplPtr xi = x.impl(), yi = y.impl();
    std::vector<std::size_t> idx(rows.begin(), rows.end());
    tape->record("gather_rows", {xi}, y, [xi, yi, idx = std::move(idx), d] {
      xi->ensure_grad();
      for (std::size_t r = 0; r < idx.size(); ++r) {
        double* g = xi->grad.data() + idx[r] * d;
        const double* dy = yi->grad.data() + r * d;
        for (std::size_t c = 0; c < d; ++c) g[c] += dy[c];
      }
    });
  }
  return y;
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ContractViolation("concat_rows: no inputs");
  const std::size_t d = parts.front().cols();
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    require_defined("concat_rows", p);
    if (p.cols() != d) {
      throw DimensionError("concat_rows: " + shape_str(p.shape()) + " vs " + shape_str(parts.front().shape()));
    }
    total += p.rows();
  }
  std::vector<double> out;
  out.reserve(total * d);
  for (const Tensor& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  Tensor y({total, d}, std::move(out));
  GradientTape* tape = active_tape();
  bool tracked = false;
  if (tape) {
    for (const Tensor& p : parts) tracked = tracked || tape->tracks(p);
  }
  if (tracked) {
    std::vector<ImplPtr> inputs;
    for (const Tensor& p : parts) inputs.push_back(p.impl());
    ImplPtr yi = y.impl();
    tape->record("concat_rows", inputs, y, [tape, inputs, yi] {
      std::size_t offset = 0;
      for (const ImplPtr& in : inputs) {
        if (tape->tracks(*in)) {
          in->ensure_grad();
          for (std::size_t i = 0; i < in->value.size(); ++i) in->grad[i] += yi->grad[offset + i];
        }
        offset += in->value.size();
      }
    });
  }
  return y;
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  require_defined("concat_cols", a);
  require_defined("concat_cols", b);
  if (a.rows() != b.rows()) {
    throw DimensionError("concat_cols: " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
  const std::size_t n = a.rows(), da = a.cols(), db = b.cols(), d = da + db;
  std::vector<double> out(n * d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < da; ++c) out[r * d + c] = a[r * da + c];
    for (std::size_t c = 0; c < db; ++c) out[r * d + da + c] = b[r * db + c];
  }
  Tensor y({n, d}, std::move(out));
  if (GradientTape* tape = recording_tape({&a, &b})) {
    ImplPtr ai = a.impl(), bi = b.impl(), yi = y.impl();
    tape->record("concat_cols", {ai, bi}, y, [tape, ai, bi, yi, n, da, db, d] {
      if (tape->tracks(*ai)) {
        ai->ensure_grad();
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t c = 0; c < da; ++c) ai->grad[r * da + c] += yi->grad[r * d + c];
      }
      if (tape->tracks(*bi)) {
        bi->ensure_grad();
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t c = 0; c < db; ++c) bi->grad[r * db + c] += yi->grad[r * d + da + c];
      }
    });
  }
  return y;
}

Tensor blend_rows(std::span<const std::uint8_t> keep, const Tensor& updated, const Tensor& previous) {
  require_same_shape("blend_rows", updated, previous);
  const std::size_t n = updated.rows(), d = updated.cols();
  if (keep.size() != n) {
    throw DimensionError("blend_rows: " + std::to_string(keep.size()) + " flags for " +
                         shape_str(updated.shape()));
  }
  std::vector<double> out(updated.numel());
  for (std::size_t r = 0; r < n; ++r) {
    const Tensor& src = keep[r] ? updated : previous;
    for (std::size_t c = 0; c < d; ++c) out[r * d + c] = src[r * d + c];
  }
  Tensor y(updated.shape(), std::move(out));
  if (GradientTape* tape = recording_tape({&updated, &previous})) {
    ImplPtr ui = updated.impl(), pi = previous.impl(), yi = y.impl();
    std::vector<std::uint8_t> flags(keep.begin(), keep.end());
    tape->record("blend_rows", {ui, pi}, y, [tape, ui, pi, yi, flags = std::move(flags), n, d] {
      const bool gu = tape->tracks(*ui), gp = tape->tracks(*pi);
      if (gu) ui->ensure_grad();
      if (gp) pi->ensure_grad();
      for (std::size_t r = 0; r < n; ++r) {
        ImplPtr target = flags[r] ? ui : pi;
        if (flags[r] ? !gu : !gp) continue;
        for (std::size_t c = 0; c < d; ++c) target->grad[r * d + c] += yi->grad[r * d + c];
      }
    });
  }
  return y;
}

Tensor rowwise_dot(const Tensor& a, const Tensor& b) {
  require_same_shape("rowwise_dot", a, b);
  const std::size_t n = a.rows(), d = a.cols();
  std::vector<double> out(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < d; ++c) acc += a[r * d + c] * b[r * d + c];
    out[r] = acc;
  }
  Tensor y({n}, std::move(out));
  if (GradientTape* tape = recording_tape({&a, &b})) {
    ImplPtr ai = a.impl(), bi = b.impl(), yi = y.impl();
    tape->record("rowwise_dot", {ai, bi}, y, [tape, ai, bi, yi, n, d] {
      const bool ga = tape->tracks(*ai), gb = tape->tracks(*bi);
      if (ga) ai->ensure_grad();
      if (gb) bi->ensure_grad();
      for (std::size_t r = 0; r < n; ++r) {
        const double g = yi->grad[r];
        for (std::size_t c = 0; c < d; ++c) {
          if (ga) ai->grad[r * d + c] += g * bi->value[r * d + c];
          if (gb) bi->grad[r * d + c] += g * ai->value[r * d + c];
        }
      }
    });
  }
  return y;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  require_defined("layer_norm", x);
  if (!(eps > 0)) throw ContractViolation("layer_norm: eps must be positive");
  const std::size_t n = x.rows(), d = x.cols();
  if (gain.numel() != d || bias.numel() != d) {
    throw DimensionError("layer_norm: gain " + shape_str(gain.shape()) + " / bias " +
                         shape_str(bias.shape()) + " vs input " + shape_str(x.shape()));
  }
  std::vector<double> out(x.numel()), xhat(x.numel()), inv_std(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = x.values().data() + r * d;
    double mu = 0.0;
    for (std::size_t c = 0; c < d; ++c) mu += row[c];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t c = 0; c < d; ++c) var += (row[c] - mu) * (row[c] - mu);
    var /= static_cast<double>(d);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < d; ++c) {
      xhat[r * d + c] = (row[c] - mu) * inv_std[r];
      out[r * d + c] = xhat[r * d + c] * gain[c] + bias[c];
    }
  }
  Tensor y(x.shape(), std::move(out));
  if (GradientTape* tape = recording_tape({&x, &gain, &bias})) {
    ImplPtr xi = x.impl(), gi = gain.impl(), bi = bias.impl(), yi = y.impl();
    tape->record("layer_norm", {xi, gi, bi}, y,
                 [tape, xi, gi, bi, yi, xhat = std::move(xhat), inv_std = std::move(inv_std), n, d] {
                   const bool gx = tape->tracks(*xi), gg = tape->tracks(*gi), gb = tape->tracks(*bi);
                   if (gx) xi->ensure_grad();
                   if (gg) gi->ensure_grad();
                   if (gb) bi->ensure_grad();
                   std::vector<double> dxhat(d);
                   for (std::size_t r = 0; r < n; ++r) {
                     const double* dy = yi->grad.data() + r * d;
                     const double* xh = xhat.data() + r * d;
                     double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
                     for (std::size_t c = 0; c < d; ++c) {
                       if (gg) gi->grad[c] += dy[c] * xh[c];
                       if (gb) bi->grad[c] += dy[c];
                       dxhat[c] = dy[c] * gi->value[c];
                       sum_dxhat += dxhat[c];
                       sum_dxhat_xhat += dxhat[c] * xh[c];
                     }
                     if (!gx) continue;
                     const double k = inv_std[r] / static_cast<double>(d);
                     for (std::size_t c = 0; c < d; ++c) {
                       xi->grad[r * d + c] +=
                           k * (static_cast<double>(d) * dxhat[c] - sum_dxhat - xh[c] * sum_dxhat_xhat);
                     }
                   }
                 });
  }
  return y;
}

Tensor dropout(const Tensor& x, double p, RngStream& rng) {
  if (p < 0.0 || p >= 1.0) throw ContractViolation("dropout: p must lie in [0, 1)");
  if (p == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - p);
  std::vector<double> mask(x.numel());
  for (double& m : mask) m = rng.uniform() >= p ? keep_scale : 0.0;
  return mul(x, Tensor(x.shape(), std::move(mask)));
}

Tensor bce_with_logits(const Tensor& logits, std::span<const double> labels, std::span<const double> weights) {
  require_defined("bce_with_logits", logits);
  const std::size_t n = logits.numel();
  if (n == 0) throw ContractViolation("bce_with_logits: empty input");
  if (labels.size() != n || (!weights.empty() && weights.size() != n)) {
    throw DimensionError("bce_with_logits: " + std::to_string(n) + " logits, " +
                         std::to_string(labels.size()) + " labels, " + std::to_string(weights.size()) +
                         " weights");
  }
  double total_weight = 0.0, loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) throw ContractViolation("bce_with_logits: labels must be 0 or 1");
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w == 0.0) continue;
    const double x = logits[i];
    loss += w * (std::max(x, 0.0) - x * labels[i] + std::log1p(std::exp(-std::abs(x))));
    total_weight += w;
  }
  Tensor y = Tensor::scalar(total_weight > 0 ? loss / total_weight : 0.0);
  if (GradientTape* tape = recording_tape({&logits})) {
    ImplPtr li = logits.impl(), yi = y.impl();
    std::vector<double> lab(labels.begin(), labels.end());
    std::vector<double> w(weights.begin(), weights.end());
    tape->record("bce_with_logits", {li}, y, [li, yi, lab = std::move(lab), w = std::move(w), total_weight] {
      li->ensure_grad();
      if (total_weight <= 0) return;
      const double g = yi->grad[0] / total_weight;
      for (std::size_t i = 0; i < lab.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        if (wi == 0.0) continue;
        li->grad[i] += g * wi * (stable_sigmoid(li->value[i]) - lab[i]);
      }
    });
  }
  return y;
}

Tensor gru_gates(const Tensor& gi, const Tensor& gh, const Tensor& h) {
  require_same_shape("gru_gates", gi, gh);
  const std::size_t n = h.rows(), hd = h.cols();
  if (gi.rows() != n || gi.cols() != 3 * hd) {
    throw DimensionError("gru_gates: gate pre-activations " + shape_str(gi.shape()) + " vs state " +
                         shape_str(h.shape()));
  }
  std::vector<double> r(n * hd), z(n * hd), nn(n * hd), out(n * hd);
  for (std::size_t row = 0; row < n; ++row) {
    const double* a = gi.values().data() + row * 3 * hd;
    const double* b = gh.values().data() + row * 3 * hd;
    for (std::size_t c = 0; c < hd; ++c) {
      const std::size_t i = row * hd + c;
      r[i] = stable_sigmoid(a[c] + b[c]);
      z[i] = stable_sigmoid(a[hd + c] + b[hd + c]);
      nn[i] = std::tanh(a[2 * hd + c] + r[i] * b[2 * hd + c]);
      out[i] = (1.0 - z[i]) * nn[i] + z[i] * h[i];
    }
  }
  Tensor y(h.shape(), std::move(out));
  if (GradientTape* tape = recording_tape({&gi, &gh, &h})) {
    ImplPtr ai = gi.impl(), bi = gh.impl(), hi = h.impl(), yi = y.impl();
    tape->record("gru_gates", {ai, bi, hi}, y,
                 [tape, ai, bi, hi, yi, r = std::move(r), z = std::move(z), nn = std::move(nn), n, hd] {
                   const bool ga = tape->tracks(*ai), gb = tape->tracks(*bi), gh_ = tape->tracks(*hi);
                   if (ga) ai->ensure_grad();
                   if (gb) bi->ensure_grad();
                   if (gh_) hi->ensure_grad();
                   for (std::size_t row = 0; row < n; ++row) {
                     const double* b = bi->value.data() + row * 3 * hd;
                     for (std::size_t c = 0; c < hd; ++c) {
                       const std::size_t i = row * hd + c;
                       const double dy = yi->grad[i];
                       const double dn = dy * (1.0 - z[i]);
                       const double dz = dy * (hi->value[i] - nn[i]);
                       if (gh_) hi->grad[i] += dy * z[i];
                       const double dn_pre = dn * (1.0 - nn[i] * nn[i]);
                       const double dr = dn_pre * b[2 * hd + c];
                       const double dz_pre = dz * z[i] * (1.0 - z[i]);
                       const double dr_pre = dr * r[i] * (1.0 - r[i]);
                       const std::size_t g = row * 3 * hd;
                       if (ga) {
                         ai->grad[g + c] += dr_pre;
                         ai->grad[g + hd + c] += dz_pre;
                         ai->grad[g + 2 * hd + c] += dn_pre;
                       }
                       if (gb) {
                         bi->grad[g + c] += dr_pre;
                         bi->grad[g + hd + c] += dz_pre;
                         bi->grad[g + 2 * hd + c] += dn_pre * r[i];
                       }
                     }
                   }
                 });
  }
  return y;
}

Tensor gru_cell(const Tensor& x, const Tensor& h, const GruWeights& weights) {
  const std::size_t hd = h.cols();
  if (weights.weight_ih.ndim() != 2 || weights.weight_ih.dim(0) != 3 * hd ||
      weights.weight_hh.ndim() != 2 || weights.weight_hh.dim(0) != 3 * hd || weights.weight_hh.dim(1) != hd) {
    throw DimensionError("gru_cell: weights " + shape_str(weights.weight_ih.shape()) + ", " +
                         shape_str(weights.weight_hh.shape()) + " for hidden size " + std::to_string(hd));
  }
  if (x.rows() != h.rows()) {
    throw DimensionError("gru_cell: input " + shape_str(x.shape()) + " vs state " + shape_str(h.shape()));
  }
  const Tensor gi = linear(x, weights.weight_ih, weights.bias_ih);
  const Tensor gh = linear(h, weights.weight_hh, weights.bias_hh);
  return gru_gates(gi, gh, h);
}

AttentionMask AttentionMask::causal(std::size_t length) {
  AttentionMask mask(length);
  for (std::size_t i = 0; i < length; ++i)
    for (std::size_t j = 0; j <= i; ++j) mask.set(i, j, true);
  return mask;
}

}  // namespace seqbench::tensor
