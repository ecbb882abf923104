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

// Central finite-difference oracle for checking tape gradients. Independent
// of the backward implementations: it only evaluates forward values.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "seqbench/common/rng.hpp"
#include "seqbench/tensor/ops.hpp"
#include "seqbench/tensor/tape.hpp"

namespace seqbench::testing {

using tensor::Tensor;

struct GradCheck {
  double norm_rel_error = 0.0;  // ||analytic - numeric|| / max(||analytic||, ||numeric||)
  double max_abs_error = 0.0;
  std::size_t checked = 0;
};

using LossFn = std::function<Tensor(const std::vector<Tensor>&)>;

inline GradCheck check_gradients(std::vector<Tensor> inputs, const LossFn& loss_fn, double step = 1e-5) {
  for (Tensor& t : inputs) {
    t.set_requires_grad(true);
    t.zero_grad();
  }
  std::vector<std::vector<double>> analytic;
  {
    tensor::GradientTape tape;
    tensor::TapeScope scope(tape);
    Tensor loss = loss_fn(inputs);
    tape.backward(loss);
    for (Tensor& t : inputs) {
      analytic.emplace_back(t.grad().begin(), t.grad().end());
      if (analytic.back().empty()) analytic.back().assign(t.numel(), 0.0);
    }
  }
  tensor::NoGradScope no_grad;
  double diff_sq = 0.0, a_sq = 0.0, n_sq = 0.0;
  GradCheck result;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    auto values = inputs[t].mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + step;
      const double up = loss_fn(inputs).item();
      values[i] = original - step;
      const double down = loss_fn(inputs).item();
      values[i] = original;
      const double numeric = (up - down) / (2 * step);
      const double a = analytic[t][i];
      diff_sq += (a - numeric) * (a - numeric);
      a_sq += a * a;
      n_sq += numeric * numeric;
      result.max_abs_error = std::max(result.max_abs_error, std::abs(a - numeric));
      ++result.checked;
    }
  }
  const double denom = std::max(std::sqrt(std::max(a_sq, n_sq)), 1e-12);
  result.norm_rel_error = std::sqrt(diff_sq) / denom;
  return result;
}

inline Tensor random_tensor(tensor::Shape shape, RngStream& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(tensor::shape_numel(shape));
  for (double& x : v) x = rng.uniform(lo, hi);
  return Tensor(std::move(shape), std::move(v));
}

// sum(y * weights) with fixed random weights: a scalar that exercises every
// output element with a distinct coefficient.
inline Tensor weighted_sum(const Tensor& y, std::uint64_t seed = 99) {
  RngStream rng(seed);
  return tensor::sum(tensor::mul(y, random_tensor(y.shape(), rng)));
}

}  // namespace seqbench::testing
