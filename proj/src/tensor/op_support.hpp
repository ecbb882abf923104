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

// Shared helpers for op implementations. Internal to the tensor library.

#include <Eigen/Dense>

#include <initializer_list>
#include <memory>
#include <string>

#include "seqbench/common/errors.hpp"
#include "seqbench/tensor/tape.hpp"
#include "seqbench/tensor/tensor.hpp"

namespace seqbench::tensor::detail {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using StridedMap = Eigen::Map<RowMat, 0, Eigen::OuterStride<>>;
using ConstStridedMap = Eigen::Map<const RowMat, 0, Eigen::OuterStride<>>;
using ImplPtr = std::shared_ptr<TensorImpl>;

// The active tape when at least one input is tracked on it, else nullptr.
inline GradientTape* recording_tape(std::initializer_list<const Tensor*> inputs) {
  GradientTape* tape = active_tape();
  if (!tape) return nullptr;
  for (const Tensor* t : inputs) {
    if (t->defined() && tape->tracks(*t)) return tape;
  }
  return nullptr;
}

inline ConstMatMap as_matrix(const TensorImpl& t, std::size_t rows, std::size_t cols) {
  return ConstMatMap(t.value.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

inline MatMap grad_matrix(TensorImpl& t, std::size_t rows, std::size_t cols) {
  t.ensure_grad();
  return MatMap(t.grad.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

inline void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
  }
}

inline void require_defined(const char* op, const Tensor& t) {
  if (!t.defined()) throw ContractViolation(std::string(op) + ": undefined tensor");
}

}  // namespace seqbench::tensor::detail
