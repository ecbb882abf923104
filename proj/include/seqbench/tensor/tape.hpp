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
#include <functional>
#include <memory>
#include <vector>

#include "seqbench/tensor/tensor.hpp"

namespace seqbench::tensor {

// Records differentiable ops in execution order. Entries are appended as ops
// run, so the list is already topologically sorted; backward() walks it in
// reverse. One tape per thread of training; never shared.
class GradientTape {
 public:
  using BackwardFn = std::function<void()>;

  GradientTape() = default;
  GradientTape(const GradientTape&) = delete;
  GradientTape& operator=(const GradientTape&) = delete;
  ~GradientTape() { clear(); }

  // True when gradients should flow into `t`: it is a parameter or was
  // produced by an op recorded on this tape.
  bool tracks(const Tensor& t) const { return tracks(*t.impl()); }
  bool tracks(const TensorImpl& t) const {
    return t.requires_grad || (t.tape == this && t.node_id >= 0);
  }

  void record(const char* op, std::vector<std::shared_ptr<TensorImpl>> inputs, const Tensor& output,
              BackwardFn backward);

  // Seeds d(loss)/d(loss) = 1 and accumulates into every tracked tensor.
  void backward(const Tensor& loss);

  void clear();
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    const char* op;
    std::vector<std::shared_ptr<TensorImpl>> inputs;
    std::shared_ptr<TensorImpl> output;
    BackwardFn backward;
  };
  std::vector<Entry> entries_;
};

// The tape ops record onto, or nullptr (inference: nothing is recorded).
GradientTape* active_tape();

class TapeScope {
 public:
  explicit TapeScope(GradientTape& tape);
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;
  ~TapeScope();

 private:
  GradientTape* previous_;
};

// Temporarily disables recording, e.g. during evaluation inside training.
class NoGradScope {
 public:
  NoGradScope();
  NoGradScope(const NoGradScope&) = delete;
  NoGradScope& operator=(const NoGradScope&) = delete;
  ~NoGradScope();

 private:
  GradientTape* previous_;
};

}  // namespace seqbench::tensor
