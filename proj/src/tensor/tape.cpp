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
#include "seqbench/tensor/tape.hpp"

#include "seqbench/common/errors.hpp"

namespace seqbench::tensor {
namespace {
thread_local GradientTape* g_active_tape = nullptr;
}  // namespace

GradientTape* active_tape() { return g_active_tape; }

TapeScope::TapeScope(GradientTape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }
TapeScope::~TapeScope() { g_active_tape = previous_; }

NoGradScope::NoGradScope() : previous_(g_active_tape) { g_active_tape = nullptr; }
NoGradScope::~NoGradScope() { g_active_tape = previous_; }

void GradientTape::record(const char* op, std::vector<std::shared_ptr<TensorImpl>> inputs,
                          const Tensor& output, BackwardFn backward) {
  output.impl()->tape = this;
  output.impl()->node_id = static_cast<std::int64_t>(entries_.size());
  entries_.push_back({op, std::move(inputs), output.impl(), std::move(backward)});
}

void GradientTape::backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ContractViolation("backward() needs a scalar loss, got shape " +
                            (loss.defined() ? shape_str(loss.shape()) : std::string("<undefined>")));
  }
  if (!tracks(loss)) throw ContractViolation("backward(): loss is not tracked by this tape");

  loss.impl()->ensure_grad();
  loss.impl()->grad[0] += 1.0;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->output->grad.empty()) continue;  // no path to the loss
    it->backward();
  }
  for (auto& entry : entries_) {
    entry.output->ensure_grad();
    for (auto& in : entry.inputs) {
      if (tracks(*in)) in->ensure_grad();
    }
  }
}

void GradientTape::clear() {
  for (auto& entry : entries_) {
    if (entry.output->tape == this) {
      entry.output->tape = nullptr;
      entry.output->node_id = -1;
    }
  }
  entries_.clear();
}

}  // namespace seqbench::tensor
