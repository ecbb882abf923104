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
#include <algorithm>
#include <numeric>
#include <span>

#include "seqbench/common/errors.hpp"
#include "seqbench/data/batches.hpp"
#include "seqbench/data/sampling.hpp"

namespace seqbench::data {
namespace {

struct Example {
  std::size_t user_index;
  std::size_t prefix;  // kSeq2Item, kLastStep: number of history items before the target
};

}  // namespace

const char* batch_mode_name(BatchMode mode) {
  switch (mode) {
    case BatchMode::kSeq2Seq: return "seq2seq";
    case BatchMode::kSeq2Item: return "seq2item";
    case BatchMode::kPrefixPacked: return "packed";
    case BatchMode::kLastStep: return "last";
    case BatchMode::kCloze: return "cloze";
  }
  return "?";
}

std::size_t Batch::num_slots() const {
  return static_cast<std::size_t>(std::count_if(targets.begin(), targets.end(), [](ItemId t) { return t != kPad; }));
}

namespace {

std::vector<Example> enumerate(const TrainView& view, const BatchOptions& o) {
  std::vector<Example> out;
  for (std::size_t u = 0; u < view.sequences.size(); ++u) {
    const std::size_t n = view.sequences[u].size();
    if (o.mode == BatchMode::kSeq2Item) {
      for (std::size_t i = 1; i < n; ++i) out.push_back({u, i});
    } else if (o.mode == BatchMode::kLastStep) {
      if (n >= 2) out.push_back({u, n - 1});
    } else if (o.mode == BatchMode::kCloze ? n >= 1 : n >= 2) {
      out.push_back({u, n});
    }
  }
  return out;
}

}  // namespace

std::size_t count_examples(const TrainView& view, const BatchOptions& options) {
  return enumerate(view, options).size();
}

std::vector<Batch> make_batches(const TrainView& view, const BatchOptions& o, BatchRngs rngs) {
  if (o.length == 0 || o.batch_size == 0) throw ContractViolation("make_batches: length and batch_size must be positive");
  if (o.mode == BatchMode::kCloze) {
    if (o.mask_token != static_cast<ItemId>(view.num_items + 1))
      throw ContractViolation("make_batches: cloze mask token must be m + 1");
    if (!(o.mask_prob > 0.0 && o.mask_prob < 1.0)) throw ContractViolation("make_batches: mask_prob must be in (0, 1)");
  }
  std::vector<Example> examples = enumerate(view, o);
  if (o.shuffle) rngs.shuffle.shuffle(examples.begin(), examples.end());
  const NegativeSampler sampler = train_sampler(view);
  const std::size_t L = o.length;

  std::vector<Batch> batches;
  for (std::size_t start = 0; start < examples.size(); start += o.batch_size) {
    const std::size_t rows = std::min(o.batch_size, examples.size() - start);
    Batch b;
    b.mode = o.mode;
    b.size = rows;
    b.length = L;
    b.m_neg = o.m_neg;
    b.users.resize(rows);
    b.inputs.assign(rows * L, kPad);
    b.targets.assign(rows * L, kPad);
    b.negatives.assign(rows * L * o.m_neg, kPad);
    b.pad.assign(rows * L, 1);
    for (std::size_t r = 0; r < rows; ++r) {
      const Example& ex = examples[start + r];
      const auto& seq = view.sequences[ex.user_index];
      b.users[r] = view.users[ex.user_index];
      ItemId* in = &b.inputs[r * L];
      ItemId* tg = &b.targets[r * L];
      if (o.mode == BatchMode::kSeq2Item || o.mode == BatchMode::kLastStep) {
        const std::vector<ItemId> prefix(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(ex.prefix));
        const std::vector<ItemId> window = pad_window(prefix, L);
        std::copy(window.begin(), window.end(), in);
        tg[L - 1] = seq[ex.prefix];
      } else {
        const std::vector<ItemId> window = pad_window(seq, L);
        std::copy(window.begin(), window.end(), in);
        if (o.mode == BatchMode::kCloze) {
          bool any = false;
          for (std::size_t t = 0; t < L; ++t) {
            if (window[t] == kPad) continue;
            if (rngs.cloze.uniform() < o.mask_prob) {
              tg[t] = window[t];
              in[t] = o.mask_token;
              any = true;
            }
          }
          if (!any) {
            tg[L - 1] = window[L - 1];
            in[L - 1] = o.mask_token;
          }
        } else {
          for (std::size_t t = 0; t + 1 < L; ++t)
            if (window[t] != kPad) tg[t] = window[t + 1];
        }
      }
      for (std::size_t t = 0; t < L; ++t) b.pad[r * L + t] = in[t] == kPad ? 1 : 0;
      for (std::size_t t = 0; t < L; ++t) {
        if (tg[t] == kPad) continue;
        sampler.sample_into(ex.user_index, std::span<ItemId>(&b.negatives[(r * L + t) * o.m_neg], o.m_neg),
                            rngs.negatives);
      }
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

}  // namespace seqbench::data
