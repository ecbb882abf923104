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
#ifndef SEQBENCH_DATA_BATCHES_HPP_
#define SEQBENCH_DATA_BATCHES_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "seqbench/common/rng.hpp"
#include "seqbench/data/dataset.hpp"

namespace seqbench::data {

enum class BatchMode {
  kSeq2Seq,       // next item at every non-pad position of the user window
  kSeq2Item,      // one (prefix window -> next item) pair per training position
  kPrefixPacked,  // seq2seq layout consumed by seq2item models, one slot per prefix
  kLastStep,      // one window per user predicting only its last training item
  kCloze,         // random positions replaced by a mask token and predicted
};

const char* batch_mode_name(BatchMode mode);

// Row-major B x L layouts. A slot is a position whose target is not kPad.
struct Batch {
  BatchMode mode = BatchMode::kSeq2Seq;
  std::size_t size = 0;
  std::size_t length = 0;
  std::size_t m_neg = 0;
  std::vector<std::int32_t> users;
  std::vector<ItemId> inputs;
  std::vector<ItemId> targets;
  std::vector<ItemId> negatives;  // B x L x m_neg, kPad outside slots
  std::vector<std::uint8_t> pad;  // 1 where inputs is kPad

  ItemId input(std::size_t b, std::size_t t) const { return inputs[b * length + t]; }
  ItemId target(std::size_t b, std::size_t t) const { return targets[b * length + t]; }
  std::size_t num_slots() const;
};

struct BatchOptions {
  std::size_t length = 50;
  std::size_t batch_size = 128;
  BatchMode mode = BatchMode::kSeq2Seq;
  std::size_t m_neg = 1;
  double mask_prob = 0.2;    // kCloze only
  ItemId mask_token = kPad;  // kCloze only, must be m + 1
  bool shuffle = true;
};

struct BatchRngs {
  RngStream& shuffle;
  RngStream& negatives;
  RngStream& cloze;
};

// Builds every batch for one pass over the training view. Examples are
// shuffled with rngs.shuffle, then negatives are drawn per slot in batch
// order; the stream is a pure function of (view, options, rng states).
std::vector<Batch> make_batches(const TrainView& view, const BatchOptions& options, BatchRngs rngs);

// Examples before batching: one per prefix for kSeq2Item, else one per user.
std::size_t count_examples(const TrainView& view, const BatchOptions& options);

}  // namespace seqbench::data

#endif  // SEQBENCH_DATA_BATCHES_HPP_
