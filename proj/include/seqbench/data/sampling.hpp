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
#ifndef SEQBENCH_DATA_SAMPLING_HPP_
#define SEQBENCH_DATA_SAMPLING_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "seqbench/common/rng.hpp"
#include "seqbench/data/dataset.hpp"

namespace seqbench::data {

// Uniform negatives from 1..m minus a per-user consumed set.
class NegativeSampler {
 public:
  // consumed[u] lists the items of user index u, in any order, duplicates allowed.
  NegativeSampler(std::size_t num_items, const std::vector<std::vector<ItemId>>& consumed,
                  std::vector<std::int32_t> user_ids = {});

  // count distinct items outside the user's set, uniformly without
  // replacement. ConfigError naming the user and pool size if the pool is
  // too small.
  std::vector<ItemId> sample(std::size_t user_index, std::size_t count, RngStream& rng) const;
  void sample_into(std::size_t user_index, std::span<ItemId> out, RngStream& rng) const;

  // Every item the user has not consumed, ascending.
  std::vector<ItemId> pool(std::size_t user_index) const;
  std::size_t pool_size(std::size_t user_index) const;
  bool consumed(std::size_t user_index, ItemId item) const;
  std::size_t num_items() const { return num_items_; }

 private:
  std::size_t num_items_;
  std::vector<std::vector<ItemId>> consumed_;  // sorted, unique
  std::vector<std::int32_t> user_ids_;
};

// Sampler over the training prefixes only; never sees validation or test items.
NegativeSampler train_sampler(const TrainView& view);
// Sampler over each user's complete sequence, for evaluation.
NegativeSampler eval_sampler(const SplitDataset& split);

}  // namespace seqbench::data

#endif  // SEQBENCH_DATA_SAMPLING_HPP_
