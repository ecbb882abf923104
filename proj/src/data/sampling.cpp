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
#include <string>

#include "seqbench/common/errors.hpp"
#include "seqbench/data/sampling.hpp"

namespace seqbench::data {

NegativeSampler::NegativeSampler(std::size_t num_items, const std::vector<std::vector<ItemId>>& consumed,
                                 std::vector<std::int32_t> user_ids)
    : num_items_(num_items), user_ids_(std::move(user_ids)) {
  consumed_.reserve(consumed.size());
  for (const auto& items : consumed) {
    std::vector<ItemId> sorted = items;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    consumed_.push_back(std::move(sorted));
  }
  if (user_ids_.empty()) {
    for (std::size_t i = 0; i < consumed_.size(); ++i) user_ids_.push_back(static_cast<std::int32_t>(i));
  }
}

bool NegativeSampler::consumed(std::size_t user_index, ItemId item) const {
  const auto& c = consumed_.at(user_index);
  return std::binary_search(c.begin(), c.end(), item);
}

std::size_t NegativeSampler::pool_size(std::size_t user_index) const {
  const auto& c = consumed_.at(user_index);
  const auto in_range = std::count_if(c.begin(), c.end(), [this](ItemId id) {
    return id >= 1 && static_cast<std::size_t>(id) <= num_items_;
  });
  return num_items_ - static_cast<std::size_t>(in_range);
}

std::vector<ItemId> NegativeSampler::pool(std::size_t user_index) const {
  std::vector<ItemId> out;
  out.reserve(pool_size(user_index));
  for (std::size_t id = 1; id <= num_items_; ++id)
    if (!consumed(user_index, static_cast<ItemId>(id))) out.push_back(static_cast<ItemId>(id));
  return out;
}

void NegativeSampler::sample_into(std::size_t user_index, std::span<ItemId> out, RngStream& rng) const {
  const std::size_t count = out.size();
  if (count == 0) return;
  const std::size_t available = pool_size(user_index);
  if (count > available) {
    throw ConfigError("cannot sample " + std::to_string(count) + " negatives for user " +
                      std::to_string(user_ids_.at(user_index)) + ": only " + std::to_string(available) +
                      " unconsumed items");
  }
  // Rejection is cheap while the pool dominates the catalogue; otherwise
  // draw a prefix of a Fisher-Yates shuffle of the explicit pool.
  if (2 * (num_items_ - available) + 2 * count <= num_items_) {
    std::size_t filled = 0;
    while (filled < count) {
      const auto id = static_cast<ItemId>(1 + rng.below(num_items_));
      if (consumed(user_index, id)) continue;
      if (std::find(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(filled), id) !=
          out.begin() + static_cast<std::ptrdiff_t>(filled))
        continue;
      out[filled++] = id;
    }
    return;
  }
  std::vector<ItemId> candidates = pool(user_index);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
    out[i] = candidates[i];
  }
}

std::vector<ItemId> NegativeSampler::sample(std::size_t user_index, std::size_t count, RngStream& rng) const {
  std::vector<ItemId> out(count, kPad);
  sample_into(user_index, out, rng);
  return out;
}

NegativeSampler train_sampler(const TrainView& view) {
  return NegativeSampler(view.num_items, view.sequences, view.users);
}

NegativeSampler eval_sampler(const SplitDataset& split) {
  std::vector<std::vector<ItemId>> consumed;
  std::vector<std::int32_t> ids;
  for (const UserSplit& u : split.users) {
    std::vector<ItemId> all = u.test_input();
    all.push_back(u.test);
    consumed.push_back(std::move(all));
    ids.push_back(u.user);
  }
  return NegativeSampler(split.num_items, consumed, std::move(ids));
}

}  // namespace seqbench::data
