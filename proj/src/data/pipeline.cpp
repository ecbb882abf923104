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
#include <string>
#include <unordered_map>
#include <vector>

#include "seqbench/common/errors.hpp"
#include "seqbench/data/dataset.hpp"

namespace seqbench::data {
namespace {

// Dense ids for raw keys in order of first occurrence.
std::vector<std::size_t> intern(const std::vector<Interaction>& rows, std::string Interaction::*field,
                                std::size_t& count) {
  std::unordered_map<std::string_view, std::size_t> ids;
  std::vector<std::size_t> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto [it, inserted] = ids.emplace(rows[i].*field, ids.size());
    out[i] = it->second;
  }
  count = ids.size();
  return out;
}

}  // namespace

std::vector<Interaction> five_core_filter(std::vector<Interaction> interactions, std::size_t min_count) {
  std::size_t n_users = 0, n_items = 0;
  const auto user = intern(interactions, &Interaction::user, n_users);
  const auto item = intern(interactions, &Interaction::item, n_items);
  std::vector<std::uint8_t> alive(interactions.size(), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      const auto& key = pass == 0 ? item : user;
      std::vector<std::size_t> counts(pass == 0 ? n_items : n_users, 0);
      for (std::size_t i = 0; i < key.size(); ++i)
        if (alive[i]) ++counts[key[i]];
      for (std::size_t i = 0; i < key.size(); ++i) {
        if (alive[i] && counts[key[i]] < min_count) {
          alive[i] = 0;
          changed = true;
        }
      }
    }
  }
  std::vector<Interaction> out;
  out.reserve(interactions.size());
  for (std::size_t i = 0; i < interactions.size(); ++i)
    if (alive[i]) out.push_back(std::move(interactions[i]));
  return out;
}

ItemId Vocab::add(const std::string& raw) {
  auto [it, inserted] = ids_.emplace(raw, static_cast<ItemId>(keys_.size() + 1));
  if (inserted) keys_.push_back(raw);
  return it->second;
}

ItemId Vocab::id(const std::string& raw) const {
  auto it = ids_.find(raw);
  if (it == ids_.end()) throw VocabularyError("unknown item key '" + raw + "'");
  return it->second;
}

const std::string& Vocab::raw(ItemId id) const {
  if (id < 1 || static_cast<std::size_t>(id) > keys_.size())
    throw VocabularyError("item id " + std::to_string(id) + " outside 1.." + std::to_string(keys_.size()));
  return keys_[static_cast<std::size_t>(id) - 1];
}

std::size_t SequenceData::num_interactions() const {
  std::size_t n = 0;
  for (const UserSequence& u : users) n += u.items.size();
  return n;
}

SequenceData build_sequences(const std::vector<Interaction>& interactions) {
  std::vector<std::size_t> order(interactions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return interactions[a].timestamp < interactions[b].timestamp;
  });

  std::unordered_map<std::string_view, std::size_t> user_slot;
  std::vector<std::vector<std::size_t>> events;
  for (std::size_t idx : order) {
    auto [it, inserted] = user_slot.emplace(interactions[idx].user, events.size());
    if (inserted) events.emplace_back();
    events[it->second].push_back(idx);
  }
  // Users too short for the task are removed before ids are assigned, so
  // that item ids stay contiguous over the kept events.
  std::vector<std::uint8_t> keep_event(interactions.size(), 0);
  for (const auto& ev : events)
    if (ev.size() > 1)
      for (std::size_t idx : ev) keep_event[idx] = 1;

  SequenceData data;
  for (std::size_t idx : order)
    if (keep_event[idx]) data.vocab.add(interactions[idx].item);
  for (const auto& ev : events) {
    if (ev.size() < 2) continue;
    UserSequence seq;
    seq.user = static_cast<std::int32_t>(data.users.size());
    seq.raw_user = interactions[ev.front()].user;
    for (std::size_t idx : ev) {
      seq.items.push_back(data.vocab.id(interactions[idx].item));
      seq.timestamps.push_back(interactions[idx].timestamp);
    }
    data.users.push_back(std::move(seq));
  }
  return data;
}

std::vector<ItemId> UserSplit::test_input() const {
  std::vector<ItemId> input = train;
  if (validation != kPad) input.push_back(validation);
  return input;
}

TrainView SplitDataset::train_view() const {
  TrainView view;
  view.num_items = num_items;
  for (const UserSplit& u : users) {
    view.users.push_back(u.user);
    view.sequences.push_back(u.train);
  }
  return view;
}

std::size_t SplitDataset::num_validation() const {
  return static_cast<std::size_t>(
      std::count_if(users.begin(), users.end(), [](const UserSplit& u) { return u.validation != kPad; }));
}

SplitDataset leave_one_out_split(const SequenceData& data) {
  SplitDataset split;
  split.num_items = data.num_items();
  for (const UserSequence& seq : data.users) {
    const std::size_t n = seq.items.size();
    if (n < 2) continue;
    UserSplit u;
    u.user = seq.user;
    u.test = seq.items[n - 1];
    if (n == 2) {
      u.train = {seq.items[0]};
    } else {
      u.validation = seq.items[n - 2];
      u.train.assign(seq.items.begin(), seq.items.end() - 2);
    }
    split.users.push_back(std::move(u));
  }
  return split;
}

std::vector<ItemId> pad_window(const std::vector<ItemId>& seq, std::size_t length) {
  if (length == 0) throw ContractViolation("pad_window: length must be at least 1");
  std::vector<ItemId> out(length, kPad);
  const std::size_t take = std::min(length, seq.size());
  std::copy(seq.end() - static_cast<std::ptrdiff_t>(take), seq.end(), out.end() - static_cast<std::ptrdiff_t>(take));
  return out;
}

}  // namespace seqbench::data
