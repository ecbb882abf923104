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
#ifndef SEQBENCH_DATA_DATASET_HPP_
#define SEQBENCH_DATA_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace seqbench::data {

using ItemId = std::int32_t;
inline constexpr ItemId kPad = 0;

struct Interaction {
  std::string user;
  std::string item;
  double rating = 1.0;
  std::int64_t timestamp = 0;
};

enum class DatasetFormat { kMovielens, kAmazon, kFoursquare, kCanonical };

// "movielens", "amazon", "foursquare" or "canonical"; UsageError otherwise.
DatasetFormat parse_format(std::string_view name);
std::string_view format_name(DatasetFormat format);

// One Interaction per record, in file order. MovieLens files are recognised
// by their first line (tab, "::" or CSV with header). A canonical dataset is
// a directory; see canonical.hpp.
std::vector<Interaction> parse_dataset(DatasetFormat format, const std::filesystem::path& path);
std::vector<Interaction> parse_stream(DatasetFormat format, std::istream& in, const std::string& source);

// Drops items, then users, with fewer than min_count events until nothing
// changes. Survivors keep their relative order.
std::vector<Interaction> five_core_filter(std::vector<Interaction> interactions, std::size_t min_count = 5);

// Raw item key <-> contiguous id in 1..m. Id 0 is the pad and never an item.
class Vocab {
 public:
  ItemId add(const std::string& raw);
  ItemId id(const std::string& raw) const;  // VocabularyError if unknown
  const std::string& raw(ItemId id) const;  // VocabularyError if out of range
  bool contains(const std::string& raw) const { return ids_.count(raw) != 0; }
  std::size_t size() const { return keys_.size(); }

 private:
  std::vector<std::string> keys_;
  std::unordered_map<std::string, ItemId> ids_;
};

struct UserSequence {
  std::int32_t user = 0;
  std::string raw_user;
  std::vector<ItemId> items;
  std::vector<std::int64_t> timestamps;
};

struct SequenceData {
  Vocab vocab;
  std::vector<UserSequence> users;  // ascending user id

  std::size_t num_items() const { return vocab.size(); }
  std::size_t num_interactions() const;
};

// Sorts every user's events by (timestamp, file order). User and item ids
// follow first appearance in the stream ordered the same way. Users with a
// single event are dropped.
SequenceData build_sequences(const std::vector<Interaction>& interactions);

// Training-side view of a split: per-user prefixes only.
struct TrainView {
  std::size_t num_items = 0;
  std::vector<std::int32_t> users;
  std::vector<std::vector<ItemId>> sequences;
};

struct UserSplit {
  std::int32_t user = 0;
  std::vector<ItemId> train;       // S_u without its last two items
  ItemId validation = kPad;        // second to last; kPad when L_u == 2
  ItemId test = kPad;              // last

  std::vector<ItemId> validation_input() const { return train; }
  std::vector<ItemId> test_input() const;
};

struct SplitDataset {
  std::size_t num_items = 0;
  std::vector<UserSplit> users;

  TrainView train_view() const;
  std::size_t num_validation() const;
};

// Leave-one-out: last event is the test target, second to last validation.
// With L_u == 2 the first item is only test input.
SplitDataset leave_one_out_split(const SequenceData& data);

// Most recent L items, left-padded with kPad to exactly L.
std::vector<ItemId> pad_window(const std::vector<ItemId>& seq, std::size_t length);

}  // namespace seqbench::data

#endif  // SEQBENCH_DATA_DATASET_HPP_
