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
#ifndef SEQBENCH_DATA_CANONICAL_HPP_
#define SEQBENCH_DATA_CANONICAL_HPP_

#include <filesystem>

#include "seqbench/data/dataset.hpp"

namespace seqbench::data {

// Canonical processed dataset: a directory with
//   interactions.tsv  user_key \t item_id \t timestamp, grouped by user in
//                     user-id order, each user chronological
//   vocab.tsv         raw_item_key \t item_id, ascending id
// Any dataset converted to this layout can be used without a new parser.
void write_canonical(const SequenceData& data, const std::filesystem::path& dir);
SequenceData read_canonical(const std::filesystem::path& dir);

// Raw file -> parse -> 5-core -> sequences.
SequenceData preprocess(DatasetFormat format, const std::filesystem::path& raw);

}  // namespace seqbench::data

#endif  // SEQBENCH_DATA_CANONICAL_HPP_
