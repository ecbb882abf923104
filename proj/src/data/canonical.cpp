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
#include <charconv>
#include <fstream>
#include <string>

#include "seqbench/common/errors.hpp"
#include "seqbench/data/canonical.hpp"

namespace seqbench::data {
namespace {

void check_key(const std::string& key) {
  if (key.find_first_of("\t\n\r") != std::string::npos)
    throw DataError("key '" + key + "' contains a tab or newline and cannot be stored");
}

template <class T>
T parse_number(std::string_view s, const std::string& source, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(source, line, "bad number '" + std::string(s) + "'");
  return value;
}

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0, pos;
  while ((pos = line.find('\t', start)) != std::string_view::npos) {
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  out.push_back(line.substr(start));
  return out;
}

}  // namespace

void write_canonical(const SequenceData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream vocab(dir / "vocab.tsv", std::ios::binary);
  std::ofstream inter(dir / "interactions.tsv", std::ios::binary);
  if (!vocab || !inter) throw DataError("cannot write canonical dataset to " + dir.string());
  for (std::size_t id = 1; id <= data.vocab.size(); ++id) {
    const std::string& raw = data.vocab.raw(static_cast<ItemId>(id));
    check_key(raw);
    vocab << raw << '\t' << id << '\n';
  }
  for (const UserSequence& u : data.users) {
    check_key(u.raw_user);
    for (std::size_t i = 0; i < u.items.size(); ++i)
      inter << u.raw_user << '\t' << u.items[i] << '\t' << u.timestamps[i] << '\n';
  }
  if (!vocab.flush() || !inter.flush()) throw DataError("failed writing canonical dataset to " + dir.string());
}

SequenceData read_canonical(const std::filesystem::path& dir) {
  const std::filesystem::path vocab_path = dir / "vocab.tsv", inter_path = dir / "interactions.tsv";
  std::ifstream vocab(vocab_path), inter(inter_path);
  if (!vocab || !inter) throw DataError("canonical dataset at " + dir.string() + " needs vocab.tsv and interactions.tsv");
  SequenceData data;
  std::string line;
  std::size_t n = 0;
  while (std::getline(vocab, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = fields(line);
    if (f.size() != 2) throw ParseError(vocab_path.string(), n, "expected 2 fields");
    const auto id = parse_number<std::int64_t>(f[1], vocab_path.string(), n);
    if (id != static_cast<std::int64_t>(data.vocab.size()) + 1)
      throw ParseError(vocab_path.string(), n, "ids must be contiguous from 1");
    if (data.vocab.add(std::string(f[0])) != id) throw ParseError(vocab_path.string(), n, "duplicate key");
  }
  n = 0;
  while (std::getline(inter, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = fields(line);
    if (f.size() != 3) throw ParseError(inter_path.string(), n, "expected 3 fields");
    const auto item = parse_number<std::int64_t>(f[1], inter_path.string(), n);
    if (item < 1 || item > static_cast<std::int64_t>(data.vocab.size()))
      throw ParseError(inter_path.string(), n, "item id " + std::to_string(item) + " not in vocabulary");
    const auto ts = parse_number<std::int64_t>(f[2], inter_path.string(), n);
    if (ts < 0) throw ParseError(inter_path.string(), n, "negative timestamp");
    if (data.users.empty() || data.users.back().raw_user != f[0]) {
      UserSequence u;
      u.user = static_cast<std::int32_t>(data.users.size());
      u.raw_user = std::string(f[0]);
      data.users.push_back(std::move(u));
    }
    UserSequence& u = data.users.back();
    if (!u.timestamps.empty() && ts < u.timestamps.back())
      throw ParseError(inter_path.string(), n, "events of a user must be chronological");
    u.items.push_back(static_cast<ItemId>(item));
    u.timestamps.push_back(ts);
  }
  return data;
}

SequenceData preprocess(DatasetFormat format, const std::filesystem::path& raw) {
  if (format == DatasetFormat::kCanonical) return read_canonical(raw);
  return build_sequences(five_core_filter(parse_dataset(format, raw)));
}

}  // namespace seqbench::data
