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
#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "seqbench/common/errors.hpp"
#include "seqbench/common/rng.hpp"
#include "seqbench/data/canonical.hpp"
#include "seqbench/data/dataset.hpp"
#include "support/paths.hpp"

namespace seqbench::data {
namespace {

std::vector<Interaction> parse_text(DatasetFormat f, const std::string& text) {
  std::istringstream in(text);
  return parse_stream(f, in, "inline");
}

TEST(ParseDataset, GoldenTabFileKeepsOrder) {
  const auto rows = parse_text(DatasetFormat::kMovielens, "3\t9\t4\t100\n1\t9\t5\t50\n3\t2\t1\t100\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].user, "3");
  EXPECT_EQ(rows[0].item, "9");
  EXPECT_EQ(rows[0].timestamp, 100);
  EXPECT_EQ(rows[1].user, "1");
  EXPECT_EQ(rows[1].rating, 5.0);
  EXPECT_EQ(rows[2].item, "2");
}

TEST(ParseDataset, EmptyFileGivesNoInteractions) {
  EXPECT_TRUE(parse_text(DatasetFormat::kMovielens, "").empty());
  EXPECT_TRUE(parse_text(DatasetFormat::kAmazon, "").empty());
}

TEST(ParseDataset, OtherMovielensLayouts) {
  const auto colons = parse_text(DatasetFormat::kMovielens, "1::1193::5::978300760\n1::661::3::978302109\n");
  ASSERT_EQ(colons.size(), 2u);
  EXPECT_EQ(colons[1].item, "661");
  EXPECT_EQ(colons[1].timestamp, 978302109);
  const auto csv =
      parse_text(DatasetFormat::kMovielens, "userId,movieId,rating,timestamp\n1,2,3.5,1112486027\n1,29,3.5,1112484676\n");
  ASSERT_EQ(csv.size(), 2u);
  EXPECT_EQ(csv[0].rating, 3.5);
}

TEST(ParseDataset, AmazonCsv) {
  const auto rows = parse_text(DatasetFormat::kAmazon, "A39HTATAQ9V7YF,0205616461,5.0,1369699200\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].user, "A39HTATAQ9V7YF");
  EXPECT_EQ(rows[0].item, "0205616461");
  EXPECT_EQ(rows[0].timestamp, 1369699200);
}

TEST(ParseDataset, FoursquareUtcTime) {
  const auto rows = parse_text(
      DatasetFormat::kFoursquare,
      "470\t49bbd6c0f964a520f4531fe3\t4bf58dd8d48988d127951735\tArts & Crafts Store\t40.71\t-74.0\t-240\t"
      "Tue Apr 03 18:00:09 +0000 2012\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].user, "470");
  EXPECT_EQ(rows[0].item, "49bbd6c0f964a520f4531fe3");
  EXPECT_EQ(rows[0].timestamp, 1333476009);
}

TEST(ParseDataset, MalformedLineReportsLineNumber) {
  try {
    parse_text(DatasetFormat::kMovielens, "1\t2\t3\t4\n1\t2\t3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_text(DatasetFormat::kAmazon, "a,b,5,notatime\n"), ParseError);
  EXPECT_THROW(parse_text(DatasetFormat::kAmazon, "a,b,5,-3\n"), ParseError);
}

TEST(ParseDataset, UnknownFormatIsAUsageError) {
  EXPECT_THROW(parse_format("yelp"), UsageError);
  EXPECT_EQ(parse_format("foursquare"), DatasetFormat::kFoursquare);
}

TEST(ParseDataset, MissingFileIsADataError) {
  EXPECT_THROW(parse_dataset(DatasetFormat::kMovielens, "/nonexistent/u.data"), DataError);
}

// Oracle: remove one offending interaction group at a time, in any order,
// until none is left. The result is the unique largest k-core.
std::vector<Interaction> brute_force_core(std::vector<Interaction> rows, std::size_t k) {
  while (true) {
    std::map<std::string, std::size_t> users, items;
    for (const auto& r : rows) {
      ++users[r.user];
      ++items[r.item];
    }
    auto bad = std::find_if(rows.begin(), rows.end(),
                            [&](const Interaction& r) { return users[r.user] < k || items[r.item] < k; });
    if (bad == rows.end()) return rows;
    const Interaction victim = *bad;
    const bool by_user = users[victim.user] < k;
    std::erase_if(rows, [&](const Interaction& r) { return by_user ? r.user == victim.user : r.item == victim.item; });
  }
}

std::vector<std::string> keys(const std::vector<Interaction>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(r.user + "/" + r.item + "/" + std::to_string(r.timestamp));
  return out;
}

TEST(FiveCoreFilter, MatchesBruteForceOnToyLogs) {
  RngStream rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Interaction> rows;
    const std::size_t n = 20 + rng.below(40);
    for (std::size_t i = 0; i < n; ++i)
      rows.push_back({"u" + std::to_string(rng.below(5)), "i" + std::to_string(rng.below(6)), 1.0,
                      static_cast<std::int64_t>(i)});
    const std::size_t k = 2 + rng.below(4);
    EXPECT_EQ(keys(five_core_filter(rows, k)), keys(brute_force_core(rows, k))) << "trial " << trial;
  }
}

TEST(FiveCoreFilter, CascadeOnSmallLog) {
  // u1..u5 rate i1..i4 and u1 also rates i5. Dropping the rare item i5
  // leaves u1 with four events, and then every user falls below five.
  std::vector<Interaction> rows;
  for (int u = 1; u <= 5; ++u)
    for (int i = 1; i <= 4; ++i) rows.push_back({"u" + std::to_string(u), "i" + std::to_string(i), 1.0, 0});
  rows.push_back({"u1", "i5", 1.0, 1});
  EXPECT_TRUE(five_core_filter(rows).empty());
  EXPECT_EQ(keys(five_core_filter(rows)), keys(brute_force_core(rows, 5)));
  const auto four_core = five_core_filter(rows, 4);
  EXPECT_EQ(four_core.size(), 20u);
  EXPECT_EQ(keys(four_core), keys(brute_force_core(rows, 4)));
}

TEST(FiveCoreFilter, AlreadyCoreIsUnchanged) {
  std::vector<Interaction> rows;
  for (int u = 0; u < 5; ++u)
    for (int i = 0; i < 5; ++i) rows.push_back({std::to_string(u), std::to_string(i), 1.0, u * 5 + i});
  EXPECT_EQ(keys(five_core_filter(rows)), keys(rows));
}

TEST(FiveCoreFilter, IsAFixpoint) {
  RngStream rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Interaction> rows;
    for (int i = 0; i < 200; ++i)
      rows.push_back({std::to_string(rng.below(20)), std::to_string(rng.below(30)), 1.0, i});
    const auto once = five_core_filter(rows);
    EXPECT_EQ(keys(five_core_filter(once)), keys(once));
  }
}

TEST(BuildSequences, SortsEachUserByTimeStably) {
  const std::vector<Interaction> rows{
      {"b", "x", 1, 30}, {"a", "y", 1, 20}, {"b", "y", 1, 10}, {"a", "z", 1, 20}, {"a", "x", 1, 5}};
  const SequenceData data = build_sequences(rows);
  ASSERT_EQ(data.users.size(), 2u);
  // Time-ordered stream: (a,x,5) (b,y,10) (a,y,20) (a,z,20) (b,x,30).
  EXPECT_EQ(data.users[0].raw_user, "a");
  EXPECT_EQ(data.users[0].items, (std::vector<ItemId>{1, 2, 3}));
  EXPECT_EQ(data.users[1].raw_user, "b");
  EXPECT_EQ(data.users[1].items, (std::vector<ItemId>{2, 1}));
  EXPECT_EQ(data.vocab.raw(1), "x");
  EXPECT_EQ(data.vocab.raw(3), "z");
  EXPECT_EQ(data.users[0].timestamps, (std::vector<std::int64_t>{5, 20, 20}));
}

TEST(BuildSequences, DropsSingleEventUsers) {
  const SequenceData data = build_sequences({{"a", "x", 1, 1}, {"b", "y", 1, 2}, {"b", "z", 1, 3}});
  ASSERT_EQ(data.users.size(), 1u);
  EXPECT_EQ(data.num_items(), 2u);
  EXPECT_EQ(data.vocab.raw(1), "y");
  EXPECT_THROW(data.vocab.raw(0), VocabularyError);
}

TEST(LeaveOneOut, FourItemUser) {
  SequenceData data;
  data.users.push_back({0, "u", {1, 2, 3, 4}, {0, 1, 2, 3}});
  for (const char* k : {"a", "b", "c", "d"}) data.vocab.add(k);
  const SplitDataset split = leave_one_out_split(data);
  const UserSplit& u = split.users.at(0);
  EXPECT_EQ(u.train, (std::vector<ItemId>{1, 2}));
  EXPECT_EQ(u.validation_input(), (std::vector<ItemId>{1, 2}));
  EXPECT_EQ(u.validation, 3);
  EXPECT_EQ(u.test_input(), (std::vector<ItemId>{1, 2, 3}));
  EXPECT_EQ(u.test, 4);
}

TEST(LeaveOneOut, TwoItemUserHasNoValidation) {
  SequenceData data;
  data.users.push_back({0, "u", {1, 2}, {0, 1}});
  const UserSplit u = leave_one_out_split(data).users.at(0);
  EXPECT_EQ(u.validation, kPad);
  EXPECT_EQ(u.test_input(), (std::vector<ItemId>{1}));
  EXPECT_EQ(u.test, 2);
}

TEST(LeaveOneOut, ReconstructsEverySequence) {
  RngStream rng(4);
  SequenceData data;
  for (int u = 0; u < 200; ++u) {
    UserSequence s{u, std::to_string(u), {}, {}};
    const std::size_t n = 2 + rng.below(30);
    for (std::size_t i = 0; i < n; ++i) {
      s.items.push_back(static_cast<ItemId>(1 + rng.below(50)));
      s.timestamps.push_back(static_cast<std::int64_t>(i));
    }
    data.users.push_back(s);
  }
  const SplitDataset split = leave_one_out_split(data);
  ASSERT_EQ(split.users.size(), data.users.size());
  for (std::size_t i = 0; i < split.users.size(); ++i) {
    std::vector<ItemId> rebuilt = split.users[i].test_input();
    rebuilt.push_back(split.users[i].test);
    EXPECT_EQ(rebuilt, data.users[i].items);
  }
}

TEST(PadWindow, Examples) {
  EXPECT_EQ(pad_window({7, 9}, 5), (std::vector<ItemId>{0, 0, 0, 7, 9}));
  std::vector<ItemId> long_seq(300);
  for (int i = 0; i < 300; ++i) long_seq[i] = i + 1;
  const auto w = pad_window(long_seq, 200);
  ASSERT_EQ(w.size(), 200u);
  EXPECT_EQ(w.front(), 101);
  EXPECT_EQ(w.back(), 300);
  EXPECT_EQ(pad_window({1, 2, 3}, 3), (std::vector<ItemId>{1, 2, 3}));
  EXPECT_THROW(pad_window({1}, 0), ContractViolation);
}

TEST(Canonical, RoundTripsSequencesAndVocab) {
  const SequenceData data = build_sequences(
      {{"u1", "m1", 1, 10}, {"u2", "m2", 1, 11}, {"u1", "m3", 1, 12}, {"u2", "m1", 1, 13}, {"u1", "m2", 1, 13}});
  const auto dir = std::filesystem::temp_directory_path() / "seqbench_canonical_test";
  std::filesystem::remove_all(dir);
  write_canonical(data, dir);
  const SequenceData back = read_canonical(dir);
  ASSERT_EQ(back.users.size(), data.users.size());
  for (std::size_t i = 0; i < data.users.size(); ++i) {
    EXPECT_EQ(back.users[i].raw_user, data.users[i].raw_user);
    EXPECT_EQ(back.users[i].items, data.users[i].items);
    EXPECT_EQ(back.users[i].timestamps, data.users[i].timestamps);
  }
  for (ItemId id = 1; id <= 3; ++id) EXPECT_EQ(back.vocab.raw(id), data.vocab.raw(id));
  // The canonical layout is also a parse_dataset format.
  EXPECT_EQ(parse_dataset(DatasetFormat::kCanonical, dir).size(), 5u);
  std::filesystem::remove_all(dir);
}

TEST(Movielens100k, RawFileCounts) {
  const auto path = testing::ml100k_path();
  if (!std::filesystem::exists(path)) GTEST_SKIP() << "run tools/fetch_ml100k.sh first";
  const auto rows = parse_dataset(DatasetFormat::kMovielens, path);
  std::set<std::string> users, items;
  for (const auto& r : rows) {
    users.insert(r.user);
    items.insert(r.item);
  }
  EXPECT_EQ(rows.size(), 100000u);
  EXPECT_EQ(users.size(), 943u);
  EXPECT_EQ(items.size(), 1682u);
}

TEST(Movielens100k, FiveCoreStatistics) {
  const auto path = testing::ml100k_path();
  if (!std::filesystem::exists(path)) GTEST_SKIP() << "run tools/fetch_ml100k.sh first";
  const SequenceData data = preprocess(DatasetFormat::kMovielens, path);
  EXPECT_EQ(data.users.size(), 943u);
  EXPECT_EQ(data.num_items(), 1349u);
  EXPECT_EQ(data.num_interactions(), 99287u);
}

}  // namespace
}  // namespace seqbench::data
