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
#include <boost/math/distributions/chi_squared.hpp>
#include <set>

#include "seqbench/common/errors.hpp"
#include "seqbench/data/batches.hpp"
#include "seqbench/data/sampling.hpp"

namespace seqbench::data {
namespace {

TEST(SampleNegatives, ForcedOutcome) {
  const NegativeSampler sampler(5, {{1, 2, 3, 4}});
  RngStream rng(1);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sampler.sample(0, 1, rng), (std::vector<ItemId>{5}));
}

TEST(SampleNegatives, SameSeedSameSample) {
  const NegativeSampler sampler(1000, {{3, 17, 400}});
  RngStream a(42), b(42);
  EXPECT_EQ(sampler.sample(0, 100, a), sampler.sample(0, 100, b));
}

TEST(SampleNegatives, InsufficientPoolNamesUserAndSize) {
  const NegativeSampler sampler(5, {{1, 2, 3}}, {77});
  RngStream rng(1);
  try {
    sampler.sample(0, 3, rng);
    FAIL();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("user 77"), std::string::npos);
    EXPECT_NE(what.find("only 2"), std::string::npos);
  }
}

TEST(SampleNegatives, DistinctAndOutsideConsumedSet) {
  RngStream rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + rng.below(60);
    std::vector<ItemId> consumed;
    for (std::size_t i = 0, n = rng.below(m); i < n; ++i) consumed.push_back(static_cast<ItemId>(1 + rng.below(m)));
    const NegativeSampler sampler(m, {consumed});
    const std::size_t pool = sampler.pool_size(0);
    const std::size_t count = pool == 0 ? 0 : rng.below(pool + 1);
    const auto got = sampler.sample(0, count, rng);
    ASSERT_EQ(got.size(), count);
    EXPECT_EQ(std::set<ItemId>(got.begin(), got.end()).size(), count);
    for (ItemId id : got) {
      EXPECT_GE(id, 1);
      EXPECT_LE(static_cast<std::size_t>(id), m);
      EXPECT_EQ(std::count(consumed.begin(), consumed.end(), id), 0);
    }
  }
}

double chi_squared_p(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (double c : counts) stat += (c - expected) * (c - expected) / expected;
  boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

TEST(SampleNegatives, ChiSquaredUniformity) {
  const NegativeSampler sampler(100, {{}});
  RngStream rng(2026);
  std::vector<double> counts(100, 0.0);
  for (int i = 0; i < 100000; ++i) counts[static_cast<std::size_t>(sampler.sample(0, 1, rng)[0] - 1)] += 1.0;
  EXPECT_GT(chi_squared_p(counts), 0.01);
}

TEST(SampleNegatives, ChiSquaredUniformityOnSmallPool) {
  // Exercises the explicit-pool path: 60 of 100 items consumed.
  std::vector<ItemId> consumed;
  for (ItemId i = 1; i <= 60; ++i) consumed.push_back(i);
  const NegativeSampler sampler(100, {consumed});
  RngStream rng(11);
  std::vector<double> counts(40, 0.0);
  for (int i = 0; i < 40000; ++i)
    for (ItemId id : sampler.sample(0, 3, rng)) counts[static_cast<std::size_t>(id - 61)] += 1.0;
  EXPECT_GT(chi_squared_p(counts), 0.01);
}

TEST(SetAllSeeds, NamedStreamsAreUncorrelated) {
  const SeedBundle seeds = set_all_seeds(123);
  RngStream a = seeds.stream(streams::kShuffle), b = seeds.stream(streams::kNegatives);
  const int n = 100000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform(), y = b.uniform();
    sa += x;
    sb += y;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double corr = cov / std::sqrt((saa / n - (sa / n) * (sa / n)) * (sbb / n - (sb / n) * (sb / n)));
  // |r| beyond 4 / sqrt(n) would be a 4-sigma event for independent streams.
  EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_TRUE(seeds.stream(streams::kInit) == set_all_seeds(123).stream(streams::kInit));
}

TEST(SetAllSeeds, StreamStateRoundTrips) {
  RngStream a(99);
  for (int i = 0; i < 10; ++i) a.next_u64();
  RngStream b(0);
  b.restore(a.save());
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TrainView toy_view() {
  TrainView v;
  v.num_items = 6;
  v.users = {0, 1, 2};
  v.sequences = {{1, 2, 3}, {4, 5}, {6}};
  return v;
}

struct Rngs {
  RngStream shuffle{1}, negatives{2}, cloze{3};
  BatchRngs refs() { return {shuffle, negatives, cloze}; }
};

TEST(MakeBatches, Seq2SeqShiftsTargetsByOne) {
  Rngs r;
  BatchOptions o;
  o.length = 4;
  o.batch_size = 8;
  o.shuffle = false;
  const auto batches = make_batches(toy_view(), o, r.refs());
  ASSERT_EQ(batches.size(), 1u);
  const Batch& b = batches[0];
  ASSERT_EQ(b.size, 2u);  // the single-item user has no target
  EXPECT_EQ(std::vector<ItemId>(b.inputs.begin(), b.inputs.begin() + 4), (std::vector<ItemId>{0, 1, 2, 3}));
  EXPECT_EQ(std::vector<ItemId>(b.targets.begin(), b.targets.begin() + 4), (std::vector<ItemId>{0, 2, 3, 0}));
  EXPECT_EQ(std::vector<ItemId>(b.targets.begin() + 4, b.targets.end()), (std::vector<ItemId>{0, 0, 5, 0}));
  EXPECT_EQ(b.num_slots(), 3u);
}

TEST(MakeBatches, Seq2ItemEnumeratesPrefixes) {
  Rngs r;
  BatchOptions o;
  o.length = 4;
  o.mode = BatchMode::kSeq2Item;
  o.shuffle = false;
  const Batch b = make_batches(toy_view(), o, r.refs()).at(0);
  ASSERT_EQ(b.size, 3u);
  EXPECT_EQ(std::vector<ItemId>(b.inputs.begin(), b.inputs.begin() + 4), (std::vector<ItemId>{0, 0, 0, 1}));
  EXPECT_EQ(b.target(0, 3), 2);
  EXPECT_EQ(std::vector<ItemId>(b.inputs.begin() + 4, b.inputs.begin() + 8), (std::vector<ItemId>{0, 0, 1, 2}));
  EXPECT_EQ(b.target(1, 3), 3);
  EXPECT_EQ(b.target(2, 3), 5);
  for (std::size_t row = 0; row < 3; ++row)
    for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(b.target(row, t), kPad);
}

TEST(MakeBatches, LastStepKeepsOnlyTheFinalPrefix) {
  Rngs r;
  BatchOptions o;
  o.length = 4;
  o.mode = BatchMode::kLastStep;
  o.shuffle = false;
  const Batch b = make_batches(toy_view(), o, r.refs()).at(0);
  ASSERT_EQ(b.size, 2u);
  EXPECT_EQ(std::vector<ItemId>(b.inputs.begin(), b.inputs.begin() + 4), (std::vector<ItemId>{0, 0, 1, 2}));
  EXPECT_EQ(b.target(0, 3), 3);
  EXPECT_EQ(b.target(1, 3), 5);
  EXPECT_EQ(b.num_slots(), 2u);
  EXPECT_EQ(count_examples(toy_view(), o), 2u);
}

TEST(MakeBatches, PadMaskIsTheLeftPrefix) {
  Rngs r;
  BatchOptions o;
  o.length = 6;
  for (BatchMode mode : {BatchMode::kSeq2Seq, BatchMode::kSeq2Item, BatchMode::kPrefixPacked, BatchMode::kLastStep}) {
    o.mode = mode;
    for (const Batch& b : make_batches(toy_view(), o, r.refs())) {
      for (std::size_t row = 0; row < b.size; ++row) {
        bool seen_item = false;
        for (std::size_t t = 0; t < b.length; ++t) {
          const bool pad = b.pad[row * b.length + t] != 0;
          EXPECT_EQ(pad, b.input(row, t) == kPad);
          if (!pad) seen_item = true;
          EXPECT_FALSE(pad && seen_item);
        }
      }
    }
  }
}

TEST(MakeBatches, ClozeMasksOnlyRealPositions) {
  Rngs r;
  BatchOptions o;
  o.length = 5;
  o.mode = BatchMode::kCloze;
  o.mask_token = 7;
  o.mask_prob = 0.3;
  for (int epoch = 0; epoch < 50; ++epoch) {
    for (const Batch& b : make_batches(toy_view(), o, r.refs())) {
      EXPECT_EQ(b.size, 3u);
      for (std::size_t row = 0; row < b.size; ++row) {
        std::size_t masked = 0;
        for (std::size_t t = 0; t < b.length; ++t) {
          if (b.target(row, t) != kPad) {
            EXPECT_EQ(b.input(row, t), 7);
            ++masked;
          } else {
            EXPECT_NE(b.input(row, t), 7);
          }
        }
        EXPECT_GE(masked, 1u);
      }
    }
  }
  o.mask_token = 6;
  EXPECT_THROW(make_batches(toy_view(), o, r.refs()), ContractViolation);
}

TrainView random_view(RngStream& rng, std::size_t users, std::size_t m) {
  TrainView v;
  v.num_items = m;
  for (std::size_t u = 0; u < users; ++u) {
    v.users.push_back(static_cast<std::int32_t>(u));
    std::vector<ItemId> seq;
    for (std::size_t i = 0, n = 1 + rng.below(25); i < n; ++i) seq.push_back(static_cast<ItemId>(1 + rng.below(m)));
    v.sequences.push_back(seq);
  }
  return v;
}

TEST(MakeBatches, NegativesAvoidTheUsersItems) {
  RngStream gen(8);
  const TrainView view = random_view(gen, 60, 80);
  Rngs r;
  BatchOptions o;
  o.length = 10;
  o.batch_size = 16;
  o.m_neg = 4;
  for (BatchMode mode : {BatchMode::kSeq2Seq, BatchMode::kSeq2Item, BatchMode::kLastStep, BatchMode::kCloze}) {
    o.mode = mode;
    o.mask_token = 81;
    for (const Batch& b : make_batches(view, o, r.refs())) {
      for (std::size_t row = 0; row < b.size; ++row) {
        const auto& seq = view.sequences[static_cast<std::size_t>(b.users[row])];
        for (std::size_t t = 0; t < b.length; ++t) {
          const ItemId pos = b.target(row, t);
          for (std::size_t k = 0; k < o.m_neg; ++k) {
            const ItemId neg = b.negatives[(row * b.length + t) * o.m_neg + k];
            if (pos == kPad) {
              EXPECT_EQ(neg, kPad);
              continue;
            }
            EXPECT_NE(neg, pos);
            EXPECT_EQ(std::count(seq.begin(), seq.end(), neg), 0);
          }
        }
      }
    }
  }
}

std::vector<ItemId> flatten(const std::vector<Batch>& batches) {
  std::vector<ItemId> out;
  for (const Batch& b : batches) {
    out.insert(out.end(), b.inputs.begin(), b.inputs.end());
    out.insert(out.end(), b.targets.begin(), b.targets.end());
    out.insert(out.end(), b.negatives.begin(), b.negatives.end());
  }
  return out;
}

TEST(MakeBatches, SameSeedSameStream) {
  RngStream gen(3);
  const TrainView view = random_view(gen, 40, 50);
  BatchOptions o;
  o.length = 8;
  o.batch_size = 7;
  o.m_neg = 2;
  Rngs a, b;
  EXPECT_EQ(flatten(make_batches(view, o, a.refs())), flatten(make_batches(view, o, b.refs())));
}

TEST(MakeBatches, IndependentOfValidationAndTestItems) {
  // Two splits that differ only in held-out targets produce the same batches.
  RngStream gen(21);
  SplitDataset split;
  split.num_items = 40;
  for (int u = 0; u < 30; ++u) {
    UserSplit s;
    s.user = u;
    for (std::size_t i = 0, n = 2 + gen.below(10); i < n; ++i) s.train.push_back(static_cast<ItemId>(1 + gen.below(40)));
    s.validation = static_cast<ItemId>(1 + gen.below(40));
    s.test = static_cast<ItemId>(1 + gen.below(40));
    split.users.push_back(s);
  }
  SplitDataset scrambled = split;
  for (UserSplit& s : scrambled.users) {
    s.validation = static_cast<ItemId>(1 + gen.below(40));
    s.test = static_cast<ItemId>(1 + gen.below(40));
  }
  BatchOptions o;
  o.length = 6;
  o.m_neg = 3;
  Rngs a, b;
  EXPECT_EQ(flatten(make_batches(split.train_view(), o, a.refs())),
            flatten(make_batches(scrambled.train_view(), o, b.refs())));
}

}  // namespace
}  // namespace seqbench::data
