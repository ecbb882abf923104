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
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>

namespace seqbench {

std::uint64_t splitmix64(std::uint64_t x);

// Seed for the named stream `name` (optionally indexed, e.g. by user id).
// Depends only on its own arguments, so adding a stream never shifts another.
std::uint64_t derive_seed(std::uint64_t base, std::string_view name, std::uint64_t index = 0);

// A single deterministic random stream. Draw helpers are implemented here
// rather than through <random> distributions so that sequences are identical
// across standard library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);

  template <class RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

  std::string save() const;
  void restore(const std::string& state);

  friend bool operator==(const RngStream& a, const RngStream& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

// Names of the streams used by the training and evaluation pipeline.
namespace streams {
inline constexpr std::string_view kInit = "init";
inline constexpr std::string_view kShuffle = "shuffle";
inline constexpr std::string_view kNegatives = "negatives";
inline constexpr std::string_view kDropout = "dropout";
inline constexpr std::string_view kCloze = "cloze";
inline constexpr std::string_view kEvalNegatives = "eval-negatives";
}  // namespace streams

class SeedBundle {
 public:
  explicit SeedBundle(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  RngStream stream(std::string_view name, std::uint64_t index = 0) const {
    return RngStream(derive_seed(seed_, name, index));
  }

 private:
  std::uint64_t seed_;
};

inline SeedBundle set_all_seeds(std::uint64_t seed) { return SeedBundle(seed); }

}  // namespace seqbench
