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

// Ranking-metric oracles that share no code with the evaluator: a sort for
// the rank and a materialised top-k list for the metrics.
#ifndef SEQBENCH_TESTS_SUPPORT_METRIC_ORACLE_HPP_
#define SEQBENCH_TESTS_SUPPORT_METRIC_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "seqbench/eval/metrics.hpp"

namespace seqbench::testing {

// Candidates sorted by score descending, ties placing the positive last
// among equals (pessimistic); returns the positive's 1-based place.
inline std::size_t sorted_rank(const std::vector<double>& scores, std::size_t pos) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a != pos && b == pos;
  });
  return static_cast<std::size_t>(std::find(idx.begin(), idx.end(), pos) - idx.begin()) + 1;
}

inline eval::Metrics list_metrics(std::size_t rank, std::size_t k) {
  eval::Metrics m;
  double hits = 0.0, ap = 0.0, dcg = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    if (i == rank) {
      hits += 1.0;
      ap += hits / static_cast<double>(i);
      dcg += 1.0 / std::log2(static_cast<double>(i) + 1.0);
    }
  }
  m.precision = hits / static_cast<double>(k);
  m.recall = hits;
  m.map = ap;
  m.ndcg = dcg;  // ideal DCG is 1 with a single relevant item
  return m;
}

}  // namespace seqbench::testing

#endif  // SEQBENCH_TESTS_SUPPORT_METRIC_ORACLE_HPP_
