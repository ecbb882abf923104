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

#ifndef SEQBENCH_EVAL_METRICS_HPP_
#define SEQBENCH_EVAL_METRICS_HPP_

#include <cstddef>
#include <span>

namespace seqbench::eval {

enum class TieRule {
  kPessimistic,  // tied candidates rank ahead of the positive
  kOptimistic,   // tied candidates rank behind it
};

// 1-based rank of scores[positive_index] among all scores.
std::size_t rank_positive(std::span<const double> scores, std::size_t positive_index,
                          TieRule rule = TieRule::kPessimistic);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double ndcg = 0.0;
  double map = 0.0;
};

// Closed forms for a single relevant item at `rank`:
// hit (rank <= k) gives P = 1/k, R = 1, NDCG = 1/log2(rank+1), MAP = 1/rank.
Metrics metrics_at_k(std::size_t rank, std::size_t k);

}  // namespace seqbench::eval

#endif  // SEQBENCH_EVAL_METRICS_HPP_
