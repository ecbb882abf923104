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

#include "seqbench/eval/metrics.hpp"

#include <cmath>
#include <string>

#include "seqbench/common/errors.hpp"

namespace seqbench::eval {

std::size_t rank_positive(std::span<const double> scores, std::size_t positive_index, TieRule rule) {
  if (positive_index >= scores.size()) throw ContractViolation("rank_positive: positive index out of range");
  const double pos = scores[positive_index];
  if (!std::isfinite(pos)) throw ContractViolation("rank_positive: non-finite positive score");
  std::size_t ahead = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i == positive_index) continue;
    if (!std::isfinite(scores[i])) throw ContractViolation("rank_positive: non-finite score at " + std::to_string(i));
    if (scores[i] > pos || (rule == TieRule::kPessimistic && scores[i] == pos)) ++ahead;
  }
  return ahead + 1;
}

Metrics metrics_at_k(std::size_t rank, std::size_t k) {
  if (rank == 0 || k == 0) throw ContractViolation("metrics_at_k: rank and k start at 1");
  if (rank > k) return {};
  return {1.0 / static_cast<double>(k), 1.0, 1.0 / std::log2(static_cast<double>(rank) + 1.0),
          1.0 / static_cast<double>(rank)};
}

}  // namespace seqbench::eval
