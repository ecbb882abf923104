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

#ifndef SEQBENCH_EVAL_EVALUATOR_HPP_
#define SEQBENCH_EVAL_EVALUATOR_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "seqbench/data/dataset.hpp"
#include "seqbench/eval/metrics.hpp"
#include "seqbench/models/model.hpp"

namespace seqbench::eval {

enum class Phase { kValidation, kTest };

inline constexpr std::size_t kAllItems = 0;

struct EvalOptions {
  Phase phase = Phase::kTest;
  std::size_t m_neg = 100;  // kAllItems ranks against every unconsumed item
  std::uint64_t seed = 0;
  std::vector<std::size_t> ks{10, 20};
  TieRule ties = TieRule::kPessimistic;
  std::size_t batch_size = 256;
};

struct MetricReport {
  std::map<std::size_t, Metrics> at;  // mean over users, keyed by k
  std::size_t users = 0;
  std::size_t m_neg = 0;
  std::uint64_t seed = 0;

  // "ndcg@10", "recall@20", ... ; ConfigError for unknown names.
  double metric(const std::string& name) const;
};

// Scores candidate lists for a batch of windows (batch x width, left-padded).
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<std::vector<double>> score(const models::Window& windows,
                                                 const std::vector<std::vector<data::ItemId>>& candidates) const = 0;
  virtual std::size_t window_length() const = 0;
};

class ModelScorer final : public Scorer {
 public:
  explicit ModelScorer(const models::Model& model) : model_(model) {}
  std::vector<std::vector<double>> score(const models::Window& windows,
                                         const std::vector<std::vector<data::ItemId>>& candidates) const override;
  std::size_t window_length() const override { return model_.config().length; }

 private:
  const models::Model& model_;
};

// Per user: the phase's input window, the positive and m_neg negatives drawn
// from a per-user stream (seed, "eval-negatives", user, phase) outside S_u,
// then rank and metrics. Users without a target for the phase are skipped.
MetricReport evaluate(const Scorer& scorer, const data::SplitDataset& split, const EvalOptions& options);
MetricReport evaluate(const models::Model& model, const data::SplitDataset& split, const EvalOptions& options);

}  // namespace seqbench::eval

#endif  // SEQBENCH_EVAL_EVALUATOR_HPP_
