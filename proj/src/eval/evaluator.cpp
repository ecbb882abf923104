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

#include "seqbench/eval/evaluator.hpp"

#include <algorithm>

#include "seqbench/common/errors.hpp"
#include "seqbench/data/sampling.hpp"
#include "seqbench/tensor/tape.hpp"

namespace seqbench::eval {

double MetricReport::metric(const std::string& name) const {
  const auto at_sign = name.find('@');
  if (at_sign == std::string::npos) throw ConfigError("metric '" + name + "' needs an @k suffix");
  const std::string base = name.substr(0, at_sign);
  std::size_t k = 0;
  try {
    k = std::stoul(name.substr(at_sign + 1));
  } catch (const std::exception&) {
    throw ConfigError("bad cutoff in metric '" + name + "'");
  }
  const auto it = at.find(k);
  if (it == at.end()) throw ConfigError("metric '" + name + "' was not computed");
  if (base == "precision") return it->second.precision;
  if (base == "recall") return it->second.recall;
  if (base == "ndcg") return it->second.ndcg;
  if (base == "map") return it->second.map;
  throw ConfigError("unknown metric '" + base + "' (expected precision, recall, ndcg or map)");
}

std::vector<std::vector<double>> ModelScorer::score(const models::Window& windows,
                                                    const std::vector<std::vector<data::ItemId>>& candidates) const {
  tensor::NoGradScope no_grad;
  const models::Tensor z = model_.final_representation(windows);
  const std::size_t d = model_.config().d;
  std::vector<std::vector<double>> out;
  out.reserve(windows.batch);
  for (std::size_t b = 0; b < windows.batch; ++b)
    out.push_back(models::score(model_, z.values().subspan(b * d, d), candidates[b]));
  return out;
}

MetricReport evaluate(const Scorer& scorer, const data::SplitDataset& split, const EvalOptions& o) {
  if (o.ks.empty()) throw ContractViolation("evaluate: no cutoffs requested");
  const data::NegativeSampler sampler = data::eval_sampler(split);
  const std::size_t L = scorer.window_length();
  const std::uint64_t phase_index = o.phase == Phase::kTest ? 1 : 0;

  MetricReport report;
  report.m_neg = o.m_neg;
  report.seed = o.seed;
  for (std::size_t k : o.ks) report.at[k] = {};

  std::vector<std::size_t> users;
  for (std::size_t u = 0; u < split.users.size(); ++u)
    if (o.phase == Phase::kTest || split.users[u].validation != data::kPad) users.push_back(u);

  for (std::size_t start = 0; start < users.size(); start += o.batch_size) {
    const std::size_t n = std::min(o.batch_size, users.size() - start);
    std::vector<data::ItemId> windows;
    windows.reserve(n * L);
    std::vector<std::vector<data::ItemId>> candidates(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t u = users[start + i];
      const data::UserSplit& us = split.users[u];
      const auto input = o.phase == Phase::kTest ? us.test_input() : us.validation_input();
      const auto window = data::pad_window(input, L);
      windows.insert(windows.end(), window.begin(), window.end());
      auto& cand = candidates[i];
      cand.push_back(o.phase == Phase::kTest ? us.test : us.validation);
      if (o.m_neg == kAllItems) {
        const auto pool = sampler.pool(u);
        cand.insert(cand.end(), pool.begin(), pool.end());
      } else {
        RngStream rng(derive_seed(o.seed, streams::kEvalNegatives,
                                  static_cast<std::uint64_t>(us.user) * 2 + phase_index));
        const auto neg = sampler.sample(u, o.m_neg, rng);
        cand.insert(cand.end(), neg.begin(), neg.end());
      }
    }
    const auto scores = scorer.score({windows, n, L}, candidates);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t rank = rank_positive(scores[i], 0, o.ties);
      for (std::size_t k : o.ks) {
        const Metrics m = metrics_at_k(rank, k);
        Metrics& acc = report.at[k];
        acc.precision += m.precision;
        acc.recall += m.recall;
        acc.ndcg += m.ndcg;
        acc.map += m.map;
      }
    }
  }
  report.users = users.size();
  if (report.users > 0) {
    const double inv = 1.0 / static_cast<double>(report.users);
    for (auto& [k, m] : report.at) {
      m.precision *= inv;
      m.recall *= inv;
      m.ndcg *= inv;
      m.map *= inv;
    }
  }
  return report;
}

MetricReport evaluate(const models::Model& model, const data::SplitDataset& split, const EvalOptions& options) {
  return evaluate(ModelScorer(model), split, options);
}

}  // namespace seqbench::eval
