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

// seqbench command line: preprocess, run, eval, report.
//
// Exit codes: 0 success, 1 usage or config error, 2 data error, 3 run failure.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "json.hpp"
#include "seqbench/common/errors.hpp"
#include "seqbench/data/canonical.hpp"
#include "seqbench/eval/evaluator.hpp"
#include "seqbench/models/checkpoint.hpp"
#include "seqbench/runner/config.hpp"
#include "seqbench/runner/report.hpp"
#include "seqbench/runner/runner.hpp"

namespace {

using namespace seqbench;
namespace fs = std::filesystem;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kRunFailure = 3 };

int cmd_preprocess(const std::string& name, const std::string& format_arg, const fs::path& in, const fs::path& out) {
  data::DatasetFormat format{};
  if (!format_arg.empty()) {
    format = data::parse_format(format_arg);
  } else if (!runner::infer_format(name, format)) {
    throw UsageError("cannot infer the format of dataset '" + name + "'; pass --format");
  }
  const data::SequenceData seqs = data::preprocess(format, in);
  data::write_canonical(seqs, out);
  std::cout << name << ": " << seqs.users.size() << " users, " << seqs.num_items() << " items, "
            << seqs.num_interactions() << " interactions -> " << out.string() << "\n";
  return kOk;
}

int cmd_run(const fs::path& config_path, std::size_t parallel, bool resume) {
  const runner::ExperimentConfig config = runner::load_config(config_path);
  runner::RunOptions options;
  options.parallel = parallel;
  options.resume = resume;
  options.log = &std::cerr;
  const runner::PlanSummary s = runner::run_plan(config, options);
  std::cerr << "plan: " << s.planned << " points, " << s.completed << " completed, " << s.skipped << " skipped, "
            << s.failed << " failed\n";
  return s.failed ? kRunFailure : kOk;
}

int cmd_eval(const fs::path& checkpoint, const fs::path& dataset, const std::string& neg, const std::string& phase,
             std::optional<std::uint64_t> seed) {
  const models::LoadedCheckpoint ckpt = models::load_checkpoint(checkpoint);
  const data::SequenceData seqs = data::read_canonical(dataset);
  if (seqs.num_items() != ckpt.model->num_items())
    throw DataError("checkpoint was trained on " + std::to_string(ckpt.model->num_items()) + " items but '" +
                    dataset.string() + "' has " + std::to_string(seqs.num_items()));
  const data::SplitDataset split = data::leave_one_out_split(seqs);
  eval::EvalOptions o;
  if (neg == "all") {
    o.m_neg = eval::kAllItems;
  } else {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(neg, &used);
      if (used != neg.size() || v < 1) throw std::invalid_argument(neg);
      o.m_neg = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw UsageError("--neg expects a positive integer or 'all', got '" + neg + "'");
    }
  }
  if (phase == "validation") {
    o.phase = eval::Phase::kValidation;
  } else if (phase != "test") {
    throw UsageError("--phase expects test or validation");
  }
  o.seed = seed ? *seed : ckpt.metadata.value("seed", std::uint64_t{0});
  const eval::MetricReport r = eval::evaluate(*ckpt.model, split, o);
  nlohmann::json j = {{"model", models::family_name(ckpt.model->family())},
                      {"phase", phase},
                      {"users", r.users},
                      {"m_neg", neg == "all" ? nlohmann::json("all") : nlohmann::json(o.m_neg)},
                      {"seed", o.seed}};
  for (const auto& [k, m] : r.at)
    j["at"][std::to_string(k)] = {{"precision", m.precision}, {"recall", m.recall}, {"ndcg", m.ndcg}, {"map", m.map}};
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_report(const fs::path& results, const fs::path& out, bool no_delegate) {
  const runner::ReportOutcome r = runner::report(results, out, !no_delegate);
  if (r.delegated) return r.exit_code == 0 ? kOk : kRunFailure;
  std::cerr << "wrote " << r.markdown.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential recommender benchmark"};
  app.set_version_flag("--version", seqbench::runner::version_string());
  app.require_subcommand(1);

  std::string name, format, neg = "100", phase = "test";
  fs::path in, out, config, checkpoint, dataset, results;
  std::size_t parallel = 1;
  bool resume = false, no_delegate = false;
  std::optional<std::uint64_t> seed;

  auto* pre = app.add_subcommand("preprocess", "Parse, 5-core filter and write a canonical dataset directory");
  pre->add_option("--dataset", name, "Dataset name (ml-100k, ml-1m, ml-20m, beauty, fs-nyc, fs-tky, ...)")->required();
  pre->add_option("--in", in, "Raw interaction file")->required();
  pre->add_option("--out", out, "Output directory")->required();
  pre->add_option("--format", format, "movielens, amazon, foursquare or canonical (default: from the name)");

  auto* run = app.add_subcommand("run", "Run every point of an experiment config");
  run->add_option("--config", config, "YAML experiment config")->required();
  run->add_option("--parallel", parallel, "Concurrent points")->check(CLI::PositiveNumber);
  run->add_flag("--resume", resume, "Skip points that already completed in the output directory");

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a canonical dataset");
  ev->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  ev->add_option("--dataset", dataset, "Canonical dataset directory")->required();
  ev->add_option("--neg", neg, "Sampled negatives per user, or 'all'");
  ev->add_option("--phase", phase, "test or validation");
  ev->add_option("--seed", seed, "Negative-sampling seed (default: the checkpoint's training seed)");

  auto* rep = app.add_subcommand("report", "Render a results CSV");
  rep->add_option("--results", results, "results.csv")->required();
  rep->add_option("--out", out, "Output directory")->required();
  rep->add_flag("--no-delegate", no_delegate, "Always use the built-in markdown tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*pre) return cmd_preprocess(name, format, in, out);
    if (*run) return cmd_run(config, parallel, resume);
    if (*ev) return cmd_eval(checkpoint, dataset, neg, phase, seed);
    if (*rep) return cmd_report(results, out, no_delegate);
  } catch (const seqbench::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const seqbench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const seqbench::ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const seqbench::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const seqbench::VocabularyError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRunFailure;
  }
  return kUsage;
}
