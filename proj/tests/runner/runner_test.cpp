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

#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "seqbench/common/errors.hpp"
#include "seqbench/common/rng.hpp"
#include "seqbench/runner/config.hpp"
#include "seqbench/runner/report.hpp"
#include "seqbench/runner/results.hpp"
#include "seqbench/runner/runner.hpp"

namespace seqbench::runner {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("seqbench_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// 40 users with 10 to 14 ratings each over 30 items, MovieLens tab layout.
fs::path write_ratings(const fs::path& dir, std::uint64_t seed = 1) {
  RngStream rng(seed);
  const fs::path path = dir / "u.data";
  std::ofstream out(path);
  for (int u = 1; u <= 40; ++u) {
    int item = static_cast<int>(rng.below(30));
    for (int i = 0, n = 10 + static_cast<int>(rng.below(5)); i < n; ++i) {
      out << u << "\t" << item + 1 << "\t4\t" << 1000 * u + i << "\n";
      item = (item + 1 + static_cast<int>(rng.below(2))) % 30;
    }
  }
  return path;
}

std::string minimal_yaml(const fs::path& data, const fs::path& output, const std::string& extra = "") {
  return "dataset:\n  name: toy\n  format: movielens\n  path: " + data.string() + "\nmodels: [gru4rec]\noutput: " +
         output.string() + "\n" + extra;
}

std::string small_plan(const fs::path& data, const fs::path& output, const std::string& models = "[gru4rec]") {
  return "dataset:\n  name: toy\n  format: movielens\n  path: " + data.string() + "\nmodels: " + models +
         "\nemb: [8]\nseqlen: [6]\noutput: " + output.string() +
         "\ncheckpoints: false\nmodel:\n  layers: 1\ntrain:\n  epochs: 2\n  batch_size: 16\n  validate_every: 1\n"
         "eval:\n  m_neg: 10\n";
}

std::vector<std::string> lines_of(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string error_of(const std::string& yaml) {
  try {
    parse_config(yaml, "test.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, MinimalConfigResolvesDefaults) {
  TempDir tmp("config_min");
  const fs::path data = write_ratings(tmp.path());
  const ExperimentConfig c = parse_config(minimal_yaml(data, tmp.path() / "out"));
  EXPECT_EQ(c.models, std::vector<models::Family>{models::Family::kGru4Rec});
  EXPECT_EQ(c.emb, (std::vector<std::size_t>{32, 64, 128, 256, 512}));
  EXPECT_EQ(c.seqlen, (std::vector<std::size_t>{20, 50, 100, 200}));
  EXPECT_EQ(c.train.epochs, 400);
  EXPECT_EQ(c.eval.m_neg, 100u);
  EXPECT_EQ(c.train.m_neg_eval, 100u);
  EXPECT_EQ(c.replicates, 1);
  EXPECT_EQ(c.cache(), tmp.path() / "out" / "cache");
}

TEST(Config, EchoIsByteStable) {
  TempDir tmp("config_echo");
  const fs::path data = write_ratings(tmp.path());
  const std::string first = dump_config(parse_config(minimal_yaml(data, tmp.path() / "out", "train:\n  lr: 3e-4\n")));
  const std::string second = dump_config(parse_config(first));
  EXPECT_EQ(first, second);
  EXPECT_EQ(parse_config(first).train.lr, 3e-4);
}

TEST(Config, EmbListMakesCartesianPlan) {
  TempDir tmp("config_plan");
  const fs::path data = write_ratings(tmp.path());
  const ExperimentConfig c =
      parse_config(minimal_yaml(data, tmp.path() / "out", "emb: [32, 64]\nseqlen: 50\n") + "");
  EXPECT_EQ(make_plan(c).size(), 2u);
  ExperimentConfig two = c;
  two.models = {models::Family::kGru4Rec, models::Family::kSasRec};
  two.replicates = 3;
  EXPECT_EQ(make_plan(two).size(), 12u);
}

TEST(Config, MisspelledKeyNamesTheIntendedOne) {
  TempDir tmp("config_typo");
  const fs::path data = write_ratings(tmp.path());
  const std::string err = error_of(minimal_yaml(data, tmp.path(), "train:\n  epcohs: 3\n"));
  EXPECT_NE(err.find("epcohs"), std::string::npos) << err;
  EXPECT_NE(err.find("did you mean 'epochs'"), std::string::npos) << err;
  EXPECT_NE(err.find("test.yaml:"), std::string::npos) << err;
  EXPECT_NE(error_of(minimal_yaml(data, tmp.path(), "modles: [narm]\n")).find("'models'"), std::string::npos);
}

TEST(Config, RejectsBadValues) {
  TempDir tmp("config_bad");
  const fs::path data = write_ratings(tmp.path());
  const fs::path out = tmp.path() / "out";
  EXPECT_NE(error_of(minimal_yaml(data, out, "emb: []\n")), "");
  EXPECT_NE(error_of(minimal_yaml(data, out, "emb: [32, 32]\n")), "");
  EXPECT_NE(error_of(minimal_yaml(data, out, "emb: [-4]\n")), "");
  EXPECT_NE(error_of(minimal_yaml(data, out, "train:\n  epochs: many\n")), "");
  EXPECT_NE(error_of(minimal_yaml(data, out, "train:\n  seq2item_batching: windows\n")), "");
  EXPECT_NE(error_of(minimal_yaml(data, out, "eval:\n  ties: random\n")), "");
  EXPECT_NE(error_of(minimal_yaml(data, out, "checkpoints: maybe\n")), "");
  EXPECT_NE(error_of("dataset:\n  name: toy\n  format: movielens\n  path: " + data.string() + "\nmodels: [transformer]\n"), "");
  // Attention heads must divide d.
  EXPECT_NE(error_of("dataset:\n  name: toy\n  format: movielens\n  path: " + data.string() +
                     "\nmodels: [sasrec]\nemb: [33]\n"),
            "");
  EXPECT_EQ(error_of("dataset:\n  name: toy\n  format: movielens\n  path: " + data.string() +
                     "\nmodels: [gru4rec]\nemb: [33]\n"),
            "");
  EXPECT_NE(error_of(minimal_yaml(tmp.path() / "missing.data", out)).find("does not exist"), std::string::npos);
  EXPECT_NE(error_of("models: [gru4rec]\n").find("dataset"), std::string::npos);
}

TEST(Config, ParsesEveryKey) {
  TempDir tmp("config_all");
  const fs::path data = write_ratings(tmp.path());
  const ExperimentConfig c = parse_config(
      "dataset:\n  name: ml-100k\n  path: " + data.string() +
      "\nmodels: [narm, core]\nemb: 50\nseqlen: [100]\nreplicates: 2\nseed: 9\noutput: o\ncache_dir: cc\n"
      "checkpoints: false\nmodel:\n  layers: 3\n  heads: 5\n  dropout: 0.1\n  mask_prob: 0.3\n"
      "train:\n  epochs: 7\n  batch_size: 64\n  m_neg: 2\n  lr: 0.01\n  grad_clip: 0\n  val_metric: recall@20\n"
      "  validate_every: 3\n  patience: 4\n  seq2item_batching: pairs\n"
      "eval:\n  m_neg: all\n  ties: optimistic\n  batch_size: 32\n"
      "emissions:\n  device_power_watts: 120\n  carbon_intensity_kg_per_kwh: 0.25\n");
  EXPECT_EQ(c.dataset.format, data::DatasetFormat::kMovielens);  // inferred from the name
  EXPECT_EQ(c.models, (std::vector<models::Family>{models::Family::kNarm, models::Family::kCore}));
  EXPECT_EQ(c.emb, std::vector<std::size_t>{50});
  EXPECT_EQ(c.replicates, 2);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.cache(), fs::path("cc"));
  EXPECT_FALSE(c.checkpoints);
  EXPECT_EQ(c.model.layers, 3u);
  EXPECT_EQ(c.model.heads, 5u);
  EXPECT_EQ(c.model.mask_prob, 0.3);
  EXPECT_EQ(c.train.epochs, 7);
  EXPECT_EQ(c.train.m_neg_train, 2u);
  EXPECT_EQ(c.train.val_metric, "recall@20");
  EXPECT_EQ(c.train.patience, 4);
  EXPECT_EQ(c.train.seq2item_batching, data::BatchMode::kSeq2Item);
  EXPECT_EQ(c.eval.m_neg, eval::kAllItems);
  EXPECT_EQ(c.train.m_neg_eval, eval::kAllItems);
  EXPECT_EQ(c.eval.ties, eval::TieRule::kOptimistic);
  EXPECT_EQ(c.emissions.device_power_watts, 120.0);
  EXPECT_EQ(dump_config(parse_config(dump_config(c))), dump_config(c));
}

TEST(Config, ShippedConfigsParse) {
  // Dataset paths in the shipped files are relative to the source tree.
  const fs::path data = fs::path(SEQBENCH_SOURCE_DIR) / "data" / "ml-100k" / "u.data";
  if (!fs::exists(data)) GTEST_SKIP() << "ML-100k not fetched";
  for (const auto& [file, points] : {std::pair{"ml100k.yaml", 5u}, std::pair{"ml100k_sweep.yaml", 20u}}) {
    std::ifstream in(fs::path(SEQBENCH_SOURCE_DIR) / "configs" / file);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = std::regex_replace(ss.str(), std::regex("data/ml-100k/u.data"), data.string());
    const ExperimentConfig c = parse_config(text, file);
    EXPECT_EQ(make_plan(c).size(), points) << file;
  }
}

TEST(Config, ClosestKey) {
  const std::vector<std::string> keys = {"epochs", "batch_size", "lr"};
  EXPECT_EQ(closest_key("epcohs", keys), "epochs");
  EXPECT_EQ(closest_key("batchsize", keys), "batch_size");
  EXPECT_EQ(closest_key("temperature", keys), "");
}

TEST(Plan, SeedsDependOnlyOnTheirOwnPoint) {
  const std::uint64_t a = point_seed(7, models::Family::kSasRec, 64, 50, 0);
  EXPECT_EQ(a, point_seed(7, models::Family::kSasRec, 64, 50, 0));
  ExperimentConfig small, large;
  small.models = {models::Family::kSasRec};
  small.emb = {64};
  small.seqlen = {50};
  small.seed = large.seed = 7;
  large.models = {models::Family::kGru4Rec, models::Family::kSasRec};
  large.emb = {32, 64, 128};
  large.seqlen = {20, 50};
  large.replicates = 2;
  std::set<std::uint64_t> seeds;
  bool found = false;
  for (const RunPoint& p : make_plan(large)) {
    seeds.insert(p.seed);
    if (p.family == models::Family::kSasRec && p.d == 64 && p.length == 50 && p.replicate == 0) {
      EXPECT_EQ(p.seed, make_plan(small).at(0).seed);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(seeds.size(), make_plan(large).size());
}

TEST(Results, RowsRoundTripExactly) {
  RngStream rng(3);
  for (int i = 0; i < 200; ++i) {
    ResultRow r{"ml-100k", "sasrec", 64, 50, 123456, {}, {}};
    r.at10 = {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    r.at20 = {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    r.kwh = rng.uniform() * 1e-3;
    r.co2kg = rng.uniform() * 1e-7;
    r.seconds = rng.uniform(0, 1e5);
    const ResultRow back = parse_row(format_row(r));
    EXPECT_EQ(format_row(back), format_row(r));
    EXPECT_EQ(back.at10.ndcg, r.at10.ndcg);
    EXPECT_EQ(back.seconds, r.seconds);
  }
  EXPECT_THROW(parse_row("a,b,1"), DataError);
  EXPECT_THROW(parse_row("a,b,x,1,1,1,1,1,1,1,1,1,1,1,1,1"), DataError);
}

TEST(Results, EmptyRecordSetIsHeaderOnly) {
  TempDir tmp("results_empty");
  ensure_csv(tmp.path() / "r.csv", kResultsHeader);
  ensure_csv(tmp.path() / "r.csv", kResultsHeader);
  EXPECT_EQ(lines_of(tmp.path() / "r.csv"), std::vector<std::string>{std::string(kResultsHeader)});
  EXPECT_TRUE(read_results(tmp.path() / "r.csv").empty());
}

TEST(Results, ConcurrentAppendsStayWhole) {
  TempDir tmp("results_lock");
  const fs::path path = tmp.path() / "r.csv";
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < 50; ++i) {
        ResultRow r{"d", "m", static_cast<std::size_t>(t), static_cast<std::size_t>(i), 1, {}, {}};
        append_csv_line(path, kResultsHeader, format_row(r));
      }
    });
  for (auto& th : threads) th.join();
  const auto rows = read_results(path);
  EXPECT_EQ(rows.size(), 400u);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& r : rows) seen.insert({r.emb, r.seqlen});
  EXPECT_EQ(seen.size(), 400u);
}

TEST(Dataset, CacheIsContentAddressed) {
  TempDir tmp("cache");
  const fs::path a = write_ratings(tmp.path(), 1);
  DatasetSpec spec{"toy", data::DatasetFormat::kMovielens, a};
  const PreparedDataset first = prepare_dataset(spec, tmp.path() / "cache");
  EXPECT_FALSE(first.from_cache);
  const PreparedDataset second = prepare_dataset(spec, tmp.path() / "cache");
  EXPECT_TRUE(second.from_cache);
  EXPECT_EQ(first.content_hash, second.content_hash);
  EXPECT_EQ(first.data.num_interactions(), second.data.num_interactions());
  EXPECT_EQ(first.data.users.size(), second.data.users.size());

  // Same bytes under another name share the artifact; other bytes do not.
  fs::create_directories(tmp.path() / "copy");
  fs::copy_file(a, tmp.path() / "copy" / "u.data");
  spec.path = tmp.path() / "copy" / "u.data";
  EXPECT_EQ(prepare_dataset(spec, tmp.path() / "cache").content_hash, first.content_hash);
  fs::create_directories(tmp.path() / "other");
  spec.path = write_ratings(tmp.path() / "other", 2);
  EXPECT_NE(prepare_dataset(spec, tmp.path() / "cache").content_hash, first.content_hash);
}

TEST(RunPlan, SinglePointPopulatesEveryField) {
  TempDir tmp("plan_single");
  const ExperimentConfig c = parse_config(small_plan(write_ratings(tmp.path()), tmp.path() / "out"));
  const PlanSummary s = run_plan(c, {});
  ASSERT_EQ(s.completed, 1u);
  const auto rows = read_results(tmp.path() / "out" / "results.csv");
  ASSERT_EQ(rows.size(), 1u);
  const ResultRow& r = rows[0];
  EXPECT_EQ(r.dataset, "toy");
  EXPECT_EQ(r.model, "gru4rec");
  EXPECT_EQ(r.emb, 8u);
  EXPECT_EQ(r.seqlen, 6u);
  EXPECT_EQ(r.params, s.records[0].params);
  EXPECT_GT(r.params, 0u);
  EXPECT_GT(r.at10.recall, 0.0);
  EXPECT_NEAR(r.at10.precision * 10, r.at10.recall, 1e-12);
  EXPECT_GT(r.seconds, 0.0);
  EXPECT_GT(r.kwh, 0.0);
  EXPECT_NEAR(r.co2kg, r.kwh * c.emissions.carbon_intensity_kg_per_kwh, 1e-15);

  const fs::path run = tmp.path() / "out" / "runs" / s.records[0].run_id;
  std::ifstream rec(run / "record.json");
  const auto j = nlohmann::json::parse(rec);
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["config"]["seed"], s.records[0].point.seed);
  EXPECT_EQ(j["config"]["model"]["d"], 8);
  EXPECT_EQ(j["version"], version_string());
  EXPECT_TRUE(fs::exists(run / "history.csv"));
  EXPECT_TRUE(fs::exists(tmp.path() / "out" / "config.resolved.yaml"));
  EXPECT_EQ(run_id(j["config"]), s.records[0].run_id);
}

TEST(RunPlan, ResumeTrainsNothingNew) {
  TempDir tmp("plan_resume");
  const ExperimentConfig c = parse_config(small_plan(write_ratings(tmp.path()), tmp.path() / "out", "[gru4rec, narm]"));
  EXPECT_EQ(run_plan(c, {}).completed, 2u);
  EXPECT_THROW(run_plan(c, {}), ConfigError);
  RunOptions resume;
  resume.resume = true;
  const PlanSummary again = run_plan(c, resume);
  EXPECT_EQ(again.completed, 0u);
  EXPECT_EQ(again.skipped, 2u);
  EXPECT_EQ(read_results(tmp.path() / "out" / "results.csv").size(), 2u);
}

TEST(RunPlan, TwoPlansConcatenateWithoutDuplicates) {
  TempDir tmp("plan_concat");
  const fs::path data = write_ratings(tmp.path());
  run_plan(parse_config(small_plan(data, tmp.path() / "out", "[gru4rec]")), {});
  RunOptions resume;
  resume.resume = true;
  const PlanSummary s = run_plan(parse_config(small_plan(data, tmp.path() / "out", "[gru4rec, sasrec]")), resume);
  EXPECT_EQ(s.skipped, 1u);
  EXPECT_EQ(s.completed, 1u);
  const auto rows = read_results(tmp.path() / "out" / "results.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].model, "gru4rec");
  EXPECT_EQ(rows[1].model, "sasrec");
}

TEST(RunPlan, FailedPointsAreRecordedAndTheRestContinue) {
  TempDir tmp("plan_fail");
  // 200 training negatives cannot be drawn from a 30-item catalogue.
  std::string yaml = small_plan(write_ratings(tmp.path()), tmp.path() / "out", "[gru4rec, sasrec]");
  yaml = std::regex_replace(yaml, std::regex("epochs: 2"), "epochs: 2\n  m_neg: 200");
  const PlanSummary s = run_plan(parse_config(yaml), {});
  EXPECT_EQ(s.failed, 2u);
  EXPECT_EQ(s.completed, 0u);
  const auto failures = lines_of(tmp.path() / "out" / "failures.csv");
  ASSERT_EQ(failures.size(), 3u);
  EXPECT_EQ(failures[0], kFailuresHeader);
  EXPECT_NE(failures[1].find("cannot sample"), std::string::npos);
  EXPECT_TRUE(read_results(tmp.path() / "out" / "results.csv").empty());
  // Failed points are not "completed", so a resumed plan tries them again.
  RunOptions resume;
  resume.resume = true;
  EXPECT_EQ(run_plan(parse_config(yaml), resume).failed, 2u);
}

TEST(RunPlan, IdenticalConfigsGiveIdenticalMetrics) {
  TempDir tmp("plan_determinism");
  const fs::path data = write_ratings(tmp.path());
  const std::string models = "[gru4rec, narm, sasrec, bert4rec, core]";
  run_plan(parse_config(small_plan(data, tmp.path() / "a", models)), {});
  RunOptions parallel;
  parallel.parallel = 3;
  run_plan(parse_config(small_plan(data, tmp.path() / "b", models)), parallel);
  auto key = [](const ResultRow& r) {
    ResultRow k = r;
    k.kwh = k.co2kg = k.seconds = 0;
    return format_row(k);
  };
  std::set<std::string> a, b;
  for (const auto& r : read_results(tmp.path() / "a" / "results.csv")) a.insert(key(r));
  for (const auto& r : read_results(tmp.path() / "b" / "results.csv")) b.insert(key(r));
  EXPECT_EQ(a.size(), 5u);
  EXPECT_EQ(a, b);
}

ResultRow row(const std::string& model, double ndcg10, std::size_t emb = 50) {
  ResultRow r{"ml-100k", model, emb, 100, 1000, {}, {}};
  r.at10 = {ndcg10 / 10, ndcg10, ndcg10, ndcg10};
  r.at20 = {ndcg10 / 20, ndcg10, ndcg10, ndcg10};
  return r;
}

TEST(Report, SingleModelIsBoldEverywhere) {
  const std::string md = markdown_tables({row("gru4rec", 0.4)});
  EXPECT_NE(md.find("| gru4rec | **0.0400** | **0.4000** | **0.4000** |"), std::string::npos) << md;
}

TEST(Report, BestBoldSecondUnderlinedTiesShare) {
  const std::string md = markdown_tables({row("gru4rec", 0.4), row("narm", 0.3), row("core", 0.3), row("sasrec", 0.2)});
  EXPECT_NE(md.find("| gru4rec | **0.0400** | **0.4000**"), std::string::npos) << md;
  EXPECT_NE(md.find("| narm | <u>0.0300</u> | <u>0.3000</u>"), std::string::npos) << md;
  EXPECT_NE(md.find("| core | <u>0.0300</u>"), std::string::npos) << md;
  EXPECT_NE(md.find("| sasrec | 0.0200 | 0.2000"), std::string::npos) << md;
  // Rows follow the canonical model order.
  EXPECT_LT(md.find("| gru4rec"), md.find("| narm"));
  EXPECT_LT(md.find("| narm"), md.find("| sasrec"));
  EXPECT_LT(md.find("| sasrec"), md.find("| core"));
  const std::string tie = markdown_tables({row("gru4rec", 0.4), row("narm", 0.4)});
  EXPECT_NE(tie.find("| narm | **0.0400**"), std::string::npos) << tie;
}

TEST(Report, OneTablePerConfiguration) {
  const std::string md = markdown_tables({row("gru4rec", 0.4, 32), row("gru4rec", 0.5, 64), row("narm", 0.3, 64)});
  EXPECT_NE(md.find("## ml-100k (d=32, L=100)"), std::string::npos);
  EXPECT_NE(md.find("## ml-100k (d=64, L=100)"), std::string::npos);
  EXPECT_EQ(markdown_tables({}), "No results.\n");
}

TEST(Report, FallbackWritesMarkdown) {
  TempDir tmp("report");
  append_csv_line(tmp.path() / "r.csv", kResultsHeader, format_row(row("gru4rec", 0.4)));
  const ReportOutcome o = report(tmp.path() / "r.csv", tmp.path() / "out", false);
  EXPECT_FALSE(o.delegated);
  std::ifstream in(o.markdown);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), markdown_tables({row("gru4rec", 0.4)}));
}

}  // namespace
}  // namespace seqbench::runner
