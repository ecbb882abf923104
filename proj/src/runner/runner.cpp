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

#include "seqbench/runner/runner.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "seqbench/common/errors.hpp"
#include "seqbench/common/hash.hpp"
#include "seqbench/common/rng.hpp"
#include "seqbench/data/canonical.hpp"
#include "seqbench/models/checkpoint.hpp"
#include "seqbench/train/trainer.hpp"

#ifndef SEQBENCH_VERSION
#define SEQBENCH_VERSION "0.0.0"
#endif
#ifndef SEQBENCH_GIT_REV
#define SEQBENCH_GIT_REV "unknown"
#endif

namespace seqbench::runner {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Bump when parsing, filtering or sequence construction changes output.
constexpr std::string_view kPipelineVersion = "5core-fixpoint-v1";

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

json metrics_json(const eval::MetricReport& r) {
  json at = json::object();
  for (const auto& [k, m] : r.at)
    at[std::to_string(k)] = {{"precision", m.precision}, {"recall", m.recall}, {"ndcg", m.ndcg}, {"map", m.map}};
  return {{"at", at}, {"users", r.users}, {"m_neg", r.m_neg}, {"seed", r.seed}};
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    if (!out) throw DataError("cannot write '" + path.string() + "'");
  }
  fs::rename(tmp, path);
}

bool completed(const fs::path& run_dir) {
  std::ifstream in(run_dir / "record.json");
  if (!in) return false;
  try {
    return json::parse(in).value("status", "") == "ok";
  } catch (const json::exception&) {
    return false;
  }
}

class Log {
 public:
  explicit Log(std::ostream* out) : out_(out) {}
  void operator()(const std::string& line) {
    if (!out_) return;
    std::lock_guard<std::mutex> lock(mu_);
    *out_ << line << std::endl;
  }

 private:
  std::ostream* out_;
  std::mutex mu_;
};

}  // namespace

std::string version_string() { return std::string(SEQBENCH_VERSION) + " (" + SEQBENCH_GIT_REV + ")"; }

std::uint64_t point_seed(std::uint64_t base, models::Family family, std::size_t d, std::size_t length, int replicate) {
  const std::string name = std::string(models::family_name(family)) + "/d" + std::to_string(d) + "/L" + std::to_string(length);
  return derive_seed(base, name, static_cast<std::uint64_t>(replicate));
}

std::vector<RunPoint> make_plan(const ExperimentConfig& c) {
  std::vector<RunPoint> plan;
  for (models::Family f : c.models)
    for (std::size_t d : c.emb)
      for (std::size_t L : c.seqlen)
        for (int r = 0; r < c.replicates; ++r) plan.push_back({f, d, L, r, point_seed(c.seed, f, d, L, r)});
  return plan;
}

PreparedDataset prepare_dataset(const DatasetSpec& spec, const fs::path& cache_dir) {
  PreparedDataset out;
  if (spec.format == data::DatasetFormat::kCanonical) {
    out.dir = spec.path;
    out.content_hash = sha256_hex(sha256_file_hex(spec.path / "interactions.tsv") + sha256_file_hex(spec.path / "vocab.tsv"));
    out.data = data::read_canonical(spec.path);
    out.from_cache = true;
    return out;
  }
  const std::string raw_hash = sha256_file_hex(spec.path);
  out.content_hash = sha256_hex(std::string(data::format_name(spec.format)) + "\n" + std::string(kPipelineVersion) + "\n" + raw_hash);
  out.dir = cache_dir / out.content_hash.substr(0, 16);
  if (fs::exists(out.dir / "interactions.tsv")) {
    out.data = data::read_canonical(out.dir);
    out.from_cache = true;
    return out;
  }
  out.data = data::preprocess(spec.format, spec.path);
  fs::create_directories(cache_dir);
  const fs::path tmp = out.dir.string() + ".tmp" + std::to_string(::getpid());
  fs::remove_all(tmp);
  data::write_canonical(out.data, tmp);
  const json source = {{"name", spec.name},
                       {"format", data::format_name(spec.format)},
                       {"raw_path", spec.path.string()},
                       {"raw_sha256", raw_hash},
                       {"pipeline", kPipelineVersion},
                       {"users", out.data.users.size()},
                       {"items", out.data.num_items()},
                       {"interactions", out.data.num_interactions()}};
  std::ofstream(tmp / "source.json") << source.dump(2) << "\n";
  std::error_code ec;
  fs::rename(tmp, out.dir, ec);
  if (ec) fs::remove_all(tmp);  // another process finished first
  return out;
}

json point_snapshot(const ExperimentConfig& c, const RunPoint& p, const std::string& dataset_hash) {
  models::ModelConfig mc = c.model;
  mc.family = p.family;
  mc.d = p.d;
  mc.length = p.length;
  const train::TrainConfig& t = c.train;
  return {
      {"dataset", {{"name", c.dataset.name}, {"format", data::format_name(c.dataset.format)}, {"content_hash", dataset_hash}}},
      {"model", models::config_to_json(mc)},
      {"train",
       {{"epochs", t.epochs},
        {"batch_size", t.batch_size},
        {"m_neg", t.m_neg_train},
        {"lr", t.lr},
        {"grad_clip", t.grad_clip},
        {"val_metric", t.val_metric},
        {"validate_every", t.validate_every},
        {"patience", t.patience},
        {"seq2item_batching", seq2item_batching_name(t.seq2item_batching)}}},
      {"eval",
       {{"m_neg", c.eval.m_neg == eval::kAllItems ? json("all") : json(c.eval.m_neg)},
        {"ties", c.eval.ties == eval::TieRule::kPessimistic ? "pessimistic" : "optimistic"}}},
      {"emissions",
       {{"device_power_watts", c.emissions.device_power_watts},
        {"carbon_intensity_kg_per_kwh", c.emissions.carbon_intensity_kg_per_kwh}}},
      {"base_seed", c.seed},
      {"replicate", p.replicate},
      {"seed", p.seed}};
}

std::string run_id(const json& snapshot) { return sha256_hex(snapshot.dump()).substr(0, 16); }

ResultRow RunRecord::row(const std::string& dataset) const {
  ResultRow r;
  r.dataset = dataset;
  r.model = models::family_name(point.family);
  r.emb = point.d;
  r.seqlen = point.length;
  r.params = params;
  r.at10 = test.at.count(10) ? test.at.at(10) : eval::Metrics{};
  r.at20 = test.at.count(20) ? test.at.at(20) : eval::Metrics{};
  r.kwh = emissions.energy_kwh;
  r.co2kg = emissions.co2eq_kg;
  r.seconds = emissions.elapsed_seconds;
  return r;
}

json RunRecord::to_json() const {
  json j = {{"run_id", run_id},
            {"status", ok ? "ok" : "failed"},
            {"version", version_string()},
            {"started_at", started_at},
            {"finished_at", finished_at},
            {"config", snapshot}};
  if (ok) {
    j["test"] = metrics_json(test);
    j["params"] = params;
    j["best_epoch"] = best_epoch;
    j["emissions"] = {{"seconds", emissions.elapsed_seconds},
                      {"kwh", emissions.energy_kwh},
                      {"co2kg", emissions.co2eq_kg},
                      {"timing_valid", emissions.timing_valid}};
  } else {
    j["error"] = error;
  }
  return j;
}

RunRecord run_point(const ExperimentConfig& c, const RunPoint& p, const PreparedDataset& dataset,
                    const data::SplitDataset& split, const fs::path& run_dir) {
  RunRecord rec;
  rec.point = p;
  rec.snapshot = point_snapshot(c, p, dataset.content_hash);
  rec.run_id = run_id(rec.snapshot);
  rec.started_at = utc_now();
  try {
    models::ModelConfig mc = c.model;
    mc.family = p.family;
    mc.d = p.d;
    mc.length = p.length;
    train::TrainConfig tc = c.train;
    tc.seed = p.seed;
    train::TrainHooks hooks;
    if (c.checkpoints) hooks.checkpoint = run_dir / "best.ckpt";
    auto [outcome, report] = emissions::track(
        [&] {
          train::TrainResult result = train::train(mc, split, tc, c.emissions, hooks);
          eval::EvalOptions eo;
          eo.phase = eval::Phase::kTest;
          eo.m_neg = c.eval.m_neg;
          eo.seed = p.seed;
          eo.ties = c.eval.ties;
          eo.batch_size = c.eval.batch_size;
          eval::MetricReport test = eval::evaluate(*result.model, split, eo);
          return std::make_pair(std::move(result), std::move(test));
        },
        c.emissions);
    outcome.first.history.write_csv(run_dir / "history.csv");
    rec.test = std::move(outcome.second);
    rec.params = outcome.first.model->count_params();
    rec.best_epoch = outcome.first.history.best_epoch;
    rec.emissions = report;
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.finished_at = utc_now();
  return rec;
}

PlanSummary run_plan(const ExperimentConfig& c, const RunOptions& options) {
  Log log(options.log);
  fs::create_directories(c.output / "runs");
  write_text(c.output / "config.resolved.yaml", dump_config(c));
  const fs::path results = c.output / "results.csv";
  const fs::path failures = c.output / "failures.csv";
  ensure_csv(results, kResultsHeader);

  const PreparedDataset dataset = prepare_dataset(c.dataset, c.cache());
  log("dataset " + c.dataset.name + ": " + std::to_string(dataset.data.users.size()) + " users, " +
      std::to_string(dataset.data.num_items()) + " items, " + std::to_string(dataset.data.num_interactions()) +
      " interactions" + (dataset.from_cache ? " (cached)" : ""));
  const data::SplitDataset split = data::leave_one_out_split(dataset.data);

  PlanSummary summary;
  const std::vector<RunPoint> plan = make_plan(c);
  summary.planned = plan.size();
  std::vector<RunPoint> todo;
  for (const RunPoint& p : plan) {
    const std::string id = run_id(point_snapshot(c, p, dataset.content_hash));
    if (completed(c.output / "runs" / id)) {
      if (!options.resume)
        throw ConfigError("run " + id + " already completed in '" + c.output.string() + "'; pass --resume to skip finished points");
      ++summary.skipped;
    } else {
      todo.push_back(p);
    }
  }
  if (summary.skipped) log("resume: skipping " + std::to_string(summary.skipped) + " completed points");

  std::vector<RunRecord> records(todo.size());
  std::atomic<std::size_t> next{0};
  std::mutex write_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      const RunPoint& p = todo[i];
      const std::string id = run_id(point_snapshot(c, p, dataset.content_hash));
      const fs::path dir = c.output / "runs" / id;
      fs::create_directories(dir);
      const std::string label = std::string(models::family_name(p.family)) + " d=" + std::to_string(p.d) +
                                " L=" + std::to_string(p.length) + " rep=" + std::to_string(p.replicate);
      log("[" + std::to_string(i + 1) + "/" + std::to_string(todo.size()) + "] " + label + " (" + id + ")");
      RunRecord rec = run_point(c, p, dataset, split, dir);
      write_text(dir / "record.json", rec.to_json().dump(2) + "\n");
      if (rec.ok) {
        append_csv_line(results, kResultsHeader, format_row(rec.row(c.dataset.name)));
        std::ostringstream msg;
        msg << "  " << label << ": ndcg@10 " << std::fixed << std::setprecision(4) << rec.test.at[10].ndcg
            << ", recall@10 " << rec.test.at[10].recall << ", " << std::setprecision(1) << rec.emissions.elapsed_seconds
            << " s";
        log(msg.str());
      } else {
        append_csv_line(failures, kFailuresHeader,
                        id + "," + c.dataset.name + "," + std::string(models::family_name(p.family)) + "," +
                            std::to_string(p.d) + "," + std::to_string(p.length) + "," + std::to_string(p.replicate) +
                            "," + std::to_string(p.seed) + "," + csv_quote(rec.error));
        log("  " + label + " failed: " + rec.error);
      }
      std::lock_guard<std::mutex> lock(write_mu);
      records[i] = std::move(rec);
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.parallel, todo.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (RunRecord& r : records) (r.ok ? summary.completed : summary.failed)++;
  summary.records = std::move(records);
  return summary;
}

}  // namespace seqbench::runner
