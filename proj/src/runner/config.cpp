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

#include "seqbench/runner/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "seqbench/common/errors.hpp"

namespace seqbench::runner {
namespace {

const std::vector<std::string> kTopKeys = {"dataset", "models", "emb", "seqlen", "replicates", "seed", "output",
                                           "cache_dir", "checkpoints", "model", "train", "eval", "emissions"};
const std::vector<std::string> kDatasetKeys = {"name", "format", "path"};
const std::vector<std::string> kModelKeys = {"layers", "heads", "dropout", "mask_prob"};
const std::vector<std::string> kTrainKeys = {"epochs",   "batch_size",     "m_neg",    "lr",
                                             "grad_clip", "val_metric",    "validate_every",
                                             "patience", "seq2item_batching"};
const std::vector<std::string> kEvalKeys = {"m_neg", "ties", "batch_size"};
const std::vector<std::string> kEmissionsKeys = {"device_power_watts", "carbon_intensity_kg_per_kwh"};

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& key, const std::string& msg) const {
    std::string where = source_;
    if (at.IsDefined() && at.Mark().line >= 0) where += ":" + std::to_string(at.Mark().line + 1);
    throw ConfigError(where + ": " + key + ": " + msg);
  }

  void check_keys(const YAML::Node& map, const std::string& section, const std::vector<std::string>& allowed) const {
    if (!map.IsMap()) fail(map, section.empty() ? "config" : section, "expected a mapping");
    for (const auto& kv : map) {
      const std::string key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
      std::string msg = "unknown key '" + key + "'";
      const std::string near = closest_key(key, allowed);
      if (!near.empty()) msg += " (did you mean '" + near + "'?)";
      fail(kv.first, section.empty() ? key : section + "." + key, msg + "; valid keys: " + join(allowed));
    }
  }

  std::string str(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(n, key, "expected a scalar");
    return n.as<std::string>();
  }

  long long integer(const YAML::Node& n, const std::string& key, long long lo) const {
    const std::string s = str(n, key);
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail(n, key, "expected an integer, got '" + s + "'");
    if (v < lo) fail(n, key, "must be at least " + std::to_string(lo));
    return v;
  }

  double real(const YAML::Node& n, const std::string& key) const {
    const std::string s = str(n, key);
    double v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail(n, key, "expected a number, got '" + s + "'");
    return v;
  }

  bool boolean(const YAML::Node& n, const std::string& key) const {
    const std::string s = str(n, key);
    if (s == "true") return true;
    if (s == "false") return false;
    fail(n, key, "expected true or false, got '" + s + "'");
  }

  std::vector<YAML::Node> list(const YAML::Node& n, const std::string& key) const {
    std::vector<YAML::Node> out;
    if (n.IsScalar()) {
      out.push_back(n);
    } else if (n.IsSequence()) {
      for (const auto& e : n) out.push_back(e);
    } else {
      fail(n, key, "expected a value or a list");
    }
    if (out.empty()) fail(n, key, "must not be empty");
    return out;
  }

  std::vector<std::size_t> sizes(const YAML::Node& n, const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& e : list(n, key)) {
      const auto v = static_cast<std::size_t>(integer(e, key, 1));
      if (std::find(out.begin(), out.end(), v) != out.end()) fail(e, key, "duplicate value " + std::to_string(v));
      out.push_back(v);
    }
    return out;
  }

  template <typename Fn>
  void wrap(const YAML::Node& n, const std::string& key, Fn&& fn) const {
    try {
      fn();
    } catch (const ConfigError& e) {
      fail(n, key, e.what());
    }
  }

 private:
  std::string source_;
};

data::BatchMode parse_seq2item_batching(const std::string& s) {
  if (s == "last") return data::BatchMode::kLastStep;
  if (s == "packed") return data::BatchMode::kPrefixPacked;
  if (s == "pairs") return data::BatchMode::kSeq2Item;
  throw ConfigError("expected last, packed or pairs, got '" + s + "'");
}

void check_dataset_path(const DatasetSpec& d, const Reader& r, const YAML::Node& at) {
  namespace fs = std::filesystem;
  if (d.format == data::DatasetFormat::kCanonical) {
    if (!fs::exists(d.path / "interactions.tsv"))
      r.fail(at, "dataset.path", "no canonical dataset at '" + d.path.string() + "'");
  } else if (!fs::is_regular_file(d.path)) {
    r.fail(at, "dataset.path", "file '" + d.path.string() + "' does not exist");
  }
}

}  // namespace

std::string closest_key(std::string_view key, const std::vector<std::string>& candidates) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::string out;
  for (const auto& c : candidates) {
    std::vector<std::size_t> prev(c.size() + 1), cur(c.size() + 1);
    for (std::size_t j = 0; j <= c.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= key.size(); ++i) {
      cur[0] = i;
      for (std::size_t j = 1; j <= c.size(); ++j)
        cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (key[i - 1] == c[j - 1] ? 0 : 1)});
      std::swap(prev, cur);
    }
    if (prev[c.size()] < best) {
      best = prev[c.size()];
      out = c;
    }
  }
  // Accept at most a third of the key length in edits.
  return best <= std::max<std::size_t>(1, key.size() / 3) ? out : std::string();
}

bool infer_format(std::string_view name, data::DatasetFormat& format) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  if (n.rfind("ml-", 0) == 0 || n.rfind("movielens", 0) == 0) {
    format = data::DatasetFormat::kMovielens;
  } else if (n == "beauty" || n.rfind("amazon", 0) == 0) {
    format = data::DatasetFormat::kAmazon;
  } else if (n.rfind("fs-", 0) == 0 || n.rfind("foursquare", 0) == 0) {
    format = data::DatasetFormat::kFoursquare;
  } else {
    return false;
  }
  return true;
}

std::string_view seq2item_batching_name(data::BatchMode mode) {
  switch (mode) {
    case data::BatchMode::kLastStep: return "last";
    case data::BatchMode::kPrefixPacked: return "packed";
    case data::BatchMode::kSeq2Item: return "pairs";
    default: return "?";
  }
}

ExperimentConfig parse_config(std::string_view yaml, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  const Reader r(source);
  if (root.IsNull()) r.fail(root, "config", "empty document");
  r.check_keys(root, "", kTopKeys);
  ExperimentConfig c;

  const YAML::Node ds = root["dataset"];
  if (!ds) r.fail(root, "dataset", "required");
  r.check_keys(ds, "dataset", kDatasetKeys);
  if (!ds["name"]) r.fail(ds, "dataset.name", "required");
  if (!ds["path"]) r.fail(ds, "dataset.path", "required");
  c.dataset.name = r.str(ds["name"], "dataset.name");
  c.dataset.path = r.str(ds["path"], "dataset.path");
  if (ds["format"]) {
    r.wrap(ds["format"], "dataset.format",
           [&] { c.dataset.format = data::parse_format(r.str(ds["format"], "dataset.format")); });
  } else if (!infer_format(c.dataset.name, c.dataset.format)) {
    r.fail(ds, "dataset.format", "required for dataset '" + c.dataset.name + "'");
  }

  if (!root["models"]) r.fail(root, "models", "required");
  for (const auto& n : r.list(root["models"], "models")) {
    models::Family f{};
    r.wrap(n, "models", [&] { f = models::parse_family(r.str(n, "models")); });
    if (std::find(c.models.begin(), c.models.end(), f) != c.models.end()) r.fail(n, "models", "duplicate model");
    c.models.push_back(f);
  }
  if (root["emb"]) c.emb = r.sizes(root["emb"], "emb");
  if (root["seqlen"]) c.seqlen = r.sizes(root["seqlen"], "seqlen");
  if (root["replicates"]) c.replicates = static_cast<int>(r.integer(root["replicates"], "replicates", 1));
  if (root["seed"]) c.seed = static_cast<std::uint64_t>(r.integer(root["seed"], "seed", 0));
  if (root["output"]) c.output = r.str(root["output"], "output");
  if (root["cache_dir"]) c.cache_dir = r.str(root["cache_dir"], "cache_dir");
  if (root["checkpoints"]) c.checkpoints = r.boolean(root["checkpoints"], "checkpoints");

  if (const YAML::Node m = root["model"]) {
    r.check_keys(m, "model", kModelKeys);
    if (m["layers"]) c.model.layers = static_cast<std::size_t>(r.integer(m["layers"], "model.layers", 1));
    if (m["heads"]) c.model.heads = static_cast<std::size_t>(r.integer(m["heads"], "model.heads", 1));
    if (m["dropout"]) c.model.dropout = r.real(m["dropout"], "model.dropout");
    if (m["mask_prob"]) c.model.mask_prob = r.real(m["mask_prob"], "model.mask_prob");
  }
  if (const YAML::Node t = root["train"]) {
    r.check_keys(t, "train", kTrainKeys);
    if (t["epochs"]) c.train.epochs = static_cast<int>(r.integer(t["epochs"], "train.epochs", 1));
    if (t["batch_size"]) c.train.batch_size = static_cast<std::size_t>(r.integer(t["batch_size"], "train.batch_size", 1));
    if (t["m_neg"]) c.train.m_neg_train = static_cast<std::size_t>(r.integer(t["m_neg"], "train.m_neg", 1));
    if (t["lr"]) c.train.lr = r.real(t["lr"], "train.lr");
    if (t["grad_clip"]) c.train.grad_clip = r.real(t["grad_clip"], "train.grad_clip");
    if (t["val_metric"]) c.train.val_metric = r.str(t["val_metric"], "train.val_metric");
    if (t["validate_every"])
      c.train.validate_every = static_cast<int>(r.integer(t["validate_every"], "train.validate_every", 1));
    if (t["patience"]) c.train.patience = static_cast<int>(r.integer(t["patience"], "train.patience", 0));
    if (t["seq2item_batching"])
      r.wrap(t["seq2item_batching"], "train.seq2item_batching", [&] {
        c.train.seq2item_batching = parse_seq2item_batching(r.str(t["seq2item_batching"], "train.seq2item_batching"));
      });
  }
  if (const YAML::Node e = root["eval"]) {
    r.check_keys(e, "eval", kEvalKeys);
    if (e["m_neg"]) {
      c.eval.m_neg = r.str(e["m_neg"], "eval.m_neg") == "all"
                         ? eval::kAllItems
                         : static_cast<std::size_t>(r.integer(e["m_neg"], "eval.m_neg", 1));
    }
    if (e["ties"]) {
      const std::string s = r.str(e["ties"], "eval.ties");
      if (s == "pessimistic") {
        c.eval.ties = eval::TieRule::kPessimistic;
      } else if (s == "optimistic") {
        c.eval.ties = eval::TieRule::kOptimistic;
      } else {
        r.fail(e["ties"], "eval.ties", "expected pessimistic or optimistic, got '" + s + "'");
      }
    }
    if (e["batch_size"]) c.eval.batch_size = static_cast<std::size_t>(r.integer(e["batch_size"], "eval.batch_size", 1));
  }
  if (const YAML::Node em = root["emissions"]) {
    r.check_keys(em, "emissions", kEmissionsKeys);
    if (em["device_power_watts"])
      c.emissions.device_power_watts = r.real(em["device_power_watts"], "emissions.device_power_watts");
    if (em["carbon_intensity_kg_per_kwh"])
      c.emissions.carbon_intensity_kg_per_kwh =
          r.real(em["carbon_intensity_kg_per_kwh"], "emissions.carbon_intensity_kg_per_kwh");
  }
  c.train.m_neg_eval = c.eval.m_neg;

  r.wrap(root["train"], "train", [&] { c.train.validate(); });
  r.wrap(root["emissions"], "emissions", [&] { c.emissions.validate(); });
  for (models::Family f : c.models)
    for (std::size_t d : c.emb)
      for (std::size_t L : c.seqlen) {
        models::ModelConfig mc = c.model;
        mc.family = f;
        mc.d = d;
        mc.length = L;
        r.wrap(root["model"], "model", [&] { mc.validate(); });
      }
  check_dataset_path(c.dataset, r, ds["path"]);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string dump_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  auto seq = [&out](const auto& values, auto fmt) {
    out << YAML::Flow << YAML::BeginSeq;
    for (const auto& v : values) out << fmt(v);
    out << YAML::EndSeq;
  };
  out << YAML::BeginMap;
  out << YAML::Key << "dataset" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.dataset.name;
  out << YAML::Key << "format" << YAML::Value << std::string(data::format_name(c.dataset.format));
  out << YAML::Key << "path" << YAML::Value << c.dataset.path.string();
  out << YAML::EndMap;
  out << YAML::Key << "models" << YAML::Value;
  seq(c.models, [](models::Family f) { return std::string(models::family_name(f)); });
  out << YAML::Key << "emb" << YAML::Value;
  seq(c.emb, [](std::size_t v) { return std::to_string(v); });
  out << YAML::Key << "seqlen" << YAML::Value;
  seq(c.seqlen, [](std::size_t v) { return std::to_string(v); });
  out << YAML::Key << "replicates" << YAML::Value << std::to_string(c.replicates);
  out << YAML::Key << "seed" << YAML::Value << std::to_string(c.seed);
  out << YAML::Key << "output" << YAML::Value << c.output.string();
  out << YAML::Key << "cache_dir" << YAML::Value << c.cache().string();
  out << YAML::Key << "checkpoints" << YAML::Value << (c.checkpoints ? "true" : "false");

  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "layers" << YAML::Value << std::to_string(c.model.layers);
  out << YAML::Key << "heads" << YAML::Value << std::to_string(c.model.heads);
  out << YAML::Key << "dropout" << YAML::Value << number(c.model.dropout);
  out << YAML::Key << "mask_prob" << YAML::Value << number(c.model.mask_prob);
  out << YAML::EndMap;

  out << YAML::Key << "train" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "epochs" << YAML::Value << std::to_string(c.train.epochs);
  out << YAML::Key << "batch_size" << YAML::Value << std::to_string(c.train.batch_size);
  out << YAML::Key << "m_neg" << YAML::Value << std::to_string(c.train.m_neg_train);
  out << YAML::Key << "lr" << YAML::Value << number(c.train.lr);
  out << YAML::Key << "grad_clip" << YAML::Value << number(c.train.grad_clip);
  out << YAML::Key << "val_metric" << YAML::Value << c.train.val_metric;
  out << YAML::Key << "validate_every" << YAML::Value << std::to_string(c.train.validate_every);
  out << YAML::Key << "patience" << YAML::Value << std::to_string(c.train.patience);
  out << YAML::Key << "seq2item_batching" << YAML::Value << std::string(seq2item_batching_name(c.train.seq2item_batching));
  out << YAML::EndMap;

  out << YAML::Key << "eval" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "m_neg" << YAML::Value << (c.eval.m_neg == eval::kAllItems ? "all" : std::to_string(c.eval.m_neg));
  out << YAML::Key << "ties" << YAML::Value << (c.eval.ties == eval::TieRule::kPessimistic ? "pessimistic" : "optimistic");
  out << YAML::Key << "batch_size" << YAML::Value << std::to_string(c.eval.batch_size);
  out << YAML::EndMap;

  out << YAML::Key << "emissions" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "device_power_watts" << YAML::Value << number(c.emissions.device_power_watts);
  out << YAML::Key << "carbon_intensity_kg_per_kwh" << YAML::Value << number(c.emissions.carbon_intensity_kg_per_kwh);
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace seqbench::runner
