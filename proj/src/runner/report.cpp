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

#include "seqbench/runner/report.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include "seqbench/common/errors.hpp"
#include "seqbench/models/model.hpp"

extern char** environ;

namespace seqbench::runner {
namespace {

constexpr const char* kColumns[] = {"P@10", "R@10", "NDCG@10", "MAP@10", "P@20", "R@20", "NDCG@20", "MAP@20"};

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

int model_rank(const std::string& name) {
  for (std::size_t i = 0; i < std::size(models::kAllFamilies); ++i)
    if (models::family_name(models::kAllFamilies[i]) == name) return static_cast<int>(i);
  return static_cast<int>(std::size(models::kAllFamilies));
}

struct Line {
  std::string model;
  std::size_t runs = 0;
  std::size_t params = 0;
  double values[8] = {};
};

}  // namespace

std::string markdown_tables(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::size_t, std::size_t>;
  std::map<Key, std::vector<const ResultRow*>> groups;
  for (const ResultRow& r : rows) groups[{r.dataset, r.emb, r.seqlen}].push_back(&r);

  std::string out;
  for (const auto& [key, members] : groups) {
    const auto& [dataset, emb, seqlen] = key;
    std::vector<Line> lines;
    for (const ResultRow* r : members) {
      auto it = std::find_if(lines.begin(), lines.end(), [&](const Line& l) { return l.model == r->model; });
      if (it == lines.end()) {
        lines.push_back({r->model});
        it = lines.end() - 1;
      }
      const double v[8] = {r->at10.precision, r->at10.recall, r->at10.ndcg, r->at10.map,
                           r->at20.precision, r->at20.recall, r->at20.ndcg, r->at20.map};
      for (int c = 0; c < 8; ++c) it->values[c] += v[c];
      it->params = r->params;
      ++it->runs;
    }
    for (Line& l : lines)
      for (double& v : l.values) v /= static_cast<double>(l.runs);
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
      return std::make_pair(model_rank(a.model), a.model) < std::make_pair(model_rank(b.model), b.model);
    });

    out += "## " + dataset + " (d=" + std::to_string(emb) + ", L=" + std::to_string(seqlen) + ")\n\n";
    out += "| Model |";
    for (const char* c : kColumns) out += std::string(" ") + c + " |";
    out += " Params | Runs |\n|---|";
    for (std::size_t c = 0; c < std::size(kColumns); ++c) out += "---:|";
    out += "---:|---:|\n";

    // Ranks use the displayed (rounded) values so that equal cells get equal marks.
    std::vector<std::set<std::string, std::greater<>>> distinct(8);
    for (const Line& l : lines)
      for (int c = 0; c < 8; ++c) distinct[c].insert(fixed4(l.values[c]));
    for (const Line& l : lines) {
      out += "| " + l.model + " |";
      for (int c = 0; c < 8; ++c) {
        const std::string cell = fixed4(l.values[c]);
        auto it = distinct[c].begin();
        if (cell == *it) {
          out += " **" + cell + "** |";
        } else if (++it != distinct[c].end() && cell == *it) {
          out += " <u>" + cell + "</u> |";
        } else {
          out += " " + cell + " |";
        }
      }
      out += " " + std::to_string(l.params) + " | " + std::to_string(l.runs) + " |\n";
    }
    out += "\n";
  }
  if (out.empty()) out = "No results.\n";
  return out;
}

std::optional<std::filesystem::path> find_on_path(const std::string& program) {
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::string dirs(path);
  std::size_t start = 0;
  while (start <= dirs.size()) {
    std::size_t end = dirs.find(':', start);
    if (end == std::string::npos) end = dirs.size();
    const std::filesystem::path candidate = std::filesystem::path(dirs.substr(start, end - start)) / program;
    if (!candidate.parent_path().empty() && ::access(candidate.c_str(), X_OK) == 0) return candidate;
    start = end + 1;
  }
  return std::nullopt;
}

ReportOutcome report(const std::filesystem::path& results, const std::filesystem::path& out, bool delegate) {
  ReportOutcome outcome;
  if (delegate) {
    if (const auto exe = find_on_path("seqbench-report")) {
      std::vector<std::string> args = {exe->string(), "--results", results.string(), "--out", out.string()};
      std::vector<char*> argv;
      for (auto& a : args) argv.push_back(a.data());
      argv.push_back(nullptr);
      pid_t pid = 0;
      if (::posix_spawn(&pid, exe->c_str(), nullptr, nullptr, argv.data(), environ) != 0)
        throw Error("cannot start " + exe->string());
      int status = 0;
      ::waitpid(pid, &status, 0);
      outcome.delegated = true;
      outcome.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 1;
      return outcome;
    }
  }
  const std::vector<ResultRow> rows = read_results(results);
  std::filesystem::create_directories(out);
  outcome.markdown = out / "results.md";
  std::ofstream md(outcome.markdown);
  md << markdown_tables(rows);
  if (!md) throw DataError("cannot write '" + outcome.markdown.string() + "'");
  return outcome;
}

}  // namespace seqbench::runner
