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

#ifndef SEQBENCH_RUNNER_REPORT_HPP_
#define SEQBENCH_RUNNER_REPORT_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seqbench/runner/results.hpp"

namespace seqbench::runner {

// One table per (dataset, emb, seqlen), models as rows and the eight ranking
// metrics as columns. Replicate rows of one model are averaged. Per column the
// best displayed value is bold and the second best underlined; equal values
// share the mark.
std::string markdown_tables(const std::vector<ResultRow>& rows);

struct ReportOutcome {
  bool delegated = false;
  int exit_code = 0;
  std::filesystem::path markdown;  // set when the built-in tables were written
};

// Runs `seqbench-report --results <csv> --out <dir>` when that program is on
// PATH (and delegate is true); otherwise writes <out>/results.md.
ReportOutcome report(const std::filesystem::path& results, const std::filesystem::path& out, bool delegate = true);

std::optional<std::filesystem::path> find_on_path(const std::string& program);

}  // namespace seqbench::runner

#endif  // SEQBENCH_RUNNER_REPORT_HPP_
