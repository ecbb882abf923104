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

#ifndef SEQBENCH_RUNNER_RESULTS_HPP_
#define SEQBENCH_RUNNER_RESULTS_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "seqbench/eval/metrics.hpp"

namespace seqbench::runner {

inline constexpr std::string_view kResultsHeader =
    "dataset,model,emb,seqlen,params,p10,r10,ndcg10,map10,p20,r20,ndcg20,map20,kwh,co2kg,seconds";
inline constexpr std::string_view kFailuresHeader = "run_id,dataset,model,emb,seqlen,replicate,seed,error";

struct ResultRow {
  std::string dataset;
  std::string model;
  std::size_t emb = 0;
  std::size_t seqlen = 0;
  std::size_t params = 0;
  eval::Metrics at10;
  eval::Metrics at20;
  double kwh = 0.0;
  double co2kg = 0.0;
  double seconds = 0.0;
};

// Doubles use the shortest representation that reads back exactly.
std::string format_row(const ResultRow& row);
ResultRow parse_row(std::string_view line);  // DataError on malformed rows

// Header line check plus every row; a missing file is a DataError.
std::vector<ResultRow> read_results(const std::filesystem::path& path);

// Creates the file with just the header if it does not exist yet.
void ensure_csv(const std::filesystem::path& path, std::string_view header);

// Appends one line under an exclusive advisory lock on the file, writing the
// header first when the file is empty.
void append_csv_line(const std::filesystem::path& path, std::string_view header, std::string_view line);

// CSV field quoting for free text.
std::string csv_quote(std::string_view field);

}  // namespace seqbench::runner

#endif  // SEQBENCH_RUNNER_RESULTS_HPP_
