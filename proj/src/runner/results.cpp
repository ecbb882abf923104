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

#include "seqbench/runner/results.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <charconv>
#include <fstream>

#include "seqbench/common/errors.hpp"

namespace seqbench::runner {
namespace {

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::string_view line) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw DataError("results row has a malformed number '" + std::string(s) + "': " + std::string(line));
  return v;
}

// RAII wrapper for an fd holding an exclusive flock.
class LockedFile {
 public:
  explicit LockedFile(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd_ < 0) throw DataError("cannot open '" + path.string() + "' for appending");
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw DataError("cannot lock '" + path.string() + "'");
    }
  }
  ~LockedFile() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  LockedFile(const LockedFile&) = delete;
  LockedFile& operator=(const LockedFile&) = delete;

  bool empty() const { return ::lseek(fd_, 0, SEEK_END) == 0; }
  void write_all(std::string_view s) const {
    while (!s.empty()) {
      const ssize_t n = ::write(fd_, s.data(), s.size());
      if (n <= 0) throw DataError("short write to results file");
      s.remove_prefix(static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_ = -1;
};

}  // namespace

std::string format_row(const ResultRow& r) {
  std::string out = r.dataset + "," + r.model + "," + std::to_string(r.emb) + "," + std::to_string(r.seqlen) + "," +
                    std::to_string(r.params);
  for (const eval::Metrics* m : {&r.at10, &r.at20})
    out += "," + num(m->precision) + "," + num(m->recall) + "," + num(m->ndcg) + "," + num(m->map);
  out += "," + num(r.kwh) + "," + num(r.co2kg) + "," + num(r.seconds);
  return out;
}

ResultRow parse_row(std::string_view line) {
  const auto f = split_fields(line);
  if (f.size() != 16) throw DataError("results row has " + std::to_string(f.size()) + " fields, expected 16: " + std::string(line));
  ResultRow r;
  r.dataset = f[0];
  r.model = f[1];
  r.emb = parse_number<std::size_t>(f[2], line);
  r.seqlen = parse_number<std::size_t>(f[3], line);
  r.params = parse_number<std::size_t>(f[4], line);
  eval::Metrics* ms[] = {&r.at10, &r.at20};
  for (int k = 0; k < 2; ++k) {
    ms[k]->precision = parse_number<double>(f[5 + 4 * k], line);
    ms[k]->recall = parse_number<double>(f[6 + 4 * k], line);
    ms[k]->ndcg = parse_number<double>(f[7 + 4 * k], line);
    ms[k]->map = parse_number<double>(f[8 + 4 * k], line);
  }
  r.kwh = parse_number<double>(f[13], line);
  r.co2kg = parse_number<double>(f[14], line);
  r.seconds = parse_number<double>(f[15], line);
  return r;
}

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read results file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw DataError("'" + path.string() + "' does not start with the results header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(parse_row(line));
  return rows;
}

void ensure_csv(const std::filesystem::path& path, std::string_view header) {
  LockedFile f(path);
  if (f.empty()) f.write_all(std::string(header) + "\n");
}

void append_csv_line(const std::filesystem::path& path, std::string_view header, std::string_view line) {
  LockedFile f(path);
  std::string out;
  if (f.empty()) out = std::string(header) + "\n";
  out += line;
  out += "\n";
  f.write_all(out);
}

std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace seqbench::runner
