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
#include <charconv>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "seqbench/common/errors.hpp"
#include "seqbench/data/canonical.hpp"
#include "seqbench/data/dataset.hpp"

namespace seqbench::data {
namespace {

std::vector<std::string_view> split(std::string_view line, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + sep.size();
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

struct LineContext {
  const std::string& source;
  std::size_t line;
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source, line, what); }
};

std::int64_t parse_timestamp(std::string_view s, const LineContext& ctx) {
  s = trim(s);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    // Some exports write timestamps as floats.
    double d = 0.0;
    auto [p2, ec2] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ec2 != std::errc() || p2 != s.data() + s.size()) ctx.fail("bad timestamp '" + std::string(s) + "'");
    value = static_cast<std::int64_t>(d);
  }
  if (value < 0) ctx.fail("negative timestamp " + std::to_string(value));
  return value;
}

double parse_rating(std::string_view s, const LineContext& ctx) {
  s = trim(s);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) ctx.fail("bad rating '" + std::string(s) + "'");
  return value;
}

Interaction make(std::string_view user, std::string_view item, double rating, std::int64_t ts,
                 const LineContext& ctx) {
  user = trim(user);
  item = trim(item);
  if (user.empty()) ctx.fail("empty user field");
  if (item.empty()) ctx.fail("empty item field");
  return {std::string(user), std::string(item), rating, ts};
}

// "Tue Apr 03 18:00:09 +0000 2012"
std::int64_t parse_utc_time(std::string_view s, const LineContext& ctx) {
  std::tm tm{};
  std::istringstream in{std::string(trim(s))};
  std::string weekday, offset;
  in >> weekday >> std::get_time(&tm, "%b %d %H:%M:%S") >> offset >> std::get_time(&tm, "%Y");
  if (in.fail() || offset.size() != 5 || (offset[0] != '+' && offset[0] != '-'))
    ctx.fail("bad UTC time '" + std::string(s) + "'");
  std::int64_t t = timegm(&tm);
  const int sign = offset[0] == '-' ? -1 : 1;
  const int hh = std::stoi(offset.substr(1, 2)), mm = std::stoi(offset.substr(3, 2));
  t -= sign * (hh * 3600 + mm * 60);
  if (t < 0) ctx.fail("time before epoch");
  return t;
}

enum class MovielensLayout { kTab, kColons, kCsv };

}  // namespace

DatasetFormat parse_format(std::string_view name) {
  if (name == "movielens") return DatasetFormat::kMovielens;
  if (name == "amazon") return DatasetFormat::kAmazon;
  if (name == "foursquare") return DatasetFormat::kFoursquare;
  if (name == "canonical") return DatasetFormat::kCanonical;
  throw UsageError("unknown dataset format '" + std::string(name) +
                   "' (expected movielens, amazon, foursquare or canonical)");
}

std::string_view format_name(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::kMovielens: return "movielens";
    case DatasetFormat::kAmazon: return "amazon";
    case DatasetFormat::kFoursquare: return "foursquare";
    case DatasetFormat::kCanonical: return "canonical";
  }
  return "?";
}

std::vector<Interaction> parse_stream(DatasetFormat format, std::istream& in, const std::string& source) {
  if (format == DatasetFormat::kCanonical)
    throw UsageError("canonical datasets are directories; use parse_dataset");
  std::vector<Interaction> out;
  std::string raw;
  std::size_t line_no = 0;
  MovielensLayout layout = MovielensLayout::kTab;
  bool first = true;
  while (std::getline(in, raw)) {
    ++line_no;
    const LineContext ctx{source, line_no};
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    switch (format) {
      case DatasetFormat::kMovielens: {
        if (first) {
          if (line.find("::") != std::string_view::npos) {
            layout = MovielensLayout::kColons;
          } else if (line.find('\t') == std::string_view::npos && line.find(',') != std::string_view::npos) {
            layout = MovielensLayout::kCsv;
            first = false;
            if (line.rfind("userId", 0) == 0) continue;  // header
          }
        }
        const auto f = split(line, layout == MovielensLayout::kTab ? "\t" : layout == MovielensLayout::kColons ? "::" : ",");
        if (f.size() != 4) ctx.fail("expected 4 fields, got " + std::to_string(f.size()));
        out.push_back(make(f[0], f[1], parse_rating(f[2], ctx), parse_timestamp(f[3], ctx), ctx));
        break;
      }
      case DatasetFormat::kAmazon: {
        const auto f = split(line, ",");
        if (f.size() != 4) ctx.fail("expected 4 fields, got " + std::to_string(f.size()));
        out.push_back(make(f[0], f[1], parse_rating(f[2], ctx), parse_timestamp(f[3], ctx), ctx));
        break;
      }
      case DatasetFormat::kFoursquare: {
        const auto f = split(line, "\t");
        if (f.size() < 4) ctx.fail("expected at least 4 fields, got " + std::to_string(f.size()));
        out.push_back(make(f[0], f[1], 1.0, parse_utc_time(f.back(), ctx), ctx));
        break;
      }
      case DatasetFormat::kCanonical:
        break;
    }
    first = false;
  }
  return out;
}

std::vector<Interaction> parse_dataset(DatasetFormat format, const std::filesystem::path& path) {
  if (format == DatasetFormat::kCanonical) {
    const SequenceData data = read_canonical(path);
    std::vector<Interaction> out;
    for (const UserSequence& u : data.users)
      for (std::size_t i = 0; i < u.items.size(); ++i)
        out.push_back({u.raw_user, data.vocab.raw(u.items[i]), 1.0, u.timestamps[i]});
    return out;
  }
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file " + path.string());
  return parse_stream(format, in, path.string());
}

}  // namespace seqbench::data
