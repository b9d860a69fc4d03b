// Copyright 2026 The enf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "enf/diversity.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/fmt/fmt.h>

#include "enf/common.h"

namespace enf {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (;;) {
    size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_count(std::string_view s, size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("'{}' is not a number", s), line);
  }
  if (v <= 0) throw ConfigError(fmt::format("count {} must be positive", s), line);
  return v;
}

std::vector<double> deviations(std::span<const AppStatRow> rows, std::string_view fuzzer) {
  if (rows.empty()) throw Error("no rows");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const AppStatRow& r : rows) {
    if (r.baseline == 0) throw Error(fmt::format("zero baseline for '{}'", r.app));
    auto it = r.values.find(fuzzer);
    if (it == r.values.end()) throw Error(fmt::format("no '{}' value for '{}'", fuzzer, r.app));
    out.push_back((it->second - r.baseline) / r.baseline);
  }
  return out;
}

}  // namespace

bool StatTable::has(std::string_view fuzzer) const {
  return std::find(fuzzers.begin(), fuzzers.end(), fuzzer) != fuzzers.end();
}

StatTable parse_stats(std::string_view text, std::string_view baseline_column) {
  StatTable table;
  size_t baseline_idx = 0;
  std::vector<std::string> header;
  std::set<std::string, std::less<>> apps;
  size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cells = split_csv(line);
    if (header.empty()) {
      if (cells.size() < 3 || cells[0] != "app") {
        throw ConfigError("header must be app,<baseline>,<fuzzer>...", line_no);
      }
      std::set<std::string_view> seen;
      for (size_t i = 1; i < cells.size(); ++i) {
        if (cells[i].empty() || !seen.insert(cells[i]).second) {
          throw ConfigError(fmt::format("bad or duplicate column '{}'", cells[i]), line_no);
        }
        if (cells[i] == baseline_column) baseline_idx = i;
      }
      if (baseline_idx == 0) {
        throw ConfigError(fmt::format("no baseline column '{}'", baseline_column), line_no);
      }
      header.assign(cells.begin(), cells.end());
      for (size_t i = 1; i < header.size(); ++i) {
        if (i != baseline_idx) table.fuzzers.push_back(header[i]);
      }
      continue;
    }
    if (cells.size() != header.size()) {
      throw ConfigError(
          fmt::format("expected {} fields, found {}", header.size(), cells.size()), line_no);
    }
    if (cells[0].empty() || !apps.insert(std::string(cells[0])).second) {
      throw ConfigError(fmt::format("missing or duplicate app '{}'", cells[0]), line_no);
    }
    AppStatRow row;
    row.app = std::string(cells[0]);
    for (size_t i = 1; i < cells.size(); ++i) {
      double v = parse_count(cells[i], line_no);
      if (i == baseline_idx) {
        row.baseline = v;
      } else {
        row.values.emplace(header[i], v);
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (header.empty()) throw ConfigError("empty stats table");
  if (table.rows.empty()) throw ConfigError("stats table has no rows", line_no);
  return table;
}

StatTable load_stats(const std::filesystem::path& csv, std::string_view baseline_column) {
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read {}", csv.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_stats(buf.str(), baseline_column);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", csv.string(), e.what()));
  }
}

double relative_mean(std::span<const AppStatRow> rows, std::string_view fuzzer) {
  auto d = deviations(rows, fuzzer);
  double sum = 0;
  for (double x : d) sum += x;
  return sum / static_cast<double>(d.size());
}

double diversity(std::span<const AppStatRow> rows, std::string_view fuzzer) {
  auto d = deviations(rows, fuzzer);
  double mean = 0;
  for (double x : d) mean += x;
  mean /= static_cast<double>(d.size());
  double acc = 0;
  for (double x : d) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(d.size());
}

std::vector<RankedEnsemble> rank_ensemble(std::span<const WeightedTable> tables,
                                          std::vector<std::vector<std::string>> candidates) {
  if (tables.empty()) throw ConfigError("no stats tables");
  std::map<std::string, double, std::less<>> cache;
  auto member_score = [&](const std::string& name) {
    if (auto it = cache.find(name); it != cache.end()) return it->second;
    double s = 0;
    for (const WeightedTable& t : tables) {
      if (!t.table->has(name)) throw ConfigError(fmt::format("unknown fuzzer '{}'", name));
      s += t.weight * diversity(t.table->rows, name);
    }
    cache.emplace(name, s);
    return s;
  };
  std::vector<RankedEnsemble> out;
  out.reserve(candidates.size());
  for (auto& members : candidates) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    RankedEnsemble r{std::move(members), 0};
    for (const std::string& m : r.members) r.score += member_score(m);
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedEnsemble& a, const RankedEnsemble& b) {
    if (a.members.empty() != b.members.empty()) return b.members.empty();
    if (a.score != b.score) return a.score > b.score;
    return a.members < b.members;
  });
  return out;
}

std::vector<RankedEnsemble> rank_ensemble(const StatTable& table,
                                          std::vector<std::vector<std::string>> candidates) {
  WeightedTable t{&table, 1};
  return rank_ensemble(std::span<const WeightedTable>(&t, 1), std::move(candidates));
}

std::vector<std::vector<std::string>> k_subsets(const std::vector<std::string>& names, size_t k) {
  std::vector<std::vector<std::string>> out;
  if (k > names.size()) return out;
  std::vector<size_t> idx(k);
  for (size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    std::vector<std::string> subset;
    for (size_t i : idx) subset.push_back(names[i]);
    out.push_back(std::move(subset));
    size_t i = k;
    while (i > 0 && idx[i - 1] == names.size() - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace enf
