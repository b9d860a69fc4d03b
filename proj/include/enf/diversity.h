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

#ifndef ENF_DIVERSITY_H_
#define ENF_DIVERSITY_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace enf {

// One application's counts: the baseline fuzzer's and every other fuzzer's.
struct AppStatRow {
  std::string app;
  double baseline = 0;
  std::map<std::string, double, std::less<>> values;
};

struct StatTable {
  std::vector<std::string> fuzzers;  // header order, baseline excluded
  std::vector<AppStatRow> rows;

  bool has(std::string_view fuzzer) const;
};

// CSV with header `app,<baseline>,<fuzzer>...`. Blank lines and `#`
// comments are skipped. Throws ConfigError with the offending line for a
// malformed row, a nonpositive or non-numeric count, or an empty table.
StatTable parse_stats(std::string_view text, std::string_view baseline_column = "baseline");
StatTable load_stats(const std::filesystem::path& csv,
                     std::string_view baseline_column = "baseline");

// Mean of (p_i - p_Ai) / p_Ai over the rows.
double relative_mean(std::span<const AppStatRow> rows, std::string_view fuzzer);

// Population variance (1/n) of the same relative deviations.
double diversity(std::span<const AppStatRow> rows, std::string_view fuzzer);

// Per-metric weights when ranking over several tables.
struct DiversityWeights {
  double paths = 1;
  double branches = 1;
  double bugs = 2;
};

struct WeightedTable {
  const StatTable* table = nullptr;
  double weight = 1;
};

struct RankedEnsemble {
  std::vector<std::string> members;  // sorted, unique
  double score = 0;
};

// Scores each candidate by the weighted sum of its members' diversities
// and sorts: descending score, ties by member names, empty sets last.
// Throws ConfigError for a member missing from any table.
std::vector<RankedEnsemble> rank_ensemble(std::span<const WeightedTable> tables,
                                          std::vector<std::vector<std::string>> candidates);
std::vector<RankedEnsemble> rank_ensemble(const StatTable& table,
                                          std::vector<std::vector<std::string>> candidates);

// All k-element subsets of `names`, in lexicographic order of indices.
std::vector<std::vector<std::string>> k_subsets(const std::vector<std::string>& names, size_t k);

}  // namespace enf

#endif  // ENF_DIVERSITY_H_
