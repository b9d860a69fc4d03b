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

#ifndef ENF_REPORT_H_
#define ENF_REPORT_H_

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "enf/diversity.h"
#include "enf/monitor.h"
#include "enf/triage.h"

namespace enf {

using Json = nlohmann::ordered_json;

Json to_json(const EnsembleConfig& config);
Json to_json(const UniqueBug& bug);
Json to_json(std::span<const UniqueBug> bugs);

// The machine-readable run summary. `timeline_path` is recorded when the
// timeline was written to a file; otherwise the rows are inlined.
Json report_json(const FinalReport& report, const Json& config_echo,
                 const std::string& timeline_path = {});

// Markdown summary for humans.
std::string report_markdown(const FinalReport& report);

// Timeline CSV: header `tick,paths,branches,unique_bugs`, one row per tick.
void write_timeline(std::ostream& out, std::span<const Snapshot> rows);
// Throws ConfigError (with line numbers) on an empty file, a bad header, a
// malformed row or ticks that are not strictly increasing.
std::vector<Snapshot> parse_timeline(std::string_view csv);
std::vector<Snapshot> load_timeline(const std::filesystem::path& path);

enum class ReportFormat { kText, kMarkdown, kJson };
ReportFormat parse_report_format(std::string_view s);

struct RenderedTimeline {
  std::string body;
  // One entry per column that decreases somewhere.
  std::vector<std::string> warnings;
};

// Coverage-over-time table. Pure: equal inputs give byte-identical output.
RenderedTimeline render_timeline(std::span<const Snapshot> rows, ReportFormat format);

// Diversity of every fuzzer plus ranked candidate ensembles.
Json diversity_json(std::span<const WeightedTable> tables, const std::vector<std::string>& fuzzers,
                    const std::vector<RankedEnsemble>& ranked);

// Replay log, one event per line.
void write_replay_log(std::ostream& out, std::span<const ReplayEvent> log);

}  // namespace enf

#endif  // ENF_REPORT_H_
