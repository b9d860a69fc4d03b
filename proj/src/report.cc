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

#include "enf/report.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include <spdlog/fmt/fmt.h>

namespace enf {
namespace {

Json fuzzer_json(const FuzzerConfig& f) {
  Json dict = Json::array();
  for (const Bytes& t : f.dictionary) dict.push_back(escape_bytes(t));
  return Json{{"name", f.name},
              {"selection", to_string(f.selection)},
              {"mutation", to_string(f.mutation)},
              {"granularity", to_string(f.granularity)},
              {"dictionary", dict},
              {"halts_on_crash", f.halts_on_crash},
              {"rng_seed", f.rng_seed},
              {"mutations_per_seed", f.mutations_per_seed}};
}

bool parse_u64(std::string_view s, uint64_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc() && p == s.data() + s.size();
}

constexpr std::string_view kTimelineHeader = "tick,paths,branches,unique_bugs";

}  // namespace

Json to_json(const EnsembleConfig& config) {
  Json j;
  j["sync_period"] = config.sync_period;
  j["run_budget"] = config.run_budget;
  j["sync"] = config.sync;
  j["seed_cap"] = config.seed_cap;
  Json seeds = Json::array();
  for (const Bytes& s : config.initial_seeds) seeds.push_back(escape_bytes(s));
  j["initial_seeds"] = seeds;
  j["fuzzers"] = Json::array();
  for (const FuzzerConfig& f : config.fuzzers) j["fuzzers"].push_back(fuzzer_json(f));
  if (!config.spares.empty()) {
    j["spares"] = Json::array();
    for (const FuzzerConfig& f : config.spares) j["spares"].push_back(fuzzer_json(f));
  }
  if (config.reallocation) {
    j["reallocation"] = {{"stall_window", config.reallocation->stall_window},
                         {"action", to_string(config.reallocation->action)}};
  }
  return j;
}

Json to_json(const UniqueBug& bug) {
  return Json{{"function", bug.key.function},
              {"file", bug.key.file},
              {"line", bug.key.line},
              {"occurrences", bug.occurrences},
              {"first_seed", hex64(bug.exemplar.seed_id)},
              {"first_fuzzer", bug.exemplar.fuzzer},
              {"first_tick", bug.exemplar.tick}};
}

Json to_json(std::span<const UniqueBug> bugs) {
  Json arr = Json::array();
  for (const UniqueBug& b : bugs) arr.push_back(to_json(b));
  return arr;
}

Json report_json(const FinalReport& report, const Json& config_echo,
                 const std::string& timeline_path) {
  Json j;
  j["target"] = report.target;
  j["mode"] = report.mode;
  j["ticks"] = report.ticks;
  j["wall_seconds"] = report.wall_seconds;
  j["global"] = {{"paths", report.paths},
                 {"branches", report.branches},
                 {"unique_bugs", report.unique_bugs},
                 {"pool_size", report.pool_size}};
  Json fuzzers = Json::array();
  for (const FuzzerSummary& f : report.fuzzers) {
    fuzzers.push_back({{"name", f.name},
                       {"live", f.live},
                       {"execs", f.stats.execs},
                       {"seeds_contributed", f.stats.seeds_contributed},
                       {"paths", f.paths},
                       {"branches", f.branches},
                       {"crashes", f.stats.crashes},
                       {"restarts", f.stats.restarts},
                       {"imported", f.stats.imported},
                       {"last_new_coverage_tick", f.stats.last_new_coverage_tick},
                       {"energy", f.energy}});
  }
  j["fuzzers"] = fuzzers;
  j["bugs"] = to_json(report.bugs);
  if (timeline_path.empty()) {
    Json rows = Json::array();
    for (const Snapshot& s : report.timeline) {
      rows.push_back({s.tick, s.paths, s.branches, s.unique_bugs});
    }
    j["timeline"] = {{"columns", {"tick", "paths", "branches", "unique_bugs"}}, {"rows", rows}};
  } else {
    j["timeline"] = {{"file", timeline_path}, {"rows", report.timeline.size()}};
  }
  j["config"] = config_echo;
  return j;
}

std::string report_markdown(const FinalReport& report) {
  std::string out;
  out += fmt::format("# Run summary: {}\n\n", report.target);
  out += fmt::format("- mode: {}\n- ticks: {}\n- wall time: {:.3f} s\n\n", report.mode,
                     report.ticks, report.wall_seconds);
  out += "| scope | paths | branches | unique bugs | execs | seeds |\n";
  out += "|---|---:|---:|---:|---:|---:|\n";
  out += fmt::format("| global | {} | {} | {} | | {} |\n", report.paths, report.branches,
                     report.unique_bugs, report.pool_size);
  for (const FuzzerSummary& f : report.fuzzers) {
    out += fmt::format("| {}{} | {} | {} | | {} | {} |\n", f.name, f.live ? "" : " (stopped)",
                       f.paths, f.branches, f.stats.execs, f.stats.seeds_contributed);
  }
  if (!report.bugs.empty()) {
    out += "\n| bug | occurrences | first seed |\n|---|---:|---|\n";
    for (const UniqueBug& b : report.bugs) {
      out += fmt::format("| {} | {} | {} |\n", b.key.to_string(), b.occurrences,
                         hex64(b.exemplar.seed_id));
    }
  }
  return out;
}

void write_timeline(std::ostream& out, std::span<const Snapshot> rows) {
  out << kTimelineHeader << '\n';
  for (const Snapshot& s : rows) {
    out << s.tick << ',' << s.paths << ',' << s.branches << ',' << s.unique_bugs << '\n';
  }
}

std::vector<Snapshot> parse_timeline(std::string_view csv) {
  std::vector<Snapshot> rows;
  std::istringstream in{std::string(csv)};
  std::string raw;
  size_t line = 0;
  bool header = false;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    if (!header) {
      if (raw != kTimelineHeader) {
        throw ConfigError(fmt::format("timeline header must be '{}'", kTimelineHeader), line);
      }
      header = true;
      continue;
    }
    uint64_t v[4];
    std::string_view rest = raw;
    for (int i = 0; i < 4; ++i) {
      size_t comma = rest.find(',');
      std::string_view cell = rest.substr(0, comma);
      if ((i < 3) == (comma == std::string_view::npos) || !parse_u64(cell, v[i])) {
        throw ConfigError("malformed timeline row '" + raw + "'", line);
      }
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    if (!rows.empty() && v[0] <= rows.back().tick) {
      throw ConfigError(fmt::format("tick {} does not follow tick {}", v[0], rows.back().tick),
                        line);
    }
    rows.push_back(Snapshot{v[0], v[1], v[2], v[3]});
  }
  if (!header) throw ConfigError("empty timeline");
  return rows;
}

std::vector<Snapshot> load_timeline(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_timeline(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "text") return ReportFormat::kText;
  if (s == "markdown" || s == "md") return ReportFormat::kMarkdown;
  if (s == "json") return ReportFormat::kJson;
  throw ConfigError(fmt::format("unknown format '{}' (text, markdown, json)", s));
}

RenderedTimeline render_timeline(std::span<const Snapshot> rows, ReportFormat format) {
  RenderedTimeline out;
  const char* names[] = {"paths", "branches", "unique_bugs"};
  for (int c = 0; c < 3; ++c) {
    for (size_t i = 1; i < rows.size(); ++i) {
      const uint64_t prev[] = {rows[i - 1].paths, rows[i - 1].branches, rows[i - 1].unique_bugs};
      const uint64_t cur[] = {rows[i].paths, rows[i].branches, rows[i].unique_bugs};
      if (cur[c] < prev[c]) {
        out.warnings.push_back(fmt::format("{} decreases at tick {} ({} -> {})", names[c],
                                           rows[i].tick, prev[c], cur[c]));
        break;
      }
    }
  }
  switch (format) {
    case ReportFormat::kText:
      out.body += fmt::format("{:>10} {:>8} {:>9} {:>12}\n", "tick", "paths", "branches",
                              "unique_bugs");
      for (const Snapshot& s : rows) {
        out.body += fmt::format("{:>10} {:>8} {:>9} {:>12}\n", s.tick, s.paths, s.branches,
                                s.unique_bugs);
      }
      break;
    case ReportFormat::kMarkdown:
      out.body += "| tick | paths | branches | unique_bugs |\n|---:|---:|---:|---:|\n";
      for (const Snapshot& s : rows) {
        out.body += fmt::format("| {} | {} | {} | {} |\n", s.tick, s.paths, s.branches,
                                s.unique_bugs);
      }
      break;
    case ReportFormat::kJson: {
      Json arr = Json::array();
      for (const Snapshot& s : rows) {
        arr.push_back({{"tick", s.tick},
                       {"paths", s.paths},
                       {"branches", s.branches},
                       {"unique_bugs", s.unique_bugs}});
      }
      Json j{{"rows", arr}, {"warnings", out.warnings}};
      out.body = j.dump(2) + "\n";
      break;
    }
  }
  return out;
}

Json diversity_json(std::span<const WeightedTable> tables, const std::vector<std::string>& fuzzers,
                    const std::vector<RankedEnsemble>& ranked) {
  Json j;
  Json per = Json::object();
  for (const std::string& f : fuzzers) {
    Json entry;
    double weighted = 0;
    for (size_t i = 0; i < tables.size(); ++i) {
      double d = diversity(tables[i].table->rows, f);
      if (i == 0) {
        entry["mean"] = relative_mean(tables[i].table->rows, f);
        entry["diversity"] = d;
      }
      weighted += tables[i].weight * d;
    }
    if (tables.size() > 1) entry["weighted"] = weighted;
    per[f] = entry;
  }
  j["fuzzers"] = per;
  Json ranks = Json::array();
  for (const RankedEnsemble& r : ranked) {
    ranks.push_back({{"members", r.members}, {"score", r.score}});
  }
  j["ensembles"] = ranks;
  return j;
}

void write_replay_log(std::ostream& out, std::span<const ReplayEvent> log) {
  for (const ReplayEvent& e : log) out << format_event(e) << '\n';
}

}  // namespace enf
