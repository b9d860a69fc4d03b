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

#include "enf/triage.h"

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>

#include "enf/common.h"

namespace enf {

std::string BugKey::to_string() const {
  return function + " " + file + ":" + std::to_string(line);
}

BugKey CrashRecord::bug_key() const {
  if (backtrace.frames.empty()) throw Error("crash record without frames");
  const Frame& top = backtrace.frames.front();
  return BugKey{top.function, top.file, top.line};
}

Backtrace parse_backtrace(std::string_view text) {
  static const std::regex kFrame(
      R"(^\s*#(\d+)\s+0x[0-9a-fA-F]+\s+in\s+(.+?)\s+(\S+?):(\d+)(?::\d+)?\s*$)");
  std::vector<std::pair<uint64_t, Frame>> numbered;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (!std::regex_match(line, m, kFrame)) continue;
    Frame f{m[2].str(), m[3].str(), static_cast<uint32_t>(std::stoul(m[4].str()))};
    numbered.emplace_back(std::stoull(m[1].str()), std::move(f));
  }
  if (numbered.empty()) throw Error("unparseable backtrace");
  std::stable_sort(numbered.begin(), numbered.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  Backtrace bt;
  for (auto& [n, f] : numbered) bt.frames.push_back(std::move(f));
  return bt;
}

std::string format_backtrace(const Backtrace& bt) {
  std::string out;
  for (size_t i = 0; i < bt.frames.size(); ++i) {
    const Frame& f = bt.frames[i];
    // Synthetic but stable addresses; parse_backtrace ignores them.
    out += "#" + std::to_string(i) + " 0x" + hex64(0x400000 + 0x10 * i).substr(10) + " in " +
           f.function + " " + f.file + ":" + std::to_string(f.line) + "\n";
  }
  return out;
}

namespace {

bool earlier(const CrashRecord& a, const CrashRecord& b) {
  return std::tie(a.tick, a.seed_id) < std::tie(b.tick, b.seed_id);
}

}  // namespace

std::vector<UniqueBug> dedup(std::span<const CrashRecord> crashes) {
  std::map<BugKey, UniqueBug> groups;
  for (const CrashRecord& c : crashes) {
    BugKey key = c.bug_key();
    auto [it, inserted] = groups.try_emplace(key, UniqueBug{key, c, 0});
    UniqueBug& bug = it->second;
    ++bug.occurrences;
    if (!inserted && earlier(c, bug.exemplar)) bug.exemplar = c;
  }
  std::vector<UniqueBug> out;
  out.reserve(groups.size());
  for (auto& [key, bug] : groups) out.push_back(std::move(bug));
  std::stable_sort(out.begin(), out.end(), [](const UniqueBug& a, const UniqueBug& b) {
    return earlier(a.exemplar, b.exemplar);
  });
  return out;
}

size_t unique_bug_count(std::span<const CrashRecord> crashes) {
  return dedup(crashes).size();
}

}  // namespace enf
