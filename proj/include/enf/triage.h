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

#ifndef ENF_TRIAGE_H_
#define ENF_TRIAGE_H_

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace enf {

struct Frame {
  std::string function;
  std::string file;
  uint32_t line = 0;

  bool operator==(const Frame&) const = default;
};

// Innermost frame first. Never empty once parsed or validated.
struct Backtrace {
  std::vector<Frame> frames;

  bool operator==(const Backtrace&) const = default;
};

// Crashes are the same bug iff their top frames match.
struct BugKey {
  std::string function;
  std::string file;
  uint32_t line = 0;

  auto operator<=>(const BugKey&) const = default;
  std::string to_string() const;
};

struct CrashRecord {
  uint64_t seed_id = 0;
  std::string fuzzer;
  uint64_t tick = 0;
  Backtrace backtrace;

  BugKey bug_key() const;
};

// Parses sanitizer-style frames, one per line:
//   #<n> 0x<hex> in <function> <file>:<line>[:<col>]
// Other lines are ignored. Frames come back ordered by <n>.
// Throws Error("unparseable backtrace") when no frame is found.
Backtrace parse_backtrace(std::string_view text);

// Renders frames in the format parse_backtrace reads.
std::string format_backtrace(const Backtrace& bt);

struct UniqueBug {
  BugKey key;
  CrashRecord exemplar;
  size_t occurrences = 0;
};

// Groups crashes by top frame. The exemplar of a group is its earliest
// crash (lowest tick, then lowest seed id); groups are ordered by the
// exemplar's tick, then seed id.
std::vector<UniqueBug> dedup(std::span<const CrashRecord> crashes);

size_t unique_bug_count(std::span<const CrashRecord> crashes);

}  // namespace enf

#endif  // ENF_TRIAGE_H_
