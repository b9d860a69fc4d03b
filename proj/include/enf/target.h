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

#ifndef ENF_TARGET_H_
#define ENF_TARGET_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "enf/common.h"
#include "enf/coverage.h"
#include "enf/rng.h"
#include "enf/triage.h"

namespace enf {

// Toy instrumented targets: a DAG of byte-level predicates. Each decision
// node has a true and a false edge; edges may carry an instrumentation site.
// Executing an input walks the DAG from the entry and records the site of
// every instrumented edge it takes.

using NodeId = uint32_t;

// "Magic string" comparison. False when the input is too short.
struct BytesEq {
  uint32_t offset = 0;
  Bytes literal;
};
// "Magic number" comparison against a little-endian u32.
struct U32Eq {
  uint32_t offset = 0;
  uint32_t value = 0;
};
struct ByteRange {
  uint32_t offset = 0;
  uint8_t lo = 0;
  uint8_t hi = 0;
};
struct LengthGe {
  uint32_t length = 0;
};

using Predicate = std::variant<BytesEq, U32Eq, ByteRange, LengthGe>;

bool evaluate(const Predicate& p, ByteView input);
// One past the last byte the predicate reads (the required input length).
size_t predicate_end(const Predicate& p);
std::string predicate_to_text(const Predicate& p);

struct Edge {
  std::optional<SiteId> site;  // nullopt: uninstrumented
  NodeId next = 0;
};

struct Node {
  NodeId id = 0;
  Predicate predicate;
  Edge on_true;
  Edge on_false;
};

struct Leaf {
  NodeId id = 0;
  std::optional<Backtrace> crash;
};

class TargetSpec {
 public:
  std::string name = "target";
  size_t max_input_len = 4096;
  NodeId entry = 0;
  std::map<NodeId, Node> nodes;
  std::map<NodeId, Leaf> leaves;

  // Checks: entry exists, every edge points at a node or leaf, the graph is
  // acyclic, sites are unique, predicate offsets fit in max_input_len,
  // crash templates have at least one frame. Throws ConfigError.
  void validate() const;

  // Line format, '#' starts a comment:
  //   target <name>
  //   max_len <n>
  //   entry <node-id>
  //   node <id> <predicate> <true-site>:<next> <false-site>:<next>
  //   leaf <id> [crash <function> <file>:<line> [<function> <file>:<line> ...]]
  // Predicates: bytes_eq(<off>,"<lit>") u32_eq(<off>,<val>)
  //   byte_range(<off>,<lo>,<hi>) length_ge(<n>). A site of '-' marks an
  //   uninstrumented edge. entry defaults to the first node declared.
  static TargetSpec parse(std::string_view text);
  static TargetSpec load(const std::string& path);
  std::string to_text() const;
};

struct ExecResult {
  std::vector<SiteId> trace;
  PathId path;
  NodeId leaf = 0;
  bool crashed = false;
  std::optional<Backtrace> backtrace;
  CoverageMap edge_cover{Granularity::kEdge};
  CoverageMap block_cover{Granularity::kBlock};

  const CoverageMap& cover(Granularity g) const {
    return g == Granularity::kEdge ? edge_cover : block_cover;
  }
  // An execution that took no instrumented edge covers no path.
  bool has_path() const { return !trace.empty(); }
};

// Pure function of (target, input). Throws Error if the input is longer
// than target.max_input_len.
ExecResult execute(const TargetSpec& target, ByteView input);

// Ground truth for a target, computed by walking every DAG path and
// discarding the ones whose predicate outcomes no input can satisfy.
struct Oracle {
  std::set<PathId> paths;          // feasible paths with a nonempty trace
  std::set<SiteId> branch_sites;   // sites on feasible paths
  std::set<NodeId> crash_leaves;   // crashing leaves on feasible paths
  size_t feasible_leaf_paths = 0;  // including empty-trace paths
};

inline constexpr uint64_t kOracleMaxPaths = uint64_t{1} << 20;

// Throws Error("target too large for oracle") when the DAG has more than
// kOracleMaxPaths entry-to-leaf paths.
Oracle enumerate(const TargetSpec& target);

// Finds an input driving execution down the given sequence of branch
// outcomes from the entry, if one exists. Used by enumerate() and tests.
std::optional<Bytes> solve_path(const TargetSpec& target, const std::vector<bool>& outcomes);

// The two-string example: string1 at offset 0, string2 at offset 16.
//   string1 == "Magic Str"  -> T1, then string2 == "Magic Num" ? T4 (crash) : T3
//   string1 == "Magic Num"  -> T2, then string2 == "Magic Str" ? T5 (crash) : T6
//   anything else           -> rejected without touching an instrumented edge
// Edge sites are 1..6 for T1..T6.
TargetSpec builtin_motivating();

// Looks up a builtin by name ("motivating"). Throws ConfigError.
TargetSpec builtin_target(std::string_view name);

struct RandomTargetOptions {
  size_t max_nodes = 10;
  size_t max_input_len = 5;
  // Literals, range bounds and u32 bytes are drawn from [0, alphabet).
  uint8_t alphabet = 4;
  double crash_probability = 0.3;
  // Every node gets a fresh parent edge only (tree-shaped DAG).
  bool tree = false;
};

TargetSpec random_target(Rng& rng, const RandomTargetOptions& options = {});

}  // namespace enf

#endif  // ENF_TARGET_H_
