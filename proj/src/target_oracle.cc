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

#include <bitset>
#include <map>

#include "enf/target.h"

namespace enf {

namespace {

using ByteSet = std::bitset<256>;

// What each predicate says about the input: it is true iff the input is at
// least `end` bytes long and every listed byte lies in its set.
struct Requirement {
  size_t end = 0;
  std::vector<std::pair<uint32_t, ByteSet>> bytes;
};

Requirement requirement_of(const Predicate& p) {
  Requirement r{predicate_end(p), {}};
  if (const auto* q = std::get_if<BytesEq>(&p)) {
    for (size_t i = 0; i < q->literal.size(); ++i) {
      ByteSet s;
      s.set(q->literal[i]);
      r.bytes.emplace_back(q->offset + i, s);
    }
  } else if (const auto* q = std::get_if<U32Eq>(&p)) {
    for (uint32_t i = 0; i < 4; ++i) {
      ByteSet s;
      s.set((q->value >> (8 * i)) & 0xff);
      r.bytes.emplace_back(q->offset + i, s);
    }
  } else if (const auto* q = std::get_if<ByteRange>(&p)) {
    ByteSet s;
    for (int v = q->lo; v <= q->hi; ++v) s.set(v);
    r.bytes.emplace_back(q->offset, s);
  }
  return r;
}

// Conjunction of positive requirements plus a list of negated ones. Bytes
// past the input length are free variables: a negated requirement holds if
// the input is shorter than its end or any of its bytes leaves its set.
struct ConstraintSet {
  size_t len_lo = 0;
  size_t len_hi = 0;
  std::map<uint32_t, ByteSet> domains;  // absent = unconstrained
  std::vector<Requirement> negated;

  ByteSet domain(uint32_t at) const {
    auto it = domains.find(at);
    return it == domains.end() ? ByteSet().set() : it->second;
  }

  bool require(const Requirement& r) {
    len_lo = std::max(len_lo, r.end);
    if (len_lo > len_hi) return false;
    for (const auto& [at, set] : r.bytes) {
      ByteSet d = domain(at) & set;
      if (d.none()) return false;
      domains[at] = d;
    }
    return true;
  }
};

bool already_violated(const ConstraintSet& c, const Requirement& r) {
  if (c.len_hi < r.end) return true;
  for (const auto& [at, set] : r.bytes) {
    if ((c.domain(at) & set).none()) return true;
  }
  return false;
}

// Backtracking over the ways each negated requirement can fail.
bool satisfy(ConstraintSet c, size_t index, Bytes* witness) {
  while (index < c.negated.size() && already_violated(c, c.negated[index])) ++index;
  if (index == c.negated.size()) {
    if (witness) {
      witness->assign(c.len_lo, 0);
      for (size_t i = 0; i < c.len_lo; ++i) {
        ByteSet d = c.domain(static_cast<uint32_t>(i));
        size_t v = 0;
        while (!d.test(v)) ++v;
        (*witness)[i] = static_cast<uint8_t>(v);
      }
    }
    return true;
  }
  const Requirement& r = c.negated[index];
  if (r.end > 0 && r.end - 1 >= c.len_lo) {
    ConstraintSet shorter = c;
    shorter.len_hi = std::min(shorter.len_hi, r.end - 1);
    if (satisfy(std::move(shorter), index + 1, witness)) return true;
  }
  for (const auto& [at, set] : r.bytes) {
    ByteSet d = c.domain(at) & ~set;
    if (d.none()) continue;
    ConstraintSet other = c;
    other.domains[at] = d;
    if (satisfy(std::move(other), index + 1, witness)) return true;
  }
  return false;
}

bool add_outcome(ConstraintSet& c, const Predicate& p, bool outcome) {
  Requirement r = requirement_of(p);
  if (outcome) return c.require(r);
  c.negated.push_back(std::move(r));
  return true;
}

uint64_t count_paths(const TargetSpec& t, NodeId id, std::map<NodeId, uint64_t>& memo) {
  if (t.leaves.contains(id)) return 1;
  if (auto it = memo.find(id); it != memo.end()) return it->second;
  const Node& n = t.nodes.at(id);
  uint64_t total = count_paths(t, n.on_true.next, memo) + count_paths(t, n.on_false.next, memo);
  total = std::min(total, kOracleMaxPaths + 1);
  memo[id] = total;
  return total;
}

struct Walker {
  const TargetSpec& target;
  Oracle& oracle;
  std::vector<SiteId> trace;

  void walk(NodeId id, const ConstraintSet& c) {
    if (auto leaf = target.leaves.find(id); leaf != target.leaves.end()) {
      ++oracle.feasible_leaf_paths;
      if (!trace.empty()) {
        oracle.paths.insert(path_id(trace));
        oracle.branch_sites.insert(trace.begin(), trace.end());
      }
      if (leaf->second.crash) oracle.crash_leaves.insert(id);
      return;
    }
    const Node& node = target.nodes.at(id);
    for (bool outcome : {true, false}) {
      ConstraintSet next = c;
      if (!add_outcome(next, node.predicate, outcome) || !satisfy(next, 0, nullptr)) continue;
      const Edge& e = outcome ? node.on_true : node.on_false;
      if (e.site) trace.push_back(*e.site);
      walk(e.next, next);
      if (e.site) trace.pop_back();
    }
  }
};

}  // namespace

Oracle enumerate(const TargetSpec& target) {
  target.validate();
  std::map<NodeId, uint64_t> memo;
  if (count_paths(target, target.entry, memo) > kOracleMaxPaths) {
    throw Error("target too large for oracle");
  }
  Oracle oracle;
  ConstraintSet root;
  root.len_hi = target.max_input_len;
  Walker{target, oracle, {}}.walk(target.entry, root);
  return oracle;
}

std::optional<Bytes> solve_path(const TargetSpec& target, const std::vector<bool>& outcomes) {
  ConstraintSet c;
  c.len_hi = target.max_input_len;
  NodeId at = target.entry;
  for (bool outcome : outcomes) {
    auto it = target.nodes.find(at);
    if (it == target.nodes.end()) return std::nullopt;
    if (!add_outcome(c, it->second.predicate, outcome)) return std::nullopt;
    at = outcome ? it->second.on_true.next : it->second.on_false.next;
  }
  Bytes witness;
  if (!satisfy(c, 0, &witness)) return std::nullopt;
  return witness;
}

}  // namespace enf
