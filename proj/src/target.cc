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

#include "enf/target.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

namespace enf {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

bool evaluate(const Predicate& p, ByteView input) {
  return std::visit(
      Overloaded{
          [&](const BytesEq& q) {
            if (input.size() < q.offset + q.literal.size()) return false;
            return std::equal(q.literal.begin(), q.literal.end(), input.begin() + q.offset);
          },
          [&](const U32Eq& q) {
            if (input.size() < q.offset + 4u) return false;
            uint32_t v = 0;
            for (int i = 3; i >= 0; --i) v = (v << 8) | input[q.offset + i];
            return v == q.value;
          },
          [&](const ByteRange& q) {
            if (input.size() <= q.offset) return false;
            uint8_t b = input[q.offset];
            return b >= q.lo && b <= q.hi;
          },
          [&](const LengthGe& q) { return input.size() >= q.length; },
      },
      p);
}

size_t predicate_end(const Predicate& p) {
  return std::visit(Overloaded{
                        [](const BytesEq& q) { return q.offset + q.literal.size(); },
                        [](const U32Eq& q) { return size_t{q.offset} + 4; },
                        [](const ByteRange& q) { return size_t{q.offset} + 1; },
                        [](const LengthGe& q) { return size_t{q.length}; },
                    },
                    p);
}

std::string predicate_to_text(const Predicate& p) {
  return std::visit(
      Overloaded{
          [](const BytesEq& q) {
            return "bytes_eq(" + std::to_string(q.offset) + ",\"" + escape_bytes(q.literal) +
                   "\")";
          },
          [](const U32Eq& q) {
            return "u32_eq(" + std::to_string(q.offset) + ",0x" + hex64(q.value).substr(8) + ")";
          },
          [](const ByteRange& q) {
            return "byte_range(" + std::to_string(q.offset) + "," + std::to_string(q.lo) + "," +
                   std::to_string(q.hi) + ")";
          },
          [](const LengthGe& q) { return "length_ge(" + std::to_string(q.length) + ")"; },
      },
      p);
}

ExecResult execute(const TargetSpec& target, ByteView input) {
  if (input.size() > target.max_input_len) {
    throw Error("input of " + std::to_string(input.size()) + " bytes exceeds max_len " +
                std::to_string(target.max_input_len) + " of target " + target.name);
  }
  ExecResult r;
  NodeId at = target.entry;
  std::map<SiteId, uint64_t> edge_hits;
  // validate() guarantees acyclicity, so the walk terminates.
  while (true) {
    r.block_cover.add_hits(at, 1);
    auto leaf = target.leaves.find(at);
    if (leaf != target.leaves.end()) {
      r.leaf = at;
      if (leaf->second.crash) {
        r.crashed = true;
        r.backtrace = leaf->second.crash;
      }
      break;
    }
    const Node& node = target.nodes.at(at);
    const Edge& edge = evaluate(node.predicate, input) ? node.on_true : node.on_false;
    if (edge.site) {
      r.trace.push_back(*edge.site);
      ++edge_hits[*edge.site];
    }
    at = edge.next;
  }
  for (const auto& [site, hits] : edge_hits) r.edge_cover.add_hits(site, hits);
  r.path = path_id(r.trace);
  return r;
}

void TargetSpec::validate() const {
  if (nodes.empty() && leaves.empty()) throw ConfigError("target '" + name + "' is empty");
  if (!nodes.contains(entry) && !leaves.contains(entry)) {
    throw ConfigError("entry " + std::to_string(entry) + " is not a node or leaf");
  }
  for (const auto& [id, leaf] : leaves) {
    if (nodes.contains(id)) throw ConfigError("id " + std::to_string(id) + " is both node and leaf");
    if (leaf.crash && leaf.crash->frames.empty()) {
      throw ConfigError("crash leaf " + std::to_string(id) + " has no frames");
    }
  }
  std::set<SiteId> sites;
  for (const auto& [id, node] : nodes) {
    if (predicate_end(node.predicate) > max_input_len &&
        !std::holds_alternative<LengthGe>(node.predicate)) {
      throw ConfigError("node " + std::to_string(id) + " reads past max_len");
    }
    for (const Edge* e : {&node.on_true, &node.on_false}) {
      if (!nodes.contains(e->next) && !leaves.contains(e->next)) {
        throw ConfigError("node " + std::to_string(id) + " points at unknown id " +
                          std::to_string(e->next));
      }
      if (e->site && !sites.insert(*e->site).second) {
        throw ConfigError("duplicate site id " + std::to_string(*e->site));
      }
    }
  }
  // Cycle check: iterative DFS with colors.
  std::map<NodeId, int> color;  // 0 white, 1 on stack, 2 done
  std::function<void(NodeId)> visit = [&](NodeId id) {
    auto it = nodes.find(id);
    if (it == nodes.end()) return;
    int& c = color[id];
    if (c == 1) throw ConfigError("cycle through node " + std::to_string(id));
    if (c == 2) return;
    c = 1;
    visit(it->second.on_true.next);
    visit(it->second.on_false.next);
    color[id] = 2;
  };
  for (const auto& [id, node] : nodes) visit(id);
}

namespace {

uint64_t parse_number(std::string_view s, size_t line) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    return v;
  };
  s = trim(s);
  uint64_t v = 0;
  if (s.starts_with("0x") || s.starts_with("0X")) {
    if (parse_hex64(s, v)) return v;
  } else if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
             s.size() < 20) {
    return std::stoull(std::string(s));
  }
  throw ConfigError("bad number '" + std::string(s) + "'", line);
}

// Splits "a, "b,c", d" on top-level commas.
std::vector<std::string> split_args(std::string_view s, size_t line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quoted) {
      out.back() += c;
      if (c == '\\' && i + 1 < s.size()) {
        out.back() += s[++i];
      } else if (c == '"') {
        quoted = false;
      }
    } else if (c == '"') {
      quoted = true;
      out.back() += c;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw ConfigError("unterminated string", line);
  return out;
}

Predicate parse_predicate(std::string_view text, size_t line) {
  auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    throw ConfigError("bad predicate '" + std::string(text) + "'", line);
  }
  std::string_view kind = text.substr(0, open);
  auto args = split_args(text.substr(open + 1, text.size() - open - 2), line);
  auto want = [&](size_t n) {
    if (args.size() != n) {
      throw ConfigError(std::string(kind) + " takes " + std::to_string(n) + " arguments", line);
    }
  };
  auto u32 = [&](const std::string& a) {
    uint64_t v = parse_number(a, line);
    if (v > UINT32_MAX) throw ConfigError("value out of range: " + a, line);
    return static_cast<uint32_t>(v);
  };
  auto u8 = [&](const std::string& a) {
    uint64_t v = parse_number(a, line);
    if (v > 0xff) throw ConfigError("byte out of range: " + a, line);
    return static_cast<uint8_t>(v);
  };
  if (kind == "bytes_eq") {
    want(2);
    std::string_view lit = args[1];
    while (!lit.empty() && lit.front() == ' ') lit.remove_prefix(1);
    while (!lit.empty() && lit.back() == ' ') lit.remove_suffix(1);
    if (lit.size() < 2 || lit.front() != '"' || lit.back() != '"') {
      throw ConfigError("bytes_eq literal must be quoted", line);
    }
    Bytes literal = unescape_bytes(lit.substr(1, lit.size() - 2));
    if (literal.empty()) throw ConfigError("bytes_eq literal is empty", line);
    return BytesEq{u32(args[0]), std::move(literal)};
  }
  if (kind == "u32_eq") {
    want(2);
    return U32Eq{u32(args[0]), u32(args[1])};
  }
  if (kind == "byte_range") {
    want(3);
    ByteRange r{u32(args[0]), u8(args[1]), u8(args[2])};
    if (r.lo > r.hi) throw ConfigError("byte_range lo > hi", line);
    return r;
  }
  if (kind == "length_ge") {
    want(1);
    return LengthGe{u32(args[0])};
  }
  throw ConfigError("unknown predicate '" + std::string(kind) + "'", line);
}

Edge parse_edge(const std::string& tok, size_t line) {
  auto colon = tok.find(':');
  if (colon == std::string::npos) throw ConfigError("edge must be <site>:<next>, got " + tok, line);
  Edge e;
  std::string site = tok.substr(0, colon);
  if (site != "-") {
    uint64_t v = parse_number(site, line);
    if (v > UINT32_MAX) throw ConfigError("site id out of range", line);
    e.site = static_cast<SiteId>(v);
  }
  uint64_t next = parse_number(tok.substr(colon + 1), line);
  if (next > UINT32_MAX) throw ConfigError("node id out of range", line);
  e.next = static_cast<NodeId>(next);
  return e;
}

NodeId parse_id(const std::string& tok, size_t line) {
  uint64_t v = parse_number(tok, line);
  if (v > UINT32_MAX) throw ConfigError("id out of range", line);
  return static_cast<NodeId>(v);
}

}  // namespace

TargetSpec TargetSpec::parse(std::string_view text) {
  TargetSpec t;
  std::optional<NodeId> entry;
  std::optional<NodeId> first_node;
  std::istringstream in{std::string(text)};
  std::string raw;
  size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    // Strip comments outside quotes.
    bool quoted = false;
    for (size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '\\' && quoted) {
        ++i;
      } else if (raw[i] == '"') {
        quoted = !quoted;
      } else if (raw[i] == '#' && !quoted) {
        raw.resize(i);
        break;
      }
    }
    std::istringstream ls(raw);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "target") {
      if (!(ls >> t.name)) throw ConfigError("target needs a name", lineno);
    } else if (kw == "max_len") {
      std::string n;
      ls >> n;
      t.max_input_len = parse_number(n, lineno);
    } else if (kw == "entry") {
      std::string n;
      ls >> n;
      entry = parse_id(n, lineno);
    } else if (kw == "node") {
      std::string id_tok;
      if (!(ls >> id_tok)) throw ConfigError("node needs an id", lineno);
      Node node;
      node.id = parse_id(id_tok, lineno);
      // The predicate runs to its closing parenthesis; literals may hold spaces.
      std::string rest;
      std::getline(ls, rest);
      size_t start = rest.find_first_not_of(" \t");
      if (start == std::string::npos) throw ConfigError("node needs a predicate", lineno);
      size_t close = std::string::npos;
      bool q = false;
      for (size_t i = start; i < rest.size(); ++i) {
        if (q && rest[i] == '\\') {
          ++i;
        } else if (rest[i] == '"') {
          q = !q;
        } else if (!q && rest[i] == ')') {
          close = i;
          break;
        }
      }
      if (close == std::string::npos) throw ConfigError("unterminated predicate", lineno);
      node.predicate = parse_predicate(rest.substr(start, close - start + 1), lineno);
      std::istringstream es(rest.substr(close + 1));
      std::string te, fe, extra;
      if (!(es >> te >> fe)) throw ConfigError("node needs two edges", lineno);
      if (es >> extra) throw ConfigError("trailing token '" + extra + "'", lineno);
      node.on_true = parse_edge(te, lineno);
      node.on_false = parse_edge(fe, lineno);
      if (!first_node) first_node = node.id;
      if (!t.nodes.emplace(node.id, std::move(node)).second) {
        throw ConfigError("duplicate node id " + id_tok, lineno);
      }
    } else if (kw == "leaf") {
      std::string id_tok;
      if (!(ls >> id_tok)) throw ConfigError("leaf needs an id", lineno);
      Leaf leaf{parse_id(id_tok, lineno), std::nullopt};
      std::string tok;
      if (ls >> tok) {
        if (tok != "crash") throw ConfigError("expected 'crash', got '" + tok + "'", lineno);
        Backtrace bt;
        std::string fn, loc;
        while (ls >> fn) {
          if (!(ls >> loc)) throw ConfigError("frame '" + fn + "' needs <file>:<line>", lineno);
          auto colon = loc.rfind(':');
          if (colon == std::string::npos) throw ConfigError("frame location needs ':'", lineno);
          uint64_t ln = parse_number(loc.substr(colon + 1), lineno);
          bt.frames.push_back(Frame{fn, loc.substr(0, colon), static_cast<uint32_t>(ln)});
        }
        if (bt.frames.empty()) throw ConfigError("crash leaf needs at least one frame", lineno);
        leaf.crash = std::move(bt);
      }
      if (!t.leaves.emplace(leaf.id, std::move(leaf)).second) {
        throw ConfigError("duplicate leaf id " + id_tok, lineno);
      }
    } else {
      throw ConfigError("unknown directive '" + kw + "'", lineno);
    }
  }
  if (entry) {
    t.entry = *entry;
  } else if (first_node) {
    t.entry = *first_node;
  } else if (!t.leaves.empty()) {
    t.entry = t.leaves.begin()->first;
  }
  t.validate();
  return t;
}

TargetSpec TargetSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open target file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string TargetSpec::to_text() const {
  std::string out = "target " + name + "\nmax_len " + std::to_string(max_input_len) +
                    "\nentry " + std::to_string(entry) + "\n";
  auto edge = [](const Edge& e) {
    return (e.site ? std::to_string(*e.site) : std::string("-")) + ":" + std::to_string(e.next);
  };
  for (const auto& [id, n] : nodes) {
    out += "node " + std::to_string(id) + " " + predicate_to_text(n.predicate) + " " +
           edge(n.on_true) + " " + edge(n.on_false) + "\n";
  }
  for (const auto& [id, l] : leaves) {
    out += "leaf " + std::to_string(id);
    if (l.crash) {
      out += " crash";
      for (const Frame& f : l.crash->frames) {
        out += " " + f.function + " " + f.file + ":" + std::to_string(f.line);
      }
    }
    out += "\n";
  }
  return out;
}

TargetSpec builtin_motivating() {
  static constexpr std::string_view kText = R"(
target motivating
max_len 64
entry 1
# string1 selects the region; only the two magic values reach instrumented code
node 1 bytes_eq(0,"Magic Str") 1:3 -:2
node 2 bytes_eq(0,"Magic Num") 2:4 -:10
# T1 region: crashes when string2 is the other magic value
node 3 bytes_eq(16,"Magic Num") 4:14 3:13
# T2 region
node 4 bytes_eq(16,"Magic Str") 5:15 6:16
leaf 10
leaf 13
leaf 14 crash check_pair motivating.c:21 parse_strings motivating.c:38 main motivating.c:52
leaf 15 crash check_pair motivating.c:27 parse_strings motivating.c:40 main motivating.c:52
leaf 16
)";
  return TargetSpec::parse(kText);
}

TargetSpec builtin_target(std::string_view name) {
  if (name == "motivating") return builtin_motivating();
  throw ConfigError("unknown builtin target '" + std::string(name) + "'");
}

TargetSpec random_target(Rng& rng, const RandomTargetOptions& options) {
  TargetSpec t;
  t.name = "random";
  t.max_input_len = options.max_input_len;
  const size_t n = 1 + rng.below(std::max<size_t>(options.max_nodes, 1));
  const uint8_t alpha = std::max<uint8_t>(options.alphabet, 1);
  SiteId next_site = 1;
  NodeId next_leaf = 100;

  auto random_predicate = [&]() -> Predicate {
    const size_t len = options.max_input_len;
    for (;;) {
      switch (rng.below(4)) {
        case 0: {
          if (len == 0) break;
          size_t k = 1 + rng.below(std::min<size_t>(2, len));
          BytesEq p{static_cast<uint32_t>(rng.below(len - k + 1)), {}};
          for (size_t i = 0; i < k; ++i) p.literal.push_back(static_cast<uint8_t>(rng.below(alpha)));
          return p;
        }
        case 1: {
          if (len < 4) break;
          U32Eq p{static_cast<uint32_t>(rng.below(len - 3)), 0};
          for (int i = 0; i < 4; ++i) p.value |= static_cast<uint32_t>(rng.below(alpha)) << (8 * i);
          return p;
        }
        case 2: {
          if (len == 0) break;
          uint8_t a = static_cast<uint8_t>(rng.below(alpha)), b = static_cast<uint8_t>(rng.below(alpha));
          return ByteRange{static_cast<uint32_t>(rng.below(len)), std::min(a, b), std::max(a, b)};
        }
        default:
          return LengthGe{static_cast<uint32_t>(rng.below(len + 1))};
      }
    }
  };
  auto maybe_site = [&]() -> std::optional<SiteId> {
    if (rng.below(10) == 0) return std::nullopt;
    return next_site++;
  };
  auto new_leaf = [&]() {
    Leaf leaf{next_leaf++, std::nullopt};
    if (rng.uniform() < options.crash_probability) {
      // Small name space so distinct leaves sometimes share a top frame.
      leaf.crash = Backtrace{{Frame{"bug_" + std::to_string(rng.below(3)), "rand.c",
                                    static_cast<uint32_t>(1 + rng.below(3))},
                              Frame{"leaf_" + std::to_string(leaf.id), "rand.c", leaf.id}}};
    }
    NodeId id = leaf.id;
    t.leaves.emplace(id, std::move(leaf));
    return id;
  };

  for (NodeId id = 1; id <= n; ++id) {
    t.nodes.emplace(id, Node{id, random_predicate(), Edge{maybe_site(), 0}, Edge{maybe_site(), 0}});
  }
  t.entry = 1;
  if (options.tree) {
    std::vector<Edge*> open = {&t.nodes[1].on_true, &t.nodes[1].on_false};
    for (NodeId id = 2; id <= n; ++id) {
      size_t pick = rng.below(open.size());
      open[pick]->next = id;
      open.erase(open.begin() + pick);
      open.push_back(&t.nodes[id].on_true);
      open.push_back(&t.nodes[id].on_false);
    }
    for (Edge* e : open) e->next = new_leaf();
  } else {
    std::vector<NodeId> shared_leaves;
    size_t leaf_count = 1 + rng.below(4);
    for (size_t i = 0; i < leaf_count; ++i) shared_leaves.push_back(new_leaf());
    for (NodeId id = 1; id <= n; ++id) {
      for (Edge* e : {&t.nodes[id].on_true, &t.nodes[id].on_false}) {
        if (id < n && rng.below(3) != 0) {
          e->next = static_cast<NodeId>(id + 1 + rng.below(n - id));
        } else {
          e->next = shared_leaves[rng.below(shared_leaves.size())];
        }
      }
    }
  }
  t.validate();
  return t;
}

}  // namespace enf
