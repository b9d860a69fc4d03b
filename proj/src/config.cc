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

#include "enf/config.h"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/fmt/fmt.h>

namespace enf {
namespace {

struct Value {
  enum class Kind { kInt, kBool, kString, kArray };
  Kind kind = Kind::kInt;
  uint64_t integer = 0;
  bool boolean = false;
  std::string string;
  std::vector<std::string> array;
};

std::string_view kind_name(Value::Kind k) {
  switch (k) {
    case Value::Kind::kInt: return "integer";
    case Value::Kind::kBool: return "boolean";
    case Value::Kind::kString: return "string";
    case Value::Kind::kArray: return "array";
  }
  return "?";
}

class LineParser {
 public:
  LineParser(std::string_view s, size_t line) : s_(s), line_(line) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(what, line_); }

  std::string key() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                s_[pos_] == '_' || s_[pos_] == '-')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(fmt::format("expected '{}'", c));
    ++pos_;
  }

  std::string string() {
    expect('"');
    size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\') ++pos_;
      ++pos_;
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    std::string_view raw = s_.substr(start, pos_ - start);
    ++pos_;
    try {
      return enf::to_string(unescape_bytes(raw));
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }

  Value value() {
    skip_ws();
    Value v;
    if (pos_ >= s_.size()) fail("missing value");
    char c = s_[pos_];
    if (c == '"') {
      v.kind = Value::Kind::kString;
      v.string = string();
    } else if (c == '[') {
      v.kind = Value::Kind::kArray;
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
      } else {
        for (;;) {
          v.array.push_back(string());
          skip_ws();
          if (pos_ < s_.size() && s_[pos_] == ',') {
            ++pos_;
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == ']') {
              ++pos_;
              break;
            }
            continue;
          }
          expect(']');
          break;
        }
      }
    } else if (s_.substr(pos_).starts_with("true")) {
      v.kind = Value::Kind::kBool;
      v.boolean = true;
      pos_ += 4;
    } else if (s_.substr(pos_).starts_with("false")) {
      v.kind = Value::Kind::kBool;
      pos_ += 5;
    } else {
      v.kind = Value::Kind::kInt;
      size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
                                  s_[pos_] == '_')) {
        ++pos_;
      }
      std::string digits;
      for (char d : s_.substr(start, pos_ - start)) {
        if (d != '_') digits.push_back(d);
      }
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v.integer);
      if (digits.empty() || ec != std::errc() || p != digits.data() + digits.size()) {
        fail("expected an integer, boolean, string or array");
      }
    }
    if (!at_end()) fail("trailing characters after value");
    return v;
  }

  size_t pos() const { return pos_; }

 private:
  std::string_view s_;
  size_t line_;
  size_t pos_ = 0;
};

enum class Section { kNone, kEnsemble, kFuzzer, kSpare, kExternal, kTarget, kReallocation, kWorkdir };

struct Builder {
  RunConfig cfg;
  std::filesystem::path base_dir;
  bool sync_period_set = false;
  std::vector<bool> fuzzer_seed_set;
  std::vector<bool> spare_seed_set;
  bool realloc_seen = false;

  static void want(const Value& v, Value::Kind k, std::string_view key, size_t line) {
    if (v.kind != k) {
      throw ConfigError(fmt::format("'{}' expects a {}, got a {}", key, kind_name(k),
                                    kind_name(v.kind)),
                        line);
    }
  }

  static std::vector<Bytes> byte_list(const Value& v) {
    std::vector<Bytes> out;
    for (const std::string& s : v.array) out.push_back(to_bytes(s));
    return out;
  }

  void set_fuzzer(FuzzerConfig& f, std::vector<bool>& seed_set, const std::string& key,
                  const Value& v, size_t line) {
    using K = Value::Kind;
    try {
      if (key == "name") {
        want(v, K::kString, key, line);
        f.name = v.string;
      } else if (key == "selection") {
        want(v, K::kString, key, line);
        f.selection = parse_selection(v.string);
      } else if (key == "mutation") {
        want(v, K::kString, key, line);
        f.mutation = parse_mutation(v.string);
      } else if (key == "granularity") {
        want(v, K::kString, key, line);
        f.granularity = parse_granularity(v.string);
      } else if (key == "dictionary") {
        want(v, K::kArray, key, line);
        f.dictionary = byte_list(v);
      } else if (key == "halts_on_crash") {
        want(v, K::kBool, key, line);
        f.halts_on_crash = v.boolean;
      } else if (key == "rng_seed") {
        want(v, K::kInt, key, line);
        f.rng_seed = v.integer;
        seed_set.back() = true;
      } else if (key == "mutations_per_seed") {
        want(v, K::kInt, key, line);
        f.mutations_per_seed = static_cast<uint32_t>(v.integer);
      } else if (key == "max_seed_len") {
        want(v, K::kInt, key, line);
        f.max_seed_len = v.integer;
      } else {
        throw ConfigError(fmt::format("unknown key '{}'", key), line);
      }
    } catch (const ConfigError& e) {
      if (e.line() != 0) throw;
      throw ConfigError(e.what(), line);
    } catch (const Error& e) {
      throw ConfigError(e.what(), line);
    }
  }

  void set(Section sec, const std::string& key, const Value& v, size_t line) {
    using K = Value::Kind;
    EnsembleConfig& e = cfg.ensemble;
    switch (sec) {
      case Section::kNone:
        throw ConfigError(fmt::format("key '{}' outside of any section", key), line);
      case Section::kEnsemble:
        if (key == "sync_period") {
          want(v, K::kInt, key, line);
          e.sync_period = v.integer;
          sync_period_set = true;
        } else if (key == "run_budget") {
          want(v, K::kInt, key, line);
          e.run_budget = v.integer;
        } else if (key == "mode") {
          want(v, K::kString, key, line);
          if (v.string == "sim") {
            cfg.mode = RunMode::kSim;
          } else if (v.string == "real") {
            cfg.mode = RunMode::kReal;
          } else {
            throw ConfigError(fmt::format("mode must be sim or real, got '{}'", v.string), line);
          }
        } else if (key == "rng_seed") {
          want(v, K::kInt, key, line);
          cfg.rng_seed = v.integer;
        } else if (key == "sync") {
          want(v, K::kBool, key, line);
          e.sync = v.boolean;
        } else if (key == "initial_seeds") {
          want(v, K::kArray, key, line);
          e.initial_seeds = byte_list(v);
        } else if (key == "seed_cap") {
          want(v, K::kInt, key, line);
          e.seed_cap = v.integer;
        } else if (key == "storm_limit") {
          want(v, K::kInt, key, line);
          e.storm_limit = v.integer;
        } else {
          throw ConfigError(fmt::format("unknown key '{}' in [ensemble]", key), line);
        }
        return;
      case Section::kFuzzer:
        set_fuzzer(e.fuzzers.back(), fuzzer_seed_set, key, v, line);
        return;
      case Section::kSpare:
        set_fuzzer(e.spares.back(), spare_seed_set, key, v, line);
        return;
      case Section::kExternal: {
        ExternalConfig& x = cfg.externals.back();
        if (key == "name") {
          want(v, K::kString, key, line);
          x.name = v.string;
        } else if (key == "command") {
          want(v, K::kString, key, line);
          x.command = v.string;
        } else if (key == "args") {
          want(v, K::kArray, key, line);
          x.args = v.array;
        } else if (key == "poll_interval_ms") {
          want(v, K::kInt, key, line);
          x.poll_interval = std::chrono::milliseconds(v.integer);
        } else if (key == "startup_grace_ms") {
          want(v, K::kInt, key, line);
          x.startup_grace = std::chrono::milliseconds(v.integer);
        } else if (key == "granularity") {
          want(v, K::kString, key, line);
          try {
            x.granularity = parse_granularity(v.string);
          } catch (const ConfigError& err) {
            throw ConfigError(err.what(), line);
          }
        } else {
          throw ConfigError(fmt::format("unknown key '{}' in [[external]]", key), line);
        }
        return;
      }
      case Section::kTarget:
        if (key == "builtin") {
          want(v, K::kString, key, line);
          cfg.target_builtin = v.string;
        } else if (key == "file") {
          want(v, K::kString, key, line);
          cfg.target_file = base_dir / v.string;
        } else {
          throw ConfigError(fmt::format("unknown key '{}' in [target]", key), line);
        }
        return;
      case Section::kReallocation: {
        ReallocationPolicy& p = *e.reallocation;
        if (key == "stall_window") {
          want(v, K::kInt, key, line);
          p.stall_window = v.integer;
        } else if (key == "action") {
          want(v, K::kString, key, line);
          try {
            p.action = parse_reallocation_action(v.string);
          } catch (const ConfigError& err) {
            throw ConfigError(err.what(), line);
          }
        } else {
          throw ConfigError(fmt::format("unknown key '{}' in [reallocation]", key), line);
        }
        return;
      }
      case Section::kWorkdir:
        if (key == "path") {
          want(v, K::kString, key, line);
          cfg.workdir = base_dir / v.string;
        } else {
          throw ConfigError(fmt::format("unknown key '{}' in [workdir]", key), line);
        }
        return;
    }
  }
};

}  // namespace

std::string_view to_string(RunMode m) { return m == RunMode::kSim ? "sim" : "real"; }

TargetSpec RunConfig::load_target() const {
  if (!target_builtin.empty()) return builtin_target(target_builtin);
  return TargetSpec::load(target_file.string());
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  Builder b;
  b.base_dir = base_dir;
  Section sec = Section::kNone;
  std::set<std::string> keys;          // keys of the current table
  std::set<std::string> single_tables;  // [ensemble] etc. seen so far
  std::vector<size_t> fuzzer_lines;
  std::istringstream in{std::string(text)};
  std::string raw;
  size_t line = 0;
  size_t target_line = 0;
  while (std::getline(in, raw)) {
    ++line;
    LineParser p(raw, line);
    if (p.at_end()) continue;
    p.skip_ws();
    std::string_view rest = std::string_view(raw).substr(p.pos());
    if (rest.starts_with("[")) {
      bool array = rest.starts_with("[[");
      size_t open = array ? 2 : 1;
      size_t close = rest.find(array ? "]]" : "]");
      if (close == std::string_view::npos) throw ConfigError("unterminated section header", line);
      std::string name(rest.substr(open, close - open));
      LineParser tail(rest.substr(close + (array ? 2 : 1)), line);
      if (!tail.at_end()) throw ConfigError("trailing characters after section header", line);
      keys.clear();
      if (array) {
        if (name == "fuzzer") {
          sec = Section::kFuzzer;
          b.cfg.ensemble.fuzzers.emplace_back();
          b.fuzzer_seed_set.push_back(false);
          fuzzer_lines.push_back(line);
        } else if (name == "spare") {
          sec = Section::kSpare;
          b.cfg.ensemble.spares.emplace_back();
          b.spare_seed_set.push_back(false);
          fuzzer_lines.push_back(line);
        } else if (name == "external") {
          sec = Section::kExternal;
          b.cfg.externals.emplace_back();
        } else {
          throw ConfigError(fmt::format("unknown table array [[{}]]", name), line);
        }
        continue;
      }
      if (name == "ensemble") {
        sec = Section::kEnsemble;
      } else if (name == "target") {
        sec = Section::kTarget;
        target_line = line;
      } else if (name == "reallocation") {
        sec = Section::kReallocation;
        b.cfg.ensemble.reallocation.emplace();
      } else if (name == "workdir") {
        sec = Section::kWorkdir;
      } else {
        throw ConfigError(fmt::format("unknown section [{}]", name), line);
      }
      if (!single_tables.insert(name).second) {
        throw ConfigError(fmt::format("duplicate section [{}]", name), line);
      }
      continue;
    }
    std::string key = p.key();
    p.expect('=');
    Value v = p.value();
    if (!keys.insert(key).second) throw ConfigError(fmt::format("duplicate key '{}'", key), line);
    b.set(sec, key, v, line);
  }

  RunConfig cfg = std::move(b.cfg);
  if (!b.sync_period_set && cfg.mode == RunMode::kReal) {
    cfg.ensemble.sync_period = kRealModeDefaultSyncSeconds;
  }
  // Unset per-fuzzer seeds derive from the ensemble seed and position.
  for (size_t i = 0; i < cfg.ensemble.fuzzers.size(); ++i) {
    if (!b.fuzzer_seed_set[i]) cfg.ensemble.fuzzers[i].rng_seed = cfg.rng_seed + i + 1;
  }
  for (size_t i = 0; i < cfg.ensemble.spares.size(); ++i) {
    if (!b.spare_seed_set[i]) {
      cfg.ensemble.spares[i].rng_seed = cfg.rng_seed + cfg.ensemble.fuzzers.size() + i + 1;
    }
  }
  const size_t n_fuzzers = cfg.ensemble.fuzzers.size();
  for (size_t i = 0; i < fuzzer_lines.size(); ++i) {
    const FuzzerConfig& f =
        i < n_fuzzers ? cfg.ensemble.fuzzers[i] : cfg.ensemble.spares[i - n_fuzzers];
    try {
      f.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), fuzzer_lines[i]);
    }
  }
  if (cfg.target_builtin.empty() == cfg.target_file.empty()) {
    throw ConfigError("[target] needs exactly one of builtin or file", target_line);
  }
  if (!cfg.externals.empty() && !cfg.workdir) {
    throw ConfigError("[[external]] fuzzers need a [workdir] path");
  }
  for (const ExternalConfig& x : cfg.externals) x.validate();
  if (cfg.ensemble.fuzzers.empty() && !cfg.externals.empty()) {
    throw ConfigError("at least one [[fuzzer]] is required");
  }
  cfg.ensemble.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path());
}

}  // namespace enf
