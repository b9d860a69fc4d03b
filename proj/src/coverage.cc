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

#include "enf/coverage.h"

#include <bit>
#include <cstdio>
#include <sstream>

#include "enf/common.h"

namespace enf {

std::string_view to_string(Granularity g) {
  return g == Granularity::kEdge ? "edge" : "block";
}

Granularity parse_granularity(std::string_view s) {
  if (s == "edge") return Granularity::kEdge;
  if (s == "block") return Granularity::kBlock;
  throw ConfigError("unknown granularity '" + std::string(s) + "'");
}

int bucketize(uint64_t hits) {
  if (hits == 0) throw Error("no-hit has no bucket");
  if (hits <= 3) return static_cast<int>(hits) - 1;
  if (hits <= 7) return 3;
  if (hits <= 15) return 4;
  if (hits <= 31) return 5;
  if (hits <= 127) return 6;
  return 7;
}

void CoverageMap::add_hits(SiteId site, uint64_t hits) {
  set_bits(site, static_cast<uint8_t>(1u << bucketize(hits)));
}

void CoverageMap::set_bits(SiteId site, uint8_t mask) {
  if (mask == 0) return;
  slots_[site] |= mask;
}

uint8_t CoverageMap::mask(SiteId site) const {
  auto it = slots_.find(site);
  return it == slots_.end() ? 0 : it->second;
}

size_t CoverageMap::bit_count() const {
  size_t n = 0;
  for (const auto& [site, mask] : slots_) n += std::popcount(mask);
  return n;
}

std::string CoverageMap::to_text() const {
  std::string out = "kind:";
  out += to_string(kind_);
  out += '\n';
  char buf[32];
  for (const auto& [site, mask] : slots_) {
    std::snprintf(buf, sizeof(buf), "%x:%x\n", site, mask);
    out += buf;
  }
  return out;
}

CoverageMap CoverageMap::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("kind:")) {
    throw Error("coverage text must start with 'kind:'");
  }
  CoverageMap map(parse_granularity(line.substr(5)));
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto colon = line.find(':');
    uint64_t site = 0, mask = 0;
    if (colon == std::string::npos || !parse_hex64(line.substr(0, colon), site) ||
        !parse_hex64(line.substr(colon + 1), mask) || site > UINT32_MAX || mask == 0 ||
        mask > 0xff) {
      throw Error("bad coverage line " + std::to_string(lineno) + ": '" + line + "'");
    }
    map.set_bits(static_cast<SiteId>(site), static_cast<uint8_t>(mask));
  }
  return map;
}

namespace {

void check_kinds(const CoverageMap& a, const CoverageMap& b) {
  if (a.kind() != b.kind()) throw Error("granularity mismatch");
}

}  // namespace

CoverageMap new_bits(const CoverageMap& global, const CoverageMap& cover) {
  check_kinds(global, cover);
  CoverageMap fresh(cover.kind());
  for (const auto& [site, mask] : cover.slots()) {
    fresh.set_bits(site, static_cast<uint8_t>(mask & ~global.mask(site)));
  }
  return fresh;
}

CoverageMap merge_into(CoverageMap& global, const CoverageMap& local) {
  CoverageMap fresh = new_bits(global, local);
  for (const auto& [site, mask] : fresh.slots()) global.set_bits(site, mask);
  return fresh;
}

MergeResult merge(const CoverageMap& global, const CoverageMap& local) {
  MergeResult result{global, CoverageMap(local.kind())};
  result.new_coverage = merge_into(result.map, local);
  return result;
}

bool is_new_coverage(const CoverageMap& global, const CoverageMap& cover) {
  check_kinds(global, cover);
  for (const auto& [site, mask] : cover.slots()) {
    if (mask & ~global.mask(site)) return true;
  }
  return false;
}

PathId path_id(std::span<const SiteId> trace) {
  uint64_t h = kFnvOffsetBasis;
  for (SiteId site : trace) {
    uint8_t le[4] = {static_cast<uint8_t>(site), static_cast<uint8_t>(site >> 8),
                     static_cast<uint8_t>(site >> 16), static_cast<uint8_t>(site >> 24)};
    h = fnv1a64(ByteView(le, 4), h);
  }
  return PathId{h};
}

}  // namespace enf
