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

#ifndef ENF_COVERAGE_H_
#define ENF_COVERAGE_H_

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace enf {

enum class Granularity { kEdge, kBlock };

std::string_view to_string(Granularity g);
Granularity parse_granularity(std::string_view s);

using SiteId = uint32_t;

// Hit-count class of `hits` in AFL's eight buckets:
// 1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128+. Throws Error for hits == 0.
int bucketize(uint64_t hits);

// Site id -> bucket bitmask. Absent sites have no entry; present sites
// always carry a nonzero mask.
class CoverageMap {
 public:
  explicit CoverageMap(Granularity kind = Granularity::kEdge) : kind_(kind) {}

  Granularity kind() const { return kind_; }

  // Records `hits` executions of `site` (sets the matching bucket bit).
  void add_hits(SiteId site, uint64_t hits);
  // ORs `mask` into the site's slot. A zero mask is ignored.
  void set_bits(SiteId site, uint8_t mask);

  uint8_t mask(SiteId site) const;
  bool contains(SiteId site) const { return slots_.contains(site); }
  bool empty() const { return slots_.empty(); }
  size_t site_count() const { return slots_.size(); }
  size_t bit_count() const;
  const std::map<SiteId, uint8_t>& slots() const { return slots_; }

  // Canonical text form: "kind:edge\n" then "<site-hex>:<mask-hex>\n"
  // lines sorted by site id.
  std::string to_text() const;
  static CoverageMap from_text(std::string_view text);

  bool operator==(const CoverageMap&) const = default;

 private:
  Granularity kind_;
  std::map<SiteId, uint8_t> slots_;
};

// Result of folding `local` into `global`. `new_coverage` holds exactly the
// (site, bucket) bits present in local and absent from global beforehand.
struct MergeResult {
  CoverageMap map;
  CoverageMap new_coverage;
};

// Throws Error("granularity mismatch") when the kinds differ.
MergeResult merge(const CoverageMap& global, const CoverageMap& local);

// In-place variant; returns the newly set bits.
CoverageMap merge_into(CoverageMap& global, const CoverageMap& local);

// Bits of `cover` that `global` lacks, without modifying either.
CoverageMap new_bits(const CoverageMap& global, const CoverageMap& cover);

bool is_new_coverage(const CoverageMap& global, const CoverageMap& cover);

struct PathId {
  uint64_t value = 0;
  auto operator<=>(const PathId&) const = default;
};

// FNV-1a-64 over the little-endian 4-byte encoding of each site id.
PathId path_id(std::span<const SiteId> trace);

}  // namespace enf

#endif  // ENF_COVERAGE_H_
