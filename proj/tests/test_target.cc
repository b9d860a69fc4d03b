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

#include <gtest/gtest.h>

#include "test_util.h"

namespace enf {
namespace {

Bytes two_strings(std::string_view s1, std::string_view s2) {
  Bytes b(32, 'x');
  std::copy(s1.begin(), s1.end(), b.begin());
  std::copy(s2.begin(), s2.end(), b.begin() + 16);
  return b;
}

TEST(Motivating, FirstStringReachesT1ThenT3) {
  ExecResult r = execute(builtin_motivating(), two_strings("Magic Str", "xxxx"));
  EXPECT_EQ(r.trace, (std::vector<SiteId>{1, 3}));
  EXPECT_FALSE(r.crashed);
  EXPECT_FALSE(r.backtrace);
}

TEST(Motivating, MagicPairCrashes) {
  ExecResult r = execute(builtin_motivating(), two_strings("Magic Str", "Magic Num"));
  EXPECT_EQ(r.trace, (std::vector<SiteId>{1, 4}));
  EXPECT_TRUE(r.crashed);
  ASSERT_TRUE(r.backtrace);
  EXPECT_FALSE(r.backtrace->frames.empty());

  ExecResult mirrored = execute(builtin_motivating(), two_strings("Magic Num", "Magic Str"));
  EXPECT_EQ(mirrored.trace, (std::vector<SiteId>{2, 5}));
  EXPECT_TRUE(mirrored.crashed);
  EXPECT_NE(mirrored.leaf, r.leaf);
}

TEST(Motivating, EmptyInputFallsThrough) {
  ExecResult r = execute(builtin_motivating(), {});
  EXPECT_TRUE(r.trace.empty());
  EXPECT_FALSE(r.has_path());
  EXPECT_FALSE(r.crashed);
  EXPECT_TRUE(r.edge_cover.empty());
}

TEST(Motivating, OracleInventory) {
  TargetSpec t = builtin_motivating();
  Oracle o = enumerate(t);
  EXPECT_EQ(o.paths.size(), 4u);
  EXPECT_EQ(o.branch_sites, (std::set<SiteId>{1, 2, 3, 4, 5, 6}));
  ASSERT_EQ(o.crash_leaves.size(), 2u);
  for (NodeId leaf : o.crash_leaves) EXPECT_TRUE(t.leaves.at(leaf).crash);
}

TEST(Motivating, ConstructionIsIdempotent) {
  EXPECT_EQ(builtin_motivating().to_text(), builtin_motivating().to_text());
  EXPECT_EQ(builtin_target("motivating").to_text(), builtin_motivating().to_text());
  EXPECT_THROW(builtin_target("nope"), ConfigError);
}

TEST(Execute, CoverMatchesTrace) {
  TargetSpec t = builtin_motivating();
  ExecResult r = execute(t, two_strings("Magic Num", "zzz"));
  EXPECT_EQ(r.trace, (std::vector<SiteId>{2, 6}));
  EXPECT_EQ(r.edge_cover.site_count(), 2u);
  EXPECT_TRUE(r.edge_cover.contains(2));
  EXPECT_TRUE(r.edge_cover.contains(6));
  EXPECT_EQ(r.path, path_id(r.trace));
  // Blocks: every node visited plus the leaf.
  EXPECT_EQ(r.block_cover.site_count(), 4u);
  EXPECT_TRUE(r.block_cover.contains(r.leaf));
}

TEST(Execute, RejectsOversizedInput) {
  TargetSpec t = builtin_motivating();
  EXPECT_THROW(execute(t, Bytes(t.max_input_len + 1)), Error);
}

TEST(Execute, ShortInputsFailComparisons) {
  TargetSpec t = TargetSpec::parse(
      "node 1 u32_eq(2,0x04030201) 1:10 2:11\nleaf 10\nleaf 11\n");
  EXPECT_EQ(execute(t, Bytes{0, 0, 1, 2, 3}).trace, (std::vector<SiteId>{2}));
  EXPECT_EQ(execute(t, Bytes{0, 0, 1, 2, 3, 4}).trace, (std::vector<SiteId>{1}));
}

TEST(Enumerate, SingleNode) {
  TargetSpec t = TargetSpec::parse("node 1 bytes_eq(0,\"a\") 1:10 2:11\nleaf 10\nleaf 11\n");
  EXPECT_EQ(enumerate(t).paths.size(), 2u);
}

TEST(Enumerate, ChainOfThreeIndependentNodes) {
  TargetSpec t = TargetSpec::parse(R"(
node 1 bytes_eq(0,"a") 1:2 2:90
node 2 bytes_eq(1,"b") 3:3 4:90
node 3 bytes_eq(2,"c") 5:91 6:90
leaf 90
leaf 91
)");
  Oracle o = enumerate(t);
  EXPECT_EQ(o.feasible_leaf_paths, 4u);
  EXPECT_EQ(o.paths.size(), 4u);
  EXPECT_EQ(o.branch_sites.size(), 6u);
}

TEST(Enumerate, PrunesContradictions) {
  // Byte 0 cannot be both 'a' and 'b': the true/true path is infeasible.
  TargetSpec t = TargetSpec::parse(R"(
node 1 bytes_eq(0,"a") 1:2 2:90
node 2 bytes_eq(0,"b") 3:90 4:90
leaf 90
)");
  Oracle o = enumerate(t);
  EXPECT_EQ(o.paths.size(), 2u);
  EXPECT_FALSE(o.branch_sites.contains(3));
}

TEST(Enumerate, TooLarge) {
  std::string text;
  for (int i = 1; i <= 21; ++i) {
    text += "node " + std::to_string(i) + " length_ge(1) " + std::to_string(2 * i) + ":" +
            std::to_string(i + 1) + " " + std::to_string(2 * i + 1) + ":" +
            std::to_string(i + 1) + "\n";
  }
  text += "leaf 22\n";
  try {
    enumerate(TargetSpec::parse(text));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "target too large for oracle");
  }
}

TEST(SolvePath, WitnessFollowsTheOutcomes) {
  TargetSpec t = builtin_motivating();
  auto w = solve_path(t, {true, false});
  ASSERT_TRUE(w);
  EXPECT_EQ(execute(t, *w).trace, (std::vector<SiteId>{1, 3}));
  auto crash = solve_path(t, {false, true, true});
  ASSERT_TRUE(crash);
  EXPECT_TRUE(execute(t, *crash).crashed);
}

TEST(TargetProperties, ExecutedPathsAreOraclePaths) {
  Rng rng(31);
  for (int i = 0; i < 60; ++i) {
    TargetSpec t = random_target(rng, {.max_nodes = 10, .tree = i % 2 == 0});
    Oracle o = enumerate(t);
    for (int k = 0; k < 200; ++k) {
      Bytes in = testing::random_bytes(rng, t.max_input_len);
      for (auto& c : in) c %= 5;
      ExecResult r = execute(t, in);
      EXPECT_TRUE(!r.has_path() || o.paths.contains(r.path));
      EXPECT_TRUE(!r.crashed || o.crash_leaves.contains(r.leaf));
      EXPECT_EQ(r.crashed, r.backtrace.has_value());
      // Purity.
      ExecResult again = execute(t, in);
      EXPECT_EQ(again.trace, r.trace);
      EXPECT_EQ(again.edge_cover, r.edge_cover);
    }
  }
}

TEST(TargetProperties, ExhaustiveInputsMatchTheOracle) {
  Rng rng(32);
  for (int i = 0; i < 25; ++i) {
    TargetSpec t = random_target(rng, {.max_nodes = 8, .max_input_len = 4});
    Oracle o = enumerate(t);
    testing::Observed seen = testing::exhaust(t, 4);
    EXPECT_EQ(seen.paths, o.paths) << t.to_text();
    EXPECT_EQ(seen.sites, o.branch_sites) << t.to_text();
    EXPECT_EQ(seen.crash_leaves, o.crash_leaves) << t.to_text();
  }
}

TEST(TargetText, RoundTrip) {
  Rng rng(33);
  for (int i = 0; i < 50; ++i) {
    TargetSpec t = random_target(rng);
    TargetSpec back = TargetSpec::parse(t.to_text());
    EXPECT_EQ(back.to_text(), t.to_text());
  }
  TargetSpec m = builtin_motivating();
  EXPECT_EQ(TargetSpec::parse(m.to_text()).to_text(), m.to_text());
}

TEST(TargetText, ParsesTheDocumentedForms) {
  TargetSpec t = TargetSpec::parse(R"(# comment
target demo
max_len 8
node 1 byte_range(0,10,20) 1:2 -:3   # trailing comment
node 2 u32_eq(4,0x01020304) 2:30 3:31
node 3 length_ge(6) 4:31 5:30
leaf 30
leaf 31 crash boom demo.c:7 main demo.c:1
)");
  EXPECT_EQ(t.name, "demo");
  EXPECT_EQ(t.max_input_len, 8u);
  EXPECT_EQ(t.entry, 1u);
  EXPECT_FALSE(t.nodes.at(1).on_false.site);
  ASSERT_TRUE(t.leaves.at(31).crash);
  EXPECT_EQ(t.leaves.at(31).crash->frames.size(), 2u);
  EXPECT_EQ(t.leaves.at(31).crash->frames[0].function, "boom");
}

TEST(TargetValidate, RejectsBrokenSpecs) {
  // Cycle.
  EXPECT_THROW(TargetSpec::parse("node 1 length_ge(1) 1:2 2:2\nnode 2 length_ge(2) 3:1 4:1\n"),
               ConfigError);
  // Duplicate site.
  EXPECT_THROW(TargetSpec::parse("node 1 length_ge(1) 1:9 1:9\nleaf 9\n"), ConfigError);
  // Offset past max_len.
  EXPECT_THROW(TargetSpec::parse("max_len 4\nnode 1 bytes_eq(3,\"ab\") 1:9 2:9\nleaf 9\n"),
               ConfigError);
  // Dangling edge.
  EXPECT_THROW(TargetSpec::parse("node 1 length_ge(1) 1:9 2:8\nleaf 9\n"), ConfigError);
  // Unknown directive, with its line number.
  try {
    TargetSpec::parse("leaf 9\nfrobnicate\n");
    FAIL() << "expected an error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

}  // namespace
}  // namespace enf
