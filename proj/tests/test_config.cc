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

#include <gtest/gtest.h>

#include <fstream>

#include "enf/cli.h"
#include "test_util.h"

namespace enf {
namespace {

constexpr std::string_view kMinimal = R"(
[target]
builtin = "motivating"

[[fuzzer]]
name = "a"
)";

size_t error_line(std::string_view text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return 0;
}

TEST(RunConfigParse, ShippedConfigMatchesSyncPreset) {
  RunConfig c = load_run_config(std::string(ENF_SOURCE_DIR) + "/configs/motivating.toml");
  EnsembleConfig p = preset_config("ensemble_sync");
  EXPECT_EQ(c.mode, RunMode::kSim);
  EXPECT_EQ(c.ensemble.sync_period, p.sync_period);
  EXPECT_EQ(c.ensemble.run_budget, p.run_budget);
  EXPECT_EQ(c.ensemble.initial_seeds, p.initial_seeds);
  ASSERT_EQ(c.ensemble.fuzzers.size(), 2u);
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(c.ensemble.fuzzers[i].name, p.fuzzers[i].name);
    EXPECT_EQ(c.ensemble.fuzzers[i].dictionary, p.fuzzers[i].dictionary);
    EXPECT_EQ(c.ensemble.fuzzers[i].rng_seed, p.fuzzers[i].rng_seed);
    EXPECT_EQ(c.ensemble.fuzzers[i].mutation, p.fuzzers[i].mutation);
  }
  EXPECT_EQ(c.load_target().name, "motivating");
}

TEST(RunConfigParse, Defaults) {
  RunConfig c = parse_run_config(kMinimal);
  EXPECT_EQ(c.mode, RunMode::kSim);
  EXPECT_EQ(c.ensemble.sync_period, 20u);
  EXPECT_EQ(c.ensemble.run_budget, 5000u);
  EXPECT_TRUE(c.ensemble.sync);
  EXPECT_FALSE(c.ensemble.reallocation);
  EXPECT_FALSE(c.workdir);
  EXPECT_EQ(c.ensemble.fuzzers[0].rng_seed, 1u);
}

TEST(RunConfigParse, FuzzerSeedsDeriveFromTheRunSeed) {
  RunConfig c = parse_run_config(R"(
[ensemble]
rng_seed = 100
[target]
builtin = "motivating"
[[fuzzer]]
name = "a"
[[fuzzer]]
name = "b"
rng_seed = 7
[[spare]]
name = "s"
)");
  EXPECT_EQ(c.ensemble.fuzzers[0].rng_seed, 101u);
  EXPECT_EQ(c.ensemble.fuzzers[1].rng_seed, 7u);
  EXPECT_EQ(c.ensemble.spares[0].rng_seed, 103u);
}

TEST(RunConfigParse, RealModeDefaultsToLongRounds) {
  RunConfig c = parse_run_config(std::string("[ensemble]\nmode = \"real\"\n") + std::string(kMinimal));
  EXPECT_EQ(c.mode, RunMode::kReal);
  EXPECT_EQ(c.ensemble.sync_period, kRealModeDefaultSyncSeconds);
}

TEST(RunConfigParse, EscapesArraysAndSections) {
  RunConfig c = parse_run_config(R"(
[ensemble]
initial_seeds = ["a\x00b", "tab\there"]  # trailing comment
sync = false
[target]
builtin = "motivating"
[[fuzzer]]
name = "a"
mutation = "dictionary_splice"
dictionary = ["\xff\"", "#not a comment"]
granularity = "block"
selection = "rare_branch"
[reallocation]
stall_window = 50
action = "boost_slots"
)");
  EXPECT_EQ(c.ensemble.initial_seeds[0], (Bytes{'a', 0, 'b'}));
  EXPECT_EQ(c.ensemble.initial_seeds[1], to_bytes("tab\there"));
  EXPECT_FALSE(c.ensemble.sync);
  EXPECT_EQ(c.ensemble.fuzzers[0].dictionary[0], (Bytes{0xff, '"'}));
  EXPECT_EQ(c.ensemble.fuzzers[0].dictionary[1], to_bytes("#not a comment"));
  EXPECT_EQ(c.ensemble.fuzzers[0].granularity, Granularity::kBlock);
  EXPECT_EQ(c.ensemble.fuzzers[0].selection, SelectionPolicy::kRareBranch);
  ASSERT_TRUE(c.ensemble.reallocation);
  EXPECT_EQ(c.ensemble.reallocation->stall_window, 50u);
  EXPECT_EQ(c.ensemble.reallocation->action, ReallocationPolicy::Action::kBoostSlots);
}

TEST(RunConfigParse, RelativePathsResolveAgainstBaseDir) {
  RunConfig c = parse_run_config(R"(
[target]
file = "t.txt"
[workdir]
path = "wd"
[[fuzzer]]
name = "a"
[[external]]
name = "ext"
command = "stub"
args = ["--crash"]
poll_interval_ms = 5
)",
                                 "/base");
  EXPECT_EQ(c.target_file, std::filesystem::path("/base/t.txt"));
  EXPECT_EQ(*c.workdir, std::filesystem::path("/base/wd"));
  ASSERT_EQ(c.externals.size(), 1u);
  EXPECT_EQ(c.externals[0].args, std::vector<std::string>{"--crash"});
  EXPECT_EQ(c.externals[0].poll_interval, std::chrono::milliseconds(5));
}

TEST(RunConfigParse, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("[ensemble]\nbogus = 1\n"), 2u);
  EXPECT_EQ(error_line("[ensemble]\nsync_period = 1\nsync_period = 2\n"), 3u);
  EXPECT_EQ(error_line("[nope]\n"), 1u);
  EXPECT_EQ(error_line("[ensemble]\n[ensemble]\n"), 2u);
  EXPECT_EQ(error_line("[ensemble]\nsync_period = \"x\"\n"), 2u);
  EXPECT_EQ(error_line("[ensemble]\nsync_period = -3\n"), 2u);
  EXPECT_EQ(error_line("[ensemble]\nmode = \"fast\"\n"), 2u);
  EXPECT_EQ(error_line("[ensemble]\nsync = maybe\n"), 2u);
  EXPECT_EQ(error_line("[ensemble]\ninitial_seeds = [\"a\"\n"), 2u);
  EXPECT_EQ(error_line("[ensemble]\nrun_budget\n"), 2u);
  EXPECT_EQ(error_line("\n\n[[fuzzer]]\nname = \"a\"\nmutation = \"rot13\"\n"), 5u);
  EXPECT_EQ(error_line("[reallocation]\naction = \"panic\"\n"), 2u);
}

TEST(RunConfigParse, SemanticErrors) {
  EXPECT_THROW(parse_run_config("[[fuzzer]]\nname = \"a\"\n"), ConfigError);  // no target
  EXPECT_THROW(parse_run_config("[target]\nbuiltin = \"motivating\"\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[target]\nbuiltin = \"motivating\"\nfile = \"x\"\n"
                                "[[fuzzer]]\nname = \"a\"\n"),
               ConfigError);
  // Externals need a workdir.
  EXPECT_THROW(parse_run_config(std::string(kMinimal) +
                                "[[external]]\nname = \"e\"\ncommand = \"stub\"\n"),
               ConfigError);
  EXPECT_THROW(parse_run_config(std::string(kMinimal) + "[[fuzzer]]\nname = \"a\"\n"),
               ConfigError);
}

TEST(RunConfigParse, TargetFileIsLoaded) {
  testing::TempDir d;
  std::ofstream(d / "t.txt") << "max_len 4\nnode 1 length_ge(2) 1:10 2:11\nleaf 10\nleaf 11\n";
  std::ofstream(d / "run.toml") << "[target]\nfile = \"t.txt\"\n[[fuzzer]]\nname = \"a\"\n";
  RunConfig c = load_run_config(d / "run.toml");
  TargetSpec t = c.load_target();
  EXPECT_EQ(t.max_input_len, 4u);
  EXPECT_THROW(load_run_config(d / "missing.toml"), Error);
}

}  // namespace
}  // namespace enf
