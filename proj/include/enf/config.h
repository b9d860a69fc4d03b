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

#ifndef ENF_CONFIG_H_
#define ENF_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "enf/fsproto.h"
#include "enf/monitor.h"
#include "enf/target.h"

namespace enf {

enum class RunMode { kSim, kReal };

std::string_view to_string(RunMode m);

inline constexpr uint64_t kRealModeDefaultSyncSeconds = 120;

// A parsed run configuration. Accepted syntax is a TOML subset:
//
//   [ensemble]      sync_period, run_budget, mode = "sim"|"real", rng_seed,
//                   sync, initial_seeds = ["..."], seed_cap, storm_limit
//   [[fuzzer]]      name, selection, mutation, granularity, dictionary,
//   [[spare]]       halts_on_crash, rng_seed, mutations_per_seed, max_seed_len
//   [[external]]    name, command, args, poll_interval_ms, startup_grace_ms,
//                   granularity
//   [target]        builtin = "<name>" | file = "<path>"
//   [reallocation]  stall_window, action
//   [workdir]       path
//
// Values are integers, true/false, "strings" (with \xNN, \n, \t, \0, \",
// \\ escapes) or one-line arrays of strings. In real mode sync_period and
// run_budget are seconds.
struct RunConfig {
  EnsembleConfig ensemble;
  RunMode mode = RunMode::kSim;
  uint64_t rng_seed = 0;
  std::string target_builtin;
  std::filesystem::path target_file;
  std::optional<std::filesystem::path> workdir;
  std::vector<ExternalConfig> externals;

  // Builds the configured target. Throws Error / ConfigError.
  TargetSpec load_target() const;
};

// Throws ConfigError with a line number on any syntax error, unknown
// section or key, duplicate key, or invalid value. Relative target and
// workdir paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace enf

#endif  // ENF_CONFIG_H_
