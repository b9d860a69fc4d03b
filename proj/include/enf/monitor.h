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

#ifndef ENF_MONITOR_H_
#define ENF_MONITOR_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "enf/corpus.h"
#include "enf/coverage.h"
#include "enf/fuzzer.h"
#include "enf/target.h"
#include "enf/triage.h"

namespace enf {

// Upper bound for boosted mutation budgets.
inline constexpr uint32_t kMaxWorkerEnergy = 1024;

struct ReallocationPolicy {
  enum class Action { kTerminateAndReplace, kBoostSlots };
  uint64_t stall_window = 200;
  Action action = Action::kTerminateAndReplace;
};

std::string_view to_string(ReallocationPolicy::Action a);
ReallocationPolicy::Action parse_reallocation_action(std::string_view s);

struct EnsembleConfig {
  std::vector<FuzzerConfig> fuzzers;
  // Replacements for terminate_and_replace, used in order.
  std::vector<FuzzerConfig> spares;
  // An empty list means "start from the empty seed".
  std::vector<Bytes> initial_seeds;
  uint64_t sync_period = 20;
  uint64_t run_budget = 5000;
  // With sync off, rounds still evaluate and account pool seeds but never
  // dispatch them: the fuzzers run independently.
  bool sync = true;
  std::optional<ReallocationPolicy> reallocation;
  size_t seed_cap = kDefaultSeedCap;
  uint64_t storm_limit = kDefaultStormLimit;

  // Throws ConfigError.
  void validate() const;
};

// Counters after one tick (or one real-mode round).
struct Snapshot {
  uint64_t tick = 0;
  uint64_t paths = 0;
  uint64_t branches = 0;
  uint64_t unique_bugs = 0;

  bool operator==(const Snapshot&) const = default;
};

enum class EventKind {
  kSubmit,     // worker -> pool, new seed
  kDuplicate,  // worker -> pool, content already pooled
  kReject,     // submission dropped (oversized)
  kExecute,    // monitor ran a pool seed; site_count = edge sites covered
  kEvaluate,   // (seed, fuzzer) evaluated; site_count = new bits at its granularity
  kDispatch,   // seed delivered to the fuzzer's queue
  kSkip,       // evaluated but not delivered
  kSynced,     // seed marked synced
  kCrash,      // crashing seed routed to triage
  kRestart,    // supervisor restarts in a tick; site_count = restart count
  kTerminate,  // reallocation stopped a fuzzer
  kJoin,       // a spare joined
  kBoost,      // energy doubled; site_count = new energy
  kThrottle,   // energy halved; site_count = new energy
};

std::string_view to_string(EventKind k);

// Replay log line: "<tick> <actor> <event> <seed-id-hex> <site-count>".
struct ReplayEvent {
  uint64_t tick = 0;
  std::string actor;
  EventKind kind = EventKind::kSubmit;
  uint64_t seed_id = 0;
  uint64_t site_count = 0;
};

std::string format_event(const ReplayEvent& e);

// Monitor-owned state. Both global maps only grow.
struct GlobalState {
  GlobalSeedPool pool;
  CoverageMap global_edge_cover{Granularity::kEdge};
  CoverageMap global_block_cover{Granularity::kBlock};
  // Every crashing seed the monitor has seen, once per seed: triage input.
  std::vector<CrashRecord> crashes;
  // Seeds that crashed while adding global coverage.
  std::vector<uint64_t> crashing_seeds;
  std::set<PathId> paths;
  std::set<BugKey> bug_keys;
  std::vector<Snapshot> timeline;
  std::vector<ReplayEvent> log;

  size_t path_count() const { return paths.size(); }
  size_t branch_count() const { return global_edge_cover.site_count(); }
  size_t unique_bugs() const { return bug_keys.size(); }
};

struct RoundReport {
  uint64_t evaluated = 0;
  uint64_t dispatched = 0;
  uint64_t new_global_bits = 0;
  uint64_t new_crashes = 0;
};

struct ReallocationAction {
  EventKind kind = EventKind::kTerminate;
  std::string fuzzer;
  std::string replacement;  // kTerminate only; empty when no spare joined
  uint32_t energy = 0;      // kBoost / kThrottle
};

struct FuzzerSummary {
  std::string name;
  FuzzerStats stats;
  size_t paths = 0;
  size_t branches = 0;
  uint32_t energy = 0;
  bool live = true;
};

struct FinalReport {
  std::string target;
  std::string mode = "sim";
  uint64_t ticks = 0;
  double wall_seconds = 0;
  size_t paths = 0;
  size_t branches = 0;
  size_t unique_bugs = 0;
  size_t pool_size = 0;
  std::vector<FuzzerSummary> fuzzers;
  std::vector<UniqueBug> bugs;
  std::vector<Snapshot> timeline;
};

// The global monitor. Owns the pool, both global coverage maps and every
// worker; the only writer of GlobalState. Not movable: workers hold
// references to the target and the pool channel.
class Ensemble {
 public:
  // Sets up workers and seeds the pool. Throws ConfigError.
  Ensemble(EnsembleConfig config, TargetSpec target);
  Ensemble(const Ensemble&) = delete;
  Ensemble& operator=(const Ensemble&) = delete;

  // Adds a worker built elsewhere (e.g. an external fuzzer adapter). It
  // receives the initial seeds like every other worker.
  void add_worker(std::unique_ptr<Worker> worker);

  // One simulation tick: every live worker fuzzes once, submissions reach
  // the pool, a sync round runs when due, a snapshot is appended.
  void tick(uint64_t t);

  // Moves pending submissions into the pool.
  void drain_submissions(uint64_t t);

  // Evaluates every unsynced seed against every live fuzzer and dispatches
  // the ones adding coverage. Seeds submitted while the round runs wait for
  // the next one.
  RoundReport sync_round(uint64_t t);

  // Applies the stall policy; no-op without one.
  std::vector<ReallocationAction> reallocate(uint64_t t);

  // Whole simulated run over config.run_budget ticks.
  FinalReport run();

  // Wall-clock run: one thread per worker, rounds every `period`.
  FinalReport run_realtime(std::chrono::milliseconds period, std::chrono::milliseconds budget);

  FinalReport report() const;

  const GlobalState& state() const { return state_; }
  const TargetSpec& target() const { return target_; }
  const EnsembleConfig& config() const { return config_; }
  PoolChannel& pool_channel() { return channel_; }
  Worker* worker(std::string_view name);
  std::vector<std::string> live_workers() const;

 private:
  struct Slot {
    std::unique_ptr<Worker> worker;
    std::unordered_set<uint64_t> known;  // seed ids in the worker's queue
    bool live = true;
    uint64_t stall_clock = 0;            // tick of the last join or reallocation
  };

  Slot& attach(std::unique_ptr<Worker> worker, uint64_t t, bool with_pool);
  void log(uint64_t t, std::string_view actor, EventKind kind, uint64_t seed, uint64_t count);
  void snapshot(uint64_t t);
  bool sync_due(uint64_t t) const;

  EnsembleConfig config_;
  TargetSpec target_;
  PoolChannel channel_;
  GlobalState state_;
  std::vector<Slot> slots_;
  std::set<uint64_t> routed_crashes_;
  size_t next_spare_ = 0;
  Supervisor supervisor_;
  uint64_t ticks_run_ = 0;
  double wall_seconds_ = 0;
  std::string mode_ = "sim";
};

}  // namespace enf

#endif  // ENF_MONITOR_H_
