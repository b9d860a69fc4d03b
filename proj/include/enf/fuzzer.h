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

#ifndef ENF_FUZZER_H_
#define ENF_FUZZER_H_

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "enf/corpus.h"
#include "enf/coverage.h"
#include "enf/mutate.h"
#include "enf/rng.h"
#include "enf/target.h"
#include "enf/triage.h"

namespace enf {

struct FuzzerConfig {
  std::string name;
  SelectionPolicy selection = SelectionPolicy::kRoundRobin;
  MutationStrategy mutation = MutationStrategy::kHavoc;
  Granularity granularity = Granularity::kEdge;
  std::vector<Bytes> dictionary;
  bool halts_on_crash = false;
  uint64_t rng_seed = 0;
  uint32_t mutations_per_seed = 8;
  size_t max_seed_len = kDefaultSeedCap;

  // Throws ConfigError: empty or non [a-z0-9_-] name, zero energy,
  // dictionary_splice without tokens, block_guided_havoc on edges.
  void validate() const;
};

bool valid_worker_name(std::string_view name);

struct FuzzerStats {
  uint64_t execs = 0;
  uint64_t seeds_contributed = 0;
  uint64_t last_new_coverage_tick = 0;
  uint64_t crashes = 0;
  uint64_t restarts = 0;
  uint64_t imported = 0;
};

struct TickReport {
  uint64_t execs = 0;
  uint64_t new_seeds = 0;
  uint64_t new_crashes = 0;
  uint64_t restarts = 0;
  // The worker stopped on a crash (halts_on_crash) and needs a restart
  // before it can finish the tick.
  bool halted = false;

  TickReport& operator+=(const TickReport& o) {
    execs += o.execs;
    new_seeds += o.new_seeds;
    new_crashes += o.new_crashes;
    restarts += o.restarts;
    halted = o.halted;
    return *this;
  }
};

// Anything the monitor can drive: an in-process base fuzzer or an adapter
// around an external fuzzer process.
class Worker {
 public:
  virtual ~Worker() = default;

  virtual const std::string& name() const = 0;
  virtual Granularity granularity() const = 0;
  virtual bool halts_on_crash() const = 0;

  // Runs (the rest of) one tick. Returns with halted=true when the worker
  // crash-halted; calling step() again after restart() resumes the tick.
  virtual TickReport step(uint64_t tick) = 0;

  // Brings a halted worker back. Returns false when the restart itself
  // crash-halted.
  virtual bool restart(uint64_t tick) = 0;

  // Inbound dispatch from the monitor. Thread-safe.
  virtual void deliver(Seed seed) = 0;

  // Thread-safe snapshot.
  virtual FuzzerStats stats() const = 0;

  // Distinct nonempty paths and edge sites over the worker's corpus.
  virtual size_t corpus_paths() const { return 0; }
  virtual size_t corpus_branches() const { return 0; }

  // Scales the tick's mutation budget (boost_slots reallocation).
  virtual uint32_t energy() const { return 0; }
  virtual void set_energy(uint32_t) {}
};

// The local fuzzing loop: select a seed, mutate it, run each mutant, keep
// and publish the ones that crash or add local coverage.
class BaseFuzzer : public Worker {
 public:
  BaseFuzzer(FuzzerConfig config, const TargetSpec& target, PoolChannel& pool);

  const std::string& name() const override { return config_.name; }
  Granularity granularity() const override { return config_.granularity; }
  bool halts_on_crash() const override { return config_.halts_on_crash; }

  TickReport step(uint64_t tick) override;
  bool restart(uint64_t tick) override;
  void deliver(Seed seed) override { inbox_.send(std::move(seed)); }
  FuzzerStats stats() const override;
  size_t corpus_paths() const override;
  size_t corpus_branches() const override;
  uint32_t energy() const override;
  void set_energy(uint32_t e) override;

  // One full tick without supervision. A halting fuzzer may return early
  // with halted=true.
  TickReport fuzz_tick(uint64_t tick) { return step(tick); }

  const FuzzerConfig& config() const { return config_; }
  const LocalQueue& queue() const { return queue_; }
  const CoverageMap& local_cover() const { return local_cover_; }
  const std::vector<CrashRecord>& crashes_found() const { return crashes_; }
  const SelectionStats& selection_stats() const { return sched_; }

 private:
  // Moves dispatched seeds into the queue, running each once.
  void drain_inbox(uint64_t tick, TickReport& report);
  ExecResult run_one(ByteView input);
  SeedProfile profile_of(const ExecResult& r) const;
  void publish(uint64_t tick);

  FuzzerConfig config_;
  const TargetSpec& target_;
  PoolChannel& pool_;
  DispatchChannel inbox_;
  Rng rng_;
  LocalQueue queue_;
  SeedSelector selector_;
  SelectionStats sched_;
  CoverageMap local_cover_;
  std::vector<CrashRecord> crashes_;
  size_t max_len_;

  // Tick in progress: seed being fuzzed and mutations left.
  uint64_t current_tick_ = 0;
  bool tick_open_ = false;
  std::optional<size_t> current_seed_;
  uint32_t remaining_ = 0;
  size_t restart_cursor_ = 0;

  FuzzerStats stats_;
  mutable std::mutex published_mu_;
  FuzzerStats published_;
  uint32_t energy_;
};

inline constexpr uint64_t kDefaultStormLimit = 1000;

// Restart-on-crash supervision for workers that halt when they find a
// crash. For workers that never halt it only forwards step().
class Supervisor {
 public:
  explicit Supervisor(uint64_t storm_limit = kDefaultStormLimit) : storm_limit_(storm_limit) {}

  // Drives `worker` through one tick, restarting it after every
  // crash-halt. Throws Error("crash storm") past storm_limit restarts.
  TickReport run_tick(Worker& worker, uint64_t tick) const;

 private:
  uint64_t storm_limit_;
};

}  // namespace enf

#endif  // ENF_FUZZER_H_
