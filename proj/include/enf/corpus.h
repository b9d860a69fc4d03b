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

#ifndef ENF_CORPUS_H_
#define ENF_CORPUS_H_

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "enf/common.h"
#include "enf/coverage.h"
#include "enf/rng.h"
#include "enf/triage.h"

namespace enf {

inline constexpr size_t kDefaultSeedCap = 4096;
inline constexpr std::string_view kInitialOrigin = "initial";

enum class SeedCause { kInitial, kNewCoverage, kCrash };

std::string_view to_string(SeedCause c);

struct Seed {
  uint64_t id = 0;  // fnv1a64(content)
  Bytes content;
  std::string origin;
  uint64_t birth_tick = 0;
  SeedCause cause = SeedCause::kInitial;

  // Computes the id. Throws Error when content exceeds `cap` bytes.
  static Seed make(Bytes content, std::string origin, uint64_t birth_tick, SeedCause cause,
                   size_t cap = kDefaultSeedCap);
};

// The monitor's seed pool: insertion-ordered, deduplicated by content hash,
// each entry carrying a one-way synced flag.
class GlobalSeedPool {
 public:
  // False (and no change) if a seed with the same id is already present.
  bool push(Seed seed);

  // Unsynced seeds in insertion order.
  std::vector<Seed> unsynced() const;

  // Throws Error("unknown seed") for an id that is not in the pool.
  void mark_synced(uint64_t id);

  bool contains(uint64_t id) const { return index_.contains(id); }
  const Seed* find(uint64_t id) const;
  bool is_synced(uint64_t id) const;
  size_t size() const { return entries_.size(); }
  size_t unsynced_count() const { return unsynced_; }

  struct Entry {
    Seed seed;
    bool synced = false;
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<uint64_t, size_t> index_;
  size_t unsynced_ = 0;
};

// What a fuzzer learned about a seed when it executed it.
struct SeedProfile {
  PathId path;
  std::vector<SiteId> sites;  // covered sites at the fuzzer's granularity
  bool crashes = false;
};

struct QueueEntry {
  Seed seed;
  SeedProfile profile;
};

// A base fuzzer's local FIFO queue. Owned by exactly one worker.
class LocalQueue {
 public:
  explicit LocalQueue(std::string owner = {}) : owner_(std::move(owner)) {}

  // Appends unless a seed with the same id is already queued.
  bool push(Seed seed, SeedProfile profile = {});

  bool contains(uint64_t id) const { return ids_.contains(id); }
  bool empty() const { return items_.empty(); }
  size_t size() const { return items_.size(); }
  const QueueEntry& at(size_t i) const { return items_[i]; }
  const std::deque<QueueEntry>& items() const { return items_; }
  const std::string& owner() const { return owner_; }

 private:
  std::string owner_;
  std::deque<QueueEntry> items_;
  std::unordered_set<uint64_t> ids_;
};

enum class SelectionPolicy { kRoundRobin, kRareBranch, kLowFreqPath };

std::string_view to_string(SelectionPolicy p);
SelectionPolicy parse_selection(std::string_view s);

// Execution statistics a fuzzer keeps for seed scheduling.
struct SelectionStats {
  std::unordered_map<SiteId, uint64_t> site_hits;  // executions touching each site
  std::map<PathId, uint64_t> path_freq;            // executions per path

  void record(const SeedProfile& profile);
  uint64_t frequency(PathId path) const;
  double mean_frequency() const;
};

// Picks the next seed to fuzz.
//   round_robin:    cyclic sweep in queue order.
//   rare_branch:    a seed covering the least-hit site (ties: lowest site id,
//                   then lowest seed id).
//   low_freq_path:  sampled with weight 1 / frequency(seed's path).
class SeedSelector {
 public:
  explicit SeedSelector(SelectionPolicy policy) : policy_(policy) {}

  // Index into `queue`. Throws Error("queue empty").
  size_t select(const LocalQueue& queue, const SelectionStats& stats, Rng& rng);

  SelectionPolicy policy() const { return policy_; }

 private:
  size_t round_robin(const LocalQueue& queue);

  SelectionPolicy policy_;
  size_t cursor_ = 0;
};

// Mutations granted to the selected seed. low_freq_path scales the base by
// min(8, ceil(mean frequency / frequency(seed's path))).
uint32_t seed_energy(uint32_t base, SelectionPolicy policy, const SelectionStats& stats,
                     const SeedProfile& profile);

// A unit travelling from a worker to the pool.
struct Submission {
  Seed seed;
  // Set when the worker has a backtrace of its own (external crash sidecars).
  std::optional<Backtrace> backtrace;
};

// Ordered multi-producer channel. Producers never block on the consumer
// beyond the short critical section of a push.
template <typename T>
class Channel {
 public:
  void send(T item) {
    std::lock_guard lock(mu_);
    items_.push_back(std::move(item));
  }
  std::vector<T> drain() {
    std::lock_guard lock(mu_);
    std::vector<T> out(std::make_move_iterator(items_.begin()),
                       std::make_move_iterator(items_.end()));
    items_.clear();
    return out;
  }
  size_t pending() const {
    std::lock_guard lock(mu_);
    return items_.size();
  }

 private:
  mutable std::mutex mu_;
  std::deque<T> items_;
};

using PoolChannel = Channel<Submission>;
using DispatchChannel = Channel<Seed>;

}  // namespace enf

#endif  // ENF_CORPUS_H_
