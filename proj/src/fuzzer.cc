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

#include "enf/fuzzer.h"

#include <algorithm>
#include <set>

#include "enf/log.h"

namespace enf {

bool valid_worker_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

void FuzzerConfig::validate() const {
  if (!valid_worker_name(name)) {
    throw ConfigError("fuzzer name '" + name + "' must match [a-z0-9_-]+");
  }
  if (mutations_per_seed < 1) throw ConfigError("fuzzer '" + name + "': mutations_per_seed must be >= 1");
  if (max_seed_len < 1) throw ConfigError("fuzzer '" + name + "': max_seed_len must be >= 1");
  if (mutation == MutationStrategy::kDictionarySplice &&
      (dictionary.empty() ||
       std::any_of(dictionary.begin(), dictionary.end(), [](const Bytes& t) { return t.empty(); }))) {
    throw ConfigError("fuzzer '" + name + "': dictionary_splice needs nonempty dictionary tokens");
  }
  if (mutation == MutationStrategy::kBlockGuidedHavoc && granularity != Granularity::kBlock) {
    throw ConfigError("fuzzer '" + name + "': block_guided_havoc requires block granularity");
  }
}

BaseFuzzer::BaseFuzzer(FuzzerConfig config, const TargetSpec& target, PoolChannel& pool)
    : config_(std::move(config)),
      target_(target),
      pool_(pool),
      rng_(config_.rng_seed),
      queue_(config_.name),
      selector_(config_.selection),
      local_cover_(config_.granularity),
      max_len_(std::min(config_.max_seed_len, target.max_input_len)),
      energy_(config_.mutations_per_seed) {
  config_.validate();
}

ExecResult BaseFuzzer::run_one(ByteView input) {
  ExecResult r = execute(target_, input);
  ++stats_.execs;
  sched_.record(profile_of(r));
  return r;
}

SeedProfile BaseFuzzer::profile_of(const ExecResult& r) const {
  SeedProfile p{r.path, {}, r.crashed};
  for (const auto& [site, mask] : r.cover(config_.granularity).slots()) p.sites.push_back(site);
  return p;
}

void BaseFuzzer::drain_inbox(uint64_t tick, TickReport& report) {
  for (Seed& seed : inbox_.drain()) {
    if (queue_.contains(seed.id)) continue;
    if (seed.content.size() > target_.max_input_len) {
      spdlog::debug("{}: dropping oversized dispatched seed {}", config_.name, hex64(seed.id));
      continue;
    }
    ExecResult r = run_one(seed.content);
    ++report.execs;
    merge_into(local_cover_, r.cover(config_.granularity));
    queue_.push(std::move(seed), profile_of(r));
    ++stats_.imported;
  }
  (void)tick;
}

TickReport BaseFuzzer::step(uint64_t tick) {
  TickReport report;
  if (!tick_open_ || current_tick_ != tick) {
    tick_open_ = true;
    current_tick_ = tick;
    current_seed_.reset();
    remaining_ = 0;
    drain_inbox(tick, report);
    if (queue_.empty()) {
      tick_open_ = false;
      publish(tick);
      return report;
    }
    current_seed_ = selector_.select(queue_, sched_, rng_);
    remaining_ = seed_energy(energy(), config_.selection, sched_, queue_.at(*current_seed_).profile);
  } else if (!current_seed_ && remaining_ > 0) {
    // Resuming after a restart: pick again from the current queue.
    current_seed_ = selector_.select(queue_, sched_, rng_);
  }

  while (remaining_ > 0) {
    --remaining_;
    Bytes mutant = mutate(queue_.at(*current_seed_).seed.content, config_.mutation,
                          config_.dictionary, rng_, max_len_);
    ExecResult r = run_one(mutant);
    ++report.execs;
    const bool fresh = !merge_into(local_cover_, r.cover(config_.granularity)).empty();
    if (fresh) stats_.last_new_coverage_tick = tick;
    if (!r.crashed && !fresh) continue;

    Seed seed = Seed::make(std::move(mutant), config_.name, tick,
                           r.crashed ? SeedCause::kCrash : SeedCause::kNewCoverage, max_len_);
    if (queue_.push(seed, profile_of(r))) {
      if (r.crashed) {
        crashes_.push_back(CrashRecord{seed.id, config_.name, tick, *r.backtrace});
        ++stats_.crashes;
        ++report.new_crashes;
      }
      pool_.send(Submission{std::move(seed), std::nullopt});
      ++stats_.seeds_contributed;
      ++report.new_seeds;
    }
    if (r.crashed && config_.halts_on_crash) {
      current_seed_.reset();
      report.halted = true;
      publish(tick);
      return report;
    }
  }
  tick_open_ = false;
  current_seed_.reset();
  publish(tick);
  return report;
}

bool BaseFuzzer::restart(uint64_t tick) {
  ++stats_.restarts;
  // Dry run of the next queued seed not known to crash; a queue of
  // crashers only re-runs a crasher and halts again.
  Bytes input;
  if (!queue_.empty()) {
    size_t pick = restart_cursor_ % queue_.size();
    for (size_t i = 0; i < queue_.size(); ++i) {
      size_t at = (restart_cursor_ + i) % queue_.size();
      if (!queue_.at(at).profile.crashes) {
        pick = at;
        break;
      }
    }
    restart_cursor_ = pick + 1;
    input = queue_.at(pick).seed.content;
  }
  ExecResult r = run_one(input);
  publish(tick);
  return !r.crashed;
}

void BaseFuzzer::publish(uint64_t) {
  std::lock_guard lock(published_mu_);
  published_ = stats_;
}

FuzzerStats BaseFuzzer::stats() const {
  std::lock_guard lock(published_mu_);
  return published_;
}

size_t BaseFuzzer::corpus_paths() const {
  std::set<PathId> paths;
  for (const QueueEntry& e : queue_.items()) {
    ExecResult r = execute(target_, e.seed.content);
    if (r.has_path()) paths.insert(r.path);
  }
  return paths.size();
}

size_t BaseFuzzer::corpus_branches() const {
  CoverageMap edges(Granularity::kEdge);
  for (const QueueEntry& e : queue_.items()) {
    merge_into(edges, execute(target_, e.seed.content).edge_cover);
  }
  return edges.site_count();
}

uint32_t BaseFuzzer::energy() const {
  std::lock_guard lock(published_mu_);
  return energy_;
}

void BaseFuzzer::set_energy(uint32_t e) {
  std::lock_guard lock(published_mu_);
  energy_ = std::max<uint32_t>(1, e);
}

}  // namespace enf
