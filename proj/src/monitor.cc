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

#include "enf/monitor.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>


namespace enf {

std::string_view to_string(ReallocationPolicy::Action a) {
  switch (a) {
    case ReallocationPolicy::Action::kTerminateAndReplace:
      return "terminate_and_replace";
    case ReallocationPolicy::Action::kBoostSlots:
      return "boost_slots";
  }
  return "?";
}

ReallocationPolicy::Action parse_reallocation_action(std::string_view s) {
  if (s == "terminate_and_replace") return ReallocationPolicy::Action::kTerminateAndReplace;
  if (s == "boost_slots") return ReallocationPolicy::Action::kBoostSlots;
  throw ConfigError(fmt::format("unknown reallocation action '{}'", s));
}

void EnsembleConfig::validate() const {
  if (fuzzers.empty()) throw ConfigError("ensemble has no fuzzers");
  if (sync_period == 0) throw ConfigError("sync_period must be positive");
  if (seed_cap == 0) throw ConfigError("seed_cap must be positive");
  if (storm_limit == 0) throw ConfigError("storm_limit must be positive");
  if (reallocation && reallocation->stall_window == 0) {
    throw ConfigError("stall_window must be positive");
  }
  std::set<std::string_view> names;
  for (const auto* list : {&fuzzers, &spares}) {
    for (const FuzzerConfig& f : *list) {
      f.validate();
      if (!names.insert(f.name).second) {
        throw ConfigError(fmt::format("duplicate fuzzer name '{}'", f.name));
      }
    }
  }
  for (const Bytes& s : initial_seeds) {
    if (s.size() > seed_cap) {
      throw ConfigError(fmt::format("initial seed of {} bytes exceeds seed_cap {}", s.size(),
                                    seed_cap));
    }
  }
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::kSubmit: return "submit";
    case EventKind::kDuplicate: return "duplicate";
    case EventKind::kReject: return "reject";
    case EventKind::kExecute: return "execute";
    case EventKind::kEvaluate: return "evaluate";
    case EventKind::kDispatch: return "dispatch";
    case EventKind::kSkip: return "skip";
    case EventKind::kSynced: return "synced";
    case EventKind::kCrash: return "crash";
    case EventKind::kRestart: return "restart";
    case EventKind::kTerminate: return "terminate";
    case EventKind::kJoin: return "join";
    case EventKind::kBoost: return "boost";
    case EventKind::kThrottle: return "throttle";
  }
  return "?";
}

std::string format_event(const ReplayEvent& e) {
  return fmt::format("{} {} {} {} {}", e.tick, e.actor, to_string(e.kind), hex64(e.seed_id),
                     e.site_count);
}

Ensemble::Ensemble(EnsembleConfig config, TargetSpec target)
    : config_(std::move(config)), target_(std::move(target)), supervisor_(config_.storm_limit) {
  config_.validate();
  target_.validate();
  for (const Bytes& s : config_.initial_seeds) {
    if (s.size() > target_.max_input_len) {
      throw ConfigError(fmt::format("initial seed of {} bytes exceeds target max_len {}",
                                    s.size(), target_.max_input_len));
    }
  }
  std::vector<Bytes> initial = config_.initial_seeds;
  if (initial.empty()) initial.emplace_back();
  for (Bytes& content : initial) {
    Seed seed = Seed::make(std::move(content), std::string(kInitialOrigin), 0, SeedCause::kInitial,
                           config_.seed_cap);
    uint64_t id = seed.id;
    if (state_.pool.push(std::move(seed))) log(0, kInitialOrigin, EventKind::kSubmit, id, 0);
  }
  for (const FuzzerConfig& f : config_.fuzzers) {
    FuzzerConfig c = f;
    c.max_seed_len = std::min(c.max_seed_len, config_.seed_cap);
    attach(std::make_unique<BaseFuzzer>(std::move(c), target_, channel_), 0, false);
  }
}

Ensemble::Slot& Ensemble::attach(std::unique_ptr<Worker> worker, uint64_t t, bool with_pool) {
  Slot slot;
  slot.worker = std::move(worker);
  slot.stall_clock = t;
  // Every worker starts from the initial seeds; a late joiner inherits the
  // whole pool.
  for (const auto& entry : state_.pool.entries()) {
    if (!with_pool && entry.seed.origin != kInitialOrigin) continue;
    slot.worker->deliver(entry.seed);
    slot.known.insert(entry.seed.id);
  }
  slots_.push_back(std::move(slot));
  return slots_.back();
}

void Ensemble::add_worker(std::unique_ptr<Worker> worker) {
  if (!valid_worker_name(worker->name())) {
    throw ConfigError(fmt::format("invalid worker name '{}'", worker->name()));
  }
  bool taken = std::any_of(slots_.begin(), slots_.end(),
                           [&](const Slot& s) { return s.worker->name() == worker->name(); }) ||
               std::any_of(config_.spares.begin(), config_.spares.end(),
                           [&](const FuzzerConfig& f) { return f.name == worker->name(); });
  if (taken) throw ConfigError(fmt::format("duplicate fuzzer name '{}'", worker->name()));
  attach(std::move(worker), ticks_run_, ticks_run_ > 0);
}

Worker* Ensemble::worker(std::string_view name) {
  for (Slot& s : slots_) {
    if (s.worker->name() == name) return s.worker.get();
  }
  return nullptr;
}

std::vector<std::string> Ensemble::live_workers() const {
  std::vector<std::string> out;
  for (const Slot& s : slots_) {
    if (s.live) out.push_back(s.worker->name());
  }
  return out;
}

void Ensemble::log(uint64_t t, std::string_view actor, EventKind kind, uint64_t seed,
                   uint64_t count) {
  state_.log.push_back(ReplayEvent{t, std::string(actor), kind, seed, count});
}

bool Ensemble::sync_due(uint64_t t) const {
  return t % config_.sync_period == 0 || t == config_.run_budget;
}

void Ensemble::snapshot(uint64_t t) {
  state_.timeline.push_back(
      Snapshot{t, state_.path_count(), state_.branch_count(), state_.unique_bugs()});
}

void Ensemble::drain_submissions(uint64_t t) {
  for (Submission& sub : channel_.drain()) {
    Seed& seed = sub.seed;
    const std::string origin = seed.origin;
    if (seed.content.size() > config_.seed_cap || seed.content.size() > target_.max_input_len) {
      log(t, origin, EventKind::kReject, seed.id, 0);
      continue;
    }
    for (Slot& s : slots_) {
      if (s.worker->name() == origin) s.known.insert(seed.id);
    }
    const uint64_t id = seed.id;
    const uint64_t birth = seed.birth_tick;
    bool fresh = state_.pool.push(std::move(seed));
    log(t, origin, fresh ? EventKind::kSubmit : EventKind::kDuplicate, id, 0);
    if (sub.backtrace && routed_crashes_.insert(id).second) {
      CrashRecord rec{id, origin, birth, *sub.backtrace};
      state_.bug_keys.insert(rec.bug_key());
      state_.crashes.push_back(std::move(rec));
      log(t, origin, EventKind::kCrash, id, 0);
    }
  }
}

RoundReport Ensemble::sync_round(uint64_t t) {
  RoundReport rr;
  for (const Seed& seed : state_.pool.unsynced()) {
    ExecResult r = execute(target_, seed.content);
    ++rr.evaluated;
    log(t, "monitor", EventKind::kExecute, seed.id, r.edge_cover.site_count());
    if (r.has_path()) state_.paths.insert(r.path);

    // New coverage relative to the global view before this seed; merged once.
    CoverageMap new_edge = merge_into(state_.global_edge_cover, r.edge_cover);
    CoverageMap new_block = merge_into(state_.global_block_cover, r.block_cover);
    rr.new_global_bits += new_edge.bit_count() + new_block.bit_count();

    if (r.crashed && routed_crashes_.insert(seed.id).second) {
      CrashRecord rec{seed.id, seed.origin, seed.birth_tick, *r.backtrace};
      state_.bug_keys.insert(rec.bug_key());
      state_.crashes.push_back(std::move(rec));
      ++rr.new_crashes;
      log(t, "monitor", EventKind::kCrash, seed.id, 0);
    }

    bool listed_crash = false;
    for (Slot& slot : slots_) {
      if (!slot.live) continue;
      const std::string& name = slot.worker->name();
      const CoverageMap& fresh =
          slot.worker->granularity() == Granularity::kEdge ? new_edge : new_block;
      log(t, name, EventKind::kEvaluate, seed.id, fresh.bit_count());
      if (fresh.site_count() == 0) {
        log(t, name, EventKind::kSkip, seed.id, 0);
        continue;
      }
      if (r.crashed && !listed_crash) {
        state_.crashing_seeds.push_back(seed.id);
        listed_crash = true;
      }
      if (!config_.sync || seed.origin == name || slot.known.contains(seed.id)) {
        log(t, name, EventKind::kSkip, seed.id, fresh.bit_count());
        continue;
      }
      slot.worker->deliver(seed);
      slot.known.insert(seed.id);
      ++rr.dispatched;
      log(t, name, EventKind::kDispatch, seed.id, fresh.bit_count());
    }
    state_.pool.mark_synced(seed.id);
    log(t, "monitor", EventKind::kSynced, seed.id, 0);
  }
  return rr;
}

std::vector<ReallocationAction> Ensemble::reallocate(uint64_t t) {
  std::vector<ReallocationAction> actions;
  if (!config_.reallocation) return actions;
  const ReallocationPolicy& policy = *config_.reallocation;

  std::vector<size_t> stalled;
  std::vector<size_t> active;
  for (size_t i = 0; i < slots_.size(); ++i) {
    if (!slots_[i].live) continue;
    uint64_t last = std::max(slots_[i].worker->stats().last_new_coverage_tick,
                             slots_[i].stall_clock);
    (t > last && t - last > policy.stall_window ? stalled : active).push_back(i);
  }
  if (stalled.empty()) return actions;

  if (policy.action == ReallocationPolicy::Action::kTerminateAndReplace) {
    for (size_t i : stalled) {
      if (next_spare_ >= config_.spares.size()) break;
      FuzzerConfig spare = config_.spares[next_spare_++];
      spare.max_seed_len = std::min(spare.max_seed_len, config_.seed_cap);
      slots_[i].live = false;
      std::string old_name = slots_[i].worker->name();
      log(t, old_name, EventKind::kTerminate, 0, 0);
      // attach() may reallocate slots_; no references survive past here.
      std::string new_name = spare.name;
      attach(std::make_unique<BaseFuzzer>(std::move(spare), target_, channel_), t, true);
      log(t, new_name, EventKind::kJoin, 0, state_.pool.size());
      actions.push_back({EventKind::kTerminate, old_name, new_name, 0});
      spdlog::info("tick {}: replaced stalled fuzzer '{}' with '{}'", t, old_name, new_name);
    }
    return actions;
  }

  // boost_slots: laggards give up half their budget, the most productive
  // active fuzzer gets twice its own.
  if (active.empty()) return actions;
  size_t leader = active.front();
  for (size_t i : active) {
    const auto lead = slots_[leader].worker->stats().seeds_contributed;
    const auto cand = slots_[i].worker->stats().seeds_contributed;
    if (cand > lead || (cand == lead && slots_[i].worker->name() < slots_[leader].worker->name())) {
      leader = i;
    }
  }
  for (size_t i : stalled) {
    Worker& w = *slots_[i].worker;
    uint32_t e = std::max<uint32_t>(1, w.energy() / 2);
    w.set_energy(e);
    slots_[i].stall_clock = t;
    log(t, w.name(), EventKind::kThrottle, 0, e);
    actions.push_back({EventKind::kThrottle, w.name(), {}, e});
  }
  Worker& lw = *slots_[leader].worker;
  uint32_t e = std::min<uint32_t>(kMaxWorkerEnergy, std::max<uint32_t>(1, lw.energy()) * 2);
  lw.set_energy(e);
  log(t, lw.name(), EventKind::kBoost, 0, e);
  actions.push_back({EventKind::kBoost, lw.name(), {}, e});
  return actions;
}

void Ensemble::tick(uint64_t t) {
  for (size_t i = 0; i < slots_.size(); ++i) {
    if (!slots_[i].live) continue;
    TickReport rep = supervisor_.run_tick(*slots_[i].worker, t);
    if (rep.restarts > 0) log(t, slots_[i].worker->name(), EventKind::kRestart, 0, rep.restarts);
  }
  drain_submissions(t);
  if (sync_due(t)) {
    sync_round(t);
    reallocate(t);
  }
  snapshot(t);
  ticks_run_ = t;
}

FinalReport Ensemble::run() {
  const auto start = std::chrono::steady_clock::now();
  mode_ = "sim";
  if (config_.run_budget == 0) {
    drain_submissions(0);
    sync_round(0);
  }
  for (uint64_t t = ticks_run_ + 1; t <= config_.run_budget; ++t) tick(t);
  wall_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report();
}

FinalReport Ensemble::run_realtime(std::chrono::milliseconds period,
                                   std::chrono::milliseconds budget) {
  using Clock = std::chrono::steady_clock;
  if (period.count() <= 0) throw ConfigError("sync period must be positive");
  mode_ = "real";
  const auto start = Clock::now();
  const auto end = start + budget;

  std::atomic<uint64_t> round{0};
  std::atomic<bool> stop{false};
  std::mutex err_mu;
  std::exception_ptr error;
  // One flag per slot; a terminated worker's thread exits at its next step.
  std::vector<std::unique_ptr<std::atomic<bool>>> running;
  std::vector<std::thread> threads;

  auto spawn = [&](size_t idx) {
    running.push_back(std::make_unique<std::atomic<bool>>(true));
    std::atomic<bool>* flag = running.back().get();
    Worker* w = slots_[idx].worker.get();
    threads.emplace_back([&, w, flag] {
      try {
        while (!stop.load() && flag->load()) supervisor_.run_tick(*w, round.load());
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!error) error = std::current_exception();
        stop.store(true);
      }
    });
  };
  for (size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].live) {
      spawn(i);
    } else {
      running.push_back(std::make_unique<std::atomic<bool>>(false));
    }
  }

  auto next = start + period;
  while (!stop.load() && Clock::now() < end) {
    std::this_thread::sleep_until(std::min(next, end));
    next += period;
    uint64_t r = round.load() + 1;
    drain_submissions(r);
    sync_round(r);
    size_t before = slots_.size();
    reallocate(r);
    for (size_t i = 0; i < before; ++i) {
      if (!slots_[i].live) running[i]->store(false);
    }
    for (size_t i = before; i < slots_.size(); ++i) spawn(i);
    snapshot(r);
    round.store(r);
  }
  stop.store(true);
  for (std::thread& th : threads) th.join();
  if (error) std::rethrow_exception(error);

  uint64_t r = round.load() + 1;
  drain_submissions(r);
  sync_round(r);
  snapshot(r);
  ticks_run_ = r;
  wall_seconds_ = std::chrono::duration<double>(Clock::now() - start).count();
  return report();
}

FinalReport Ensemble::report() const {
  FinalReport rep;
  rep.target = target_.name;
  rep.mode = mode_;
  rep.ticks = ticks_run_;
  rep.wall_seconds = wall_seconds_;
  rep.paths = state_.path_count();
  rep.branches = state_.branch_count();
  rep.unique_bugs = state_.unique_bugs();
  rep.pool_size = state_.pool.size();
  for (const Slot& s : slots_) {
    rep.fuzzers.push_back(FuzzerSummary{s.worker->name(), s.worker->stats(),
                                        s.worker->corpus_paths(), s.worker->corpus_branches(),
                                        s.worker->energy(), s.live});
  }
  rep.bugs = dedup(state_.crashes);
  rep.timeline = state_.timeline;
  return rep;
}

}  // namespace enf
