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

#ifndef ENF_TESTS_AUDIT_H_
#define ENF_TESTS_AUDIT_H_

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "enf/monitor.h"
#include "enf/rng.h"
#include "enf/target.h"

namespace enf::testing {

// Checks the monitor's protocol from its replay log alone, re-executing
// pool seeds to rebuild the global maps independently. Returns the list of
// violations (empty when the run is clean).
inline std::vector<std::string> audit_replay(const Ensemble& ens) {
  std::vector<std::string> errors;
  const GlobalState& st = ens.state();
  const TargetSpec& target = ens.target();
  std::map<std::string, Granularity> granularity;
  for (const FuzzerConfig& f : ens.config().fuzzers) granularity[f.name] = f.granularity;
  for (const FuzzerConfig& f : ens.config().spares) granularity[f.name] = f.granularity;

  CoverageMap edges(Granularity::kEdge), blocks(Granularity::kBlock);
  CoverageMap before_edges = edges, before_blocks = blocks;
  std::map<std::pair<uint64_t, std::string>, int> evaluated, dispatched;
  std::set<uint64_t> executed, synced;
  std::set<uint64_t> open_in_round;
  uint64_t round_tick = UINT64_MAX;
  auto close_round = [&] {
    for (uint64_t id : open_in_round) {
      errors.push_back("seed " + hex64(id) + " not synced by the end of its round");
    }
    open_in_round.clear();
  };

  for (const ReplayEvent& e : st.log) {
    if (e.kind == EventKind::kExecute && e.tick != round_tick) {
      close_round();
      round_tick = e.tick;
    }
    switch (e.kind) {
      case EventKind::kExecute: {
        const Seed* s = st.pool.find(e.seed_id);
        if (!s) {
          errors.push_back("executed seed " + hex64(e.seed_id) + " is not pooled");
          break;
        }
        if (!executed.insert(e.seed_id).second) {
          errors.push_back("seed " + hex64(e.seed_id) + " executed twice");
        }
        open_in_round.insert(e.seed_id);
        ExecResult r = execute(target, s->content);
        before_edges = edges;
        before_blocks = blocks;
        merge_into(edges, r.edge_cover);
        merge_into(blocks, r.block_cover);
        if (e.site_count != r.edge_cover.site_count()) {
          errors.push_back("execute site count mismatch for " + hex64(e.seed_id));
        }
        break;
      }
      case EventKind::kEvaluate: {
        if (++evaluated[{e.seed_id, e.actor}] > 1) {
          errors.push_back("seed " + hex64(e.seed_id) + " evaluated twice for " + e.actor);
        }
        const Seed* s = st.pool.find(e.seed_id);
        auto g = granularity.find(e.actor);
        if (s && g != granularity.end()) {
          ExecResult r = execute(target, s->content);
          const CoverageMap& before = g->second == Granularity::kEdge ? before_edges : before_blocks;
          if (new_bits(before, r.cover(g->second)).bit_count() != e.site_count) {
            errors.push_back("evaluate new-bit count mismatch for " + hex64(e.seed_id));
          }
        }
        break;
      }
      case EventKind::kDispatch: {
        if (++dispatched[{e.seed_id, e.actor}] > 1) {
          errors.push_back("seed " + hex64(e.seed_id) + " dispatched twice to " + e.actor);
        }
        if (!evaluated.contains({e.seed_id, e.actor})) {
          errors.push_back("dispatch without evaluation");
        }
        const Seed* s = st.pool.find(e.seed_id);
        if (s && s->origin == e.actor) {
          errors.push_back("seed " + hex64(e.seed_id) + " dispatched back to its origin");
        }
        if (e.site_count == 0) errors.push_back("dispatch of a seed with no new bits");
        break;
      }
      case EventKind::kSynced:
        open_in_round.erase(e.seed_id);
        synced.insert(e.seed_id);
        break;
      default:
        break;
    }
  }
  close_round();
  for (uint64_t id : executed) {
    if (!st.pool.is_synced(id)) errors.push_back("executed seed left unsynced");
    // Without reallocation the fuzzer set is fixed: every pair exactly once.
    if (ens.config().reallocation) continue;
    for (const FuzzerConfig& f : ens.config().fuzzers) {
      if (!evaluated.contains({id, f.name})) {
        errors.push_back("seed " + hex64(id) + " never evaluated for " + f.name);
      }
    }
  }
  if (edges != st.global_edge_cover) errors.push_back("global edge map differs from replay fold");
  if (blocks != st.global_block_cover) {
    errors.push_back("global block map differs from replay fold");
  }
  return errors;
}

// A small randomized ensemble over a random target: 1-4 fuzzers mixing
// policies, strategies and granularities.
inline EnsembleConfig random_ensemble_config(Rng& rng, const TargetSpec& target) {
  EnsembleConfig cfg;
  size_t n = 1 + rng.below(4);
  for (size_t i = 0; i < n; ++i) {
    FuzzerConfig f;
    f.name = "f" + std::to_string(i);
    f.selection = static_cast<SelectionPolicy>(rng.below(3));
    f.granularity = rng.coin() ? Granularity::kEdge : Granularity::kBlock;
    switch (rng.below(4)) {
      case 0: f.mutation = MutationStrategy::kBitflip; break;
      case 1: f.mutation = MutationStrategy::kByteArith; break;
      case 2: f.mutation = MutationStrategy::kHavoc; break;
      default:
        f.mutation = MutationStrategy::kDictionarySplice;
        f.dictionary = {Bytes{static_cast<uint8_t>(rng.below(4))},
                        Bytes{static_cast<uint8_t>(rng.below(4)), static_cast<uint8_t>(rng.below(4))}};
    }
    if (f.granularity == Granularity::kBlock && f.mutation == MutationStrategy::kHavoc && rng.coin()) {
      f.mutation = MutationStrategy::kBlockGuidedHavoc;
    }
    f.halts_on_crash = rng.below(4) == 0;
    f.rng_seed = rng.next();
    f.mutations_per_seed = static_cast<uint32_t>(1 + rng.below(8));
    cfg.fuzzers.push_back(std::move(f));
  }
  size_t seeds = rng.below(3);
  for (size_t i = 0; i < seeds; ++i) {
    Bytes b(rng.below(target.max_input_len + 1));
    for (auto& c : b) c = static_cast<uint8_t>(rng.below(5));
    cfg.initial_seeds.push_back(std::move(b));
  }
  // A halting fuzzer whose queue holds only crashers storms by design; keep
  // one non-crashing seed around whenever some fuzzer halts.
  auto crashes = [&](const Bytes& b) { return execute(target, b).crashed; };
  const bool any_halts = std::any_of(cfg.fuzzers.begin(), cfg.fuzzers.end(),
                                     [](const FuzzerConfig& f) { return f.halts_on_crash; });
  const bool have_safe = cfg.initial_seeds.empty()
                             ? !crashes(Bytes{})
                             : std::any_of(cfg.initial_seeds.begin(), cfg.initial_seeds.end(),
                                           [&](const Bytes& b) { return !crashes(b); });
  if (any_halts && !have_safe) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      Bytes b(rng.below(target.max_input_len + 1));
      for (auto& c : b) c = static_cast<uint8_t>(rng.below(5));
      if (!crashes(b)) {
        cfg.initial_seeds.push_back(std::move(b));
        break;
      }
    }
    if (!std::any_of(cfg.initial_seeds.begin(), cfg.initial_seeds.end(),
                     [&](const Bytes& b) { return !crashes(b); })) {
      for (auto& f : cfg.fuzzers) f.halts_on_crash = false;
    }
  }
  cfg.sync_period = 1 + rng.below(10);
  cfg.run_budget = 20 + rng.below(60);
  cfg.sync = rng.below(5) != 0;
  return cfg;
}

}  // namespace enf::testing

#endif  // ENF_TESTS_AUDIT_H_
