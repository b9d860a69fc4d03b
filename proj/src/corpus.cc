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

#include "enf/corpus.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace enf {

std::string_view to_string(SeedCause c) {
  switch (c) {
    case SeedCause::kInitial: return "initial";
    case SeedCause::kNewCoverage: return "new_coverage";
    case SeedCause::kCrash: return "crash";
  }
  return "?";
}

Seed Seed::make(Bytes content, std::string origin, uint64_t birth_tick, SeedCause cause,
                size_t cap) {
  if (content.size() > cap) {
    throw Error("seed of " + std::to_string(content.size()) + " bytes exceeds cap " +
                std::to_string(cap));
  }
  Seed s;
  s.id = fnv1a64(content);
  s.content = std::move(content);
  s.origin = std::move(origin);
  s.birth_tick = birth_tick;
  s.cause = cause;
  return s;
}

bool GlobalSeedPool::push(Seed seed) {
  if (index_.contains(seed.id)) return false;
  index_.emplace(seed.id, entries_.size());
  entries_.push_back(Entry{std::move(seed), false});
  ++unsynced_;
  return true;
}

std::vector<Seed> GlobalSeedPool::unsynced() const {
  std::vector<Seed> out;
  out.reserve(unsynced_);
  for (const Entry& e : entries_) {
    if (!e.synced) out.push_back(e.seed);
  }
  return out;
}

void GlobalSeedPool::mark_synced(uint64_t id) {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error("unknown seed " + hex64(id));
  Entry& e = entries_[it->second];
  if (!e.synced) {
    e.synced = true;
    --unsynced_;
  }
}

const Seed* GlobalSeedPool::find(uint64_t id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entries_[it->second].seed;
}

bool GlobalSeedPool::is_synced(uint64_t id) const {
  auto it = index_.find(id);
  return it != index_.end() && entries_[it->second].synced;
}

bool LocalQueue::push(Seed seed, SeedProfile profile) {
  if (!ids_.insert(seed.id).second) return false;
  items_.push_back(QueueEntry{std::move(seed), std::move(profile)});
  return true;
}

std::string_view to_string(SelectionPolicy p) {
  switch (p) {
    case SelectionPolicy::kRoundRobin: return "round_robin";
    case SelectionPolicy::kRareBranch: return "rare_branch";
    case SelectionPolicy::kLowFreqPath: return "low_freq_path";
  }
  return "?";
}

SelectionPolicy parse_selection(std::string_view s) {
  if (s == "round_robin") return SelectionPolicy::kRoundRobin;
  if (s == "rare_branch") return SelectionPolicy::kRareBranch;
  if (s == "low_freq_path") return SelectionPolicy::kLowFreqPath;
  throw ConfigError("unknown selection policy '" + std::string(s) + "'");
}

void SelectionStats::record(const SeedProfile& profile) {
  for (SiteId s : profile.sites) ++site_hits[s];
  ++path_freq[profile.path];
}

uint64_t SelectionStats::frequency(PathId path) const {
  auto it = path_freq.find(path);
  return it == path_freq.end() ? 0 : it->second;
}

double SelectionStats::mean_frequency() const {
  if (path_freq.empty()) return 0.0;
  double total = 0;
  for (const auto& [path, n] : path_freq) total += static_cast<double>(n);
  return total / static_cast<double>(path_freq.size());
}

size_t SeedSelector::round_robin(const LocalQueue& queue) {
  if (cursor_ >= queue.size()) cursor_ = 0;
  return cursor_++;
}

size_t SeedSelector::select(const LocalQueue& queue, const SelectionStats& stats, Rng& rng) {
  if (queue.empty()) throw Error("queue empty");
  switch (policy_) {
    case SelectionPolicy::kRoundRobin:
      return round_robin(queue);

    case SelectionPolicy::kRareBranch: {
      // Rarest site among those any queued seed covers.
      std::optional<std::pair<uint64_t, SiteId>> rarest;
      for (const QueueEntry& e : queue.items()) {
        for (SiteId s : e.profile.sites) {
          auto it = stats.site_hits.find(s);
          std::pair<uint64_t, SiteId> key{it == stats.site_hits.end() ? 0 : it->second, s};
          if (!rarest || key < *rarest) rarest = key;
        }
      }
      if (!rarest) return round_robin(queue);
      std::optional<size_t> best;
      for (size_t i = 0; i < queue.size(); ++i) {
        const auto& sites = queue.at(i).profile.sites;
        if (std::find(sites.begin(), sites.end(), rarest->second) == sites.end()) continue;
        if (!best || queue.at(i).seed.id < queue.at(*best).seed.id) best = i;
      }
      return *best;
    }

    case SelectionPolicy::kLowFreqPath: {
      std::vector<double> weights(queue.size());
      double total = 0;
      for (size_t i = 0; i < queue.size(); ++i) {
        uint64_t f = std::max<uint64_t>(1, stats.frequency(queue.at(i).profile.path));
        weights[i] = 1.0 / static_cast<double>(f);
        total += weights[i];
      }
      double draw = rng.uniform() * total;
      for (size_t i = 0; i < weights.size(); ++i) {
        if (draw < weights[i]) return i;
        draw -= weights[i];
      }
      return queue.size() - 1;
    }
  }
  return 0;
}

uint32_t seed_energy(uint32_t base, SelectionPolicy policy, const SelectionStats& stats,
                     const SeedProfile& profile) {
  if (policy != SelectionPolicy::kLowFreqPath) return base;
  uint64_t f = std::max<uint64_t>(1, stats.frequency(profile.path));
  double ratio = std::ceil(stats.mean_frequency() / static_cast<double>(f));
  uint32_t factor = static_cast<uint32_t>(std::clamp(ratio, 1.0, 8.0));
  return base * factor;
}

}  // namespace enf
