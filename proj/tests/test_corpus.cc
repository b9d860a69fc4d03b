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

#include <gtest/gtest.h>

#include <set>
#include <thread>

#include "test_util.h"

namespace enf {
namespace {

Seed seed_of(std::string_view content, std::string origin = "f1") {
  return Seed::make(to_bytes(content), std::move(origin), 0, SeedCause::kNewCoverage);
}

SeedProfile profile(std::vector<SiteId> sites, uint64_t path) {
  return SeedProfile{PathId{path}, std::move(sites), false};
}

TEST(Seed, IdIsTheContentHash) {
  Seed s = seed_of("abc");
  EXPECT_EQ(s.id, fnv1a64(std::string_view("abc")));
  EXPECT_EQ(seed_of("").id, 0xcbf29ce484222325ULL);
}

TEST(Seed, CapIsEnforced) {
  EXPECT_NO_THROW(Seed::make(Bytes(4096), "f", 0, SeedCause::kInitial));
  EXPECT_THROW(Seed::make(Bytes(4097), "f", 0, SeedCause::kInitial), Error);
  EXPECT_THROW(Seed::make(Bytes(11), "f", 0, SeedCause::kInitial, 10), Error);
}

TEST(GlobalSeedPool, PushDeduplicatesByContent) {
  GlobalSeedPool pool;
  EXPECT_TRUE(pool.push(seed_of("abc")));
  EXPECT_FALSE(pool.push(seed_of("abc", "f2")));
  EXPECT_EQ(pool.size(), 1u);
  EXPECT_FALSE(pool.is_synced(seed_of("abc").id));
}

TEST(GlobalSeedPool, OneByteDifferenceGivesTwoEntries) {
  GlobalSeedPool pool;
  ASSERT_NE(fnv1a64(std::string_view("abcd")), fnv1a64(std::string_view("abce")));
  EXPECT_TRUE(pool.push(seed_of("abcd")));
  EXPECT_TRUE(pool.push(seed_of("abce")));
  EXPECT_EQ(pool.size(), 2u);
}

TEST(GlobalSeedPool, UnsyncedInInsertionOrder) {
  GlobalSeedPool pool;
  EXPECT_TRUE(pool.unsynced().empty());
  for (auto c : {"c", "a", "b"}) pool.push(seed_of(c));
  auto all = pool.unsynced();
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(to_string(all[0].content), "c");
  EXPECT_EQ(to_string(all[2].content), "b");
  pool.mark_synced(seed_of("a").id);
  auto rest = pool.unsynced();
  ASSERT_EQ(rest.size(), 2u);
  EXPECT_EQ(to_string(rest[0].content), "c");
  EXPECT_EQ(to_string(rest[1].content), "b");
  EXPECT_EQ(pool.unsynced_count(), 2u);
}

TEST(GlobalSeedPool, MarkSyncedUnknownSeed) {
  GlobalSeedPool pool;
  try {
    pool.mark_synced(42);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unknown seed"), std::string::npos);
  }
}

TEST(GlobalSeedPool, PropertiesUnderRandomOperations) {
  Rng rng(21);
  for (int round = 0; round < 100; ++round) {
    GlobalSeedPool pool;
    std::set<Bytes> distinct;
    std::set<uint64_t> synced;
    for (int i = 0; i < 60; ++i) {
      if (pool.size() > 0 && rng.coin()) {
        const auto& e = pool.entries()[rng.below(pool.size())];
        size_t before = pool.unsynced_count();
        bool was_synced = e.synced;
        uint64_t id = e.seed.id;
        pool.mark_synced(id);
        synced.insert(id);
        EXPECT_EQ(pool.unsynced_count(), was_synced ? before : before - 1);
      } else {
        Bytes b = testing::random_bytes(rng, 2);
        distinct.insert(b);
        pool.push(Seed::make(b, "f", 0, SeedCause::kNewCoverage));
      }
      EXPECT_EQ(pool.size(), distinct.size());
      EXPECT_EQ(pool.unsynced().size() + synced.size(), pool.size());
      for (uint64_t id : synced) EXPECT_TRUE(pool.is_synced(id));
    }
  }
}

TEST(LocalQueue, FifoWithoutDuplicates) {
  LocalQueue q("f1");
  EXPECT_TRUE(q.push(seed_of("a")));
  EXPECT_TRUE(q.push(seed_of("b")));
  EXPECT_FALSE(q.push(seed_of("a")));
  EXPECT_TRUE(q.push(seed_of("c")));
  ASSERT_EQ(q.size(), 3u);
  EXPECT_EQ(to_string(q.at(0).seed.content), "a");
  EXPECT_EQ(to_string(q.at(1).seed.content), "b");
  EXPECT_EQ(to_string(q.at(2).seed.content), "c");
  EXPECT_EQ(q.owner(), "f1");
}

TEST(SeedSelector, EmptyQueue) {
  LocalQueue q;
  SelectionStats stats;
  Rng rng(1);
  for (auto p : {SelectionPolicy::kRoundRobin, SelectionPolicy::kRareBranch,
                 SelectionPolicy::kLowFreqPath}) {
    SeedSelector sel(p);
    try {
      sel.select(q, stats, rng);
      FAIL() << "expected an error";
    } catch (const Error& e) {
      EXPECT_STREQ(e.what(), "queue empty");
    }
  }
}

TEST(SeedSelector, RoundRobinCycles) {
  LocalQueue q;
  for (auto c : {"a", "b", "c"}) q.push(seed_of(c));
  SelectionStats stats;
  Rng rng(1);
  SeedSelector sel(SelectionPolicy::kRoundRobin);
  std::vector<size_t> got;
  for (int i = 0; i < 7; ++i) got.push_back(sel.select(q, stats, rng));
  EXPECT_EQ(got, (std::vector<size_t>{0, 1, 2, 0, 1, 2, 0}));
}

TEST(SeedSelector, RoundRobinVisitsEverySeedBeforeRepeating) {
  Rng rng(22);
  for (int round = 0; round < 50; ++round) {
    LocalQueue q;
    size_t n = 1 + rng.below(10);
    for (size_t i = 0; i < n; ++i) q.push(seed_of(std::to_string(i)));
    SeedSelector sel(SelectionPolicy::kRoundRobin);
    SelectionStats stats;
    std::set<size_t> seen;
    for (size_t i = 0; i < n; ++i) EXPECT_TRUE(seen.insert(sel.select(q, stats, rng)).second);
  }
}

TEST(SeedSelector, RareBranchPrefersTheRareSite) {
  LocalQueue q;
  q.push(seed_of("a"), profile({1}, 10));
  q.push(seed_of("b"), profile({1}, 11));
  q.push(seed_of("rare"), profile({2}, 12));
  SelectionStats stats;
  stats.site_hits[1] = 10;
  stats.site_hits[2] = 1;
  Rng rng(1);
  SeedSelector sel(SelectionPolicy::kRareBranch);
  EXPECT_EQ(to_string(q.at(sel.select(q, stats, rng)).seed.content), "rare");
}

TEST(SeedSelector, RareBranchTieBreaksOnLowestSeedId) {
  LocalQueue q;
  q.push(seed_of("x"), profile({5}, 1));
  q.push(seed_of("y"), profile({5}, 2));
  SelectionStats stats;
  stats.site_hits[5] = 3;
  Rng rng(1);
  SeedSelector sel(SelectionPolicy::kRareBranch);
  size_t pick = sel.select(q, stats, rng);
  EXPECT_EQ(q.at(pick).seed.id, std::min(seed_of("x").id, seed_of("y").id));
}

TEST(SeedSelector, LowFreqPathFavoursTheRarePath) {
  LocalQueue q;
  q.push(seed_of("a"), profile({1}, 100));
  q.push(seed_of("b"), profile({2}, 200));
  SelectionStats stats;
  stats.path_freq[PathId{100}] = 1;
  stats.path_freq[PathId{200}] = 99;
  // Weights 1 : 1/99 give a 99% share to a; 100 draws land well above 90.
  Rng rng(7);
  SeedSelector sel(SelectionPolicy::kLowFreqPath);
  int a = 0;
  for (int i = 0; i < 100; ++i) a += sel.select(q, stats, rng) == 0;
  EXPECT_GE(a, 90);
}

TEST(SeedEnergy, InverseFrequencyCappedAtEight) {
  SelectionStats stats;
  stats.path_freq[PathId{1}] = 1;
  stats.path_freq[PathId{2}] = 99;
  // mean = 50
  EXPECT_EQ(seed_energy(8, SelectionPolicy::kLowFreqPath, stats, profile({}, 1)), 64u);
  EXPECT_EQ(seed_energy(8, SelectionPolicy::kLowFreqPath, stats, profile({}, 2)), 8u);
  EXPECT_EQ(seed_energy(8, SelectionPolicy::kRoundRobin, stats, profile({}, 1)), 8u);
  stats.path_freq[PathId{3}] = 20;  // mean 40 -> ceil(40/20) = 2
  EXPECT_EQ(seed_energy(8, SelectionPolicy::kLowFreqPath, stats, profile({}, 3)), 16u);
}

TEST(Channel, PreservesOrderAcrossProducers) {
  Channel<int> ch;
  std::thread a([&] {
    for (int i = 0; i < 1000; ++i) ch.send(i);
  });
  std::thread b([&] {
    for (int i = 1000; i < 2000; ++i) ch.send(i);
  });
  a.join();
  b.join();
  auto items = ch.drain();
  ASSERT_EQ(items.size(), 2000u);
  int last_a = -1, last_b = 999;
  for (int v : items) {
    int& last = v < 1000 ? last_a : last_b;
    EXPECT_GT(v, last);
    last = v;
  }
  EXPECT_EQ(ch.pending(), 0u);
}

}  // namespace
}  // namespace enf
