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

#include "enf/mutate.h"

#include <gtest/gtest.h>

#include "test_util.h"

namespace enf {
namespace {

const std::vector<MutationStrategy> kAll = {
    MutationStrategy::kBitflip, MutationStrategy::kByteArith, MutationStrategy::kHavoc,
    MutationStrategy::kDictionarySplice, MutationStrategy::kBlockGuidedHavoc};

TEST(FlipBit, LowBitOfZero) {
  Bytes b = {0x00};
  flip_bit(b, 0);
  EXPECT_EQ(b, Bytes{0x01});
  flip_bit(b, 15 - 8);
  EXPECT_EQ(b, Bytes{0x81});
}

TEST(SpliceToken, OverwritesThePrefix) {
  Bytes b(21, 'X');
  splice_token(b, to_bytes("Magic Str"), 0, SpliceMode::kOverwrite, 4096);
  EXPECT_EQ(to_string(b), "Magic StrXXXXXXXXXXXX");
}

TEST(SpliceToken, InsertShiftsAndOverwriteExtends) {
  Bytes b = to_bytes("abcd");
  splice_token(b, to_bytes("XY"), 2, SpliceMode::kInsert, 4096);
  EXPECT_EQ(to_string(b), "abXYcd");
  Bytes c = to_bytes("abcd");
  splice_token(c, to_bytes("XYZ"), 3, SpliceMode::kOverwrite, 4096);
  EXPECT_EQ(to_string(c), "abcXYZ");
  Bytes d = to_bytes("ab");
  splice_token(d, to_bytes("XY"), 99, SpliceMode::kOverwrite, 4096);  // clamped to the end
  EXPECT_EQ(to_string(d), "abXY");
  Bytes e = to_bytes("abcd");
  splice_token(e, to_bytes("XYZ"), 1, SpliceMode::kInsert, 5);
  EXPECT_EQ(to_string(e), "aXYZb");
}

TEST(Mutate, HavocIsDeterministicForAFixedSeed) {
  const Bytes input = to_bytes("the quick brown fox");
  for (auto s : {MutationStrategy::kHavoc, MutationStrategy::kBitflip, MutationStrategy::kByteArith}) {
    Rng a(99), b(99);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(mutate(input, s, {}, a, 64), mutate(input, s, {}, b, 64));
  }
}

TEST(Mutate, BitflipAndArithAlwaysChangeNonEmptyInput) {
  Rng rng(41);
  for (int i = 0; i < 2000; ++i) {
    Bytes in = testing::random_bytes(rng, 16);
    if (in.empty()) continue;
    EXPECT_NE(mutate(in, MutationStrategy::kBitflip, {}, rng, 64), in);
    EXPECT_NE(mutate(in, MutationStrategy::kByteArith, {}, rng, 64), in);
  }
}

TEST(Mutate, EmptyInputGrows) {
  Rng rng(42);
  EXPECT_EQ(mutate({}, MutationStrategy::kBitflip, {}, rng, 64).size(), 1u);
  EXPECT_EQ(mutate({}, MutationStrategy::kByteArith, {}, rng, 64).size(), 1u);
}

TEST(Mutate, ByteArithChangesOneByteByAtMost35) {
  Rng rng(43);
  for (int i = 0; i < 2000; ++i) {
    Bytes in = testing::random_bytes(rng, 16);
    if (in.empty()) continue;
    Bytes out = mutate(in, MutationStrategy::kByteArith, {}, rng, 64);
    ASSERT_EQ(out.size(), in.size());
    int changed = 0;
    for (size_t k = 0; k < in.size(); ++k) {
      if (in[k] == out[k]) continue;
      ++changed;
      int up = (out[k] - in[k] + 256) % 256;
      int down = (in[k] - out[k] + 256) % 256;
      EXPECT_TRUE((up >= 1 && up <= 35) || (down >= 1 && down <= 35));
    }
    EXPECT_EQ(changed, 1);
  }
}

TEST(Mutate, RespectsTheLengthCap) {
  Rng rng(44);
  std::vector<Bytes> dict = {to_bytes("Magic Str"), to_bytes("Z")};
  for (int i = 0; i < 3000; ++i) {
    size_t cap = 1 + rng.below(20);
    Bytes in = testing::random_bytes(rng, cap);
    for (auto s : kAll) EXPECT_LE(mutate(in, s, dict, rng, cap).size(), cap);
  }
}

TEST(Mutate, DictionarySpliceContainsAToken) {
  Rng rng(45);
  std::vector<Bytes> dict = {to_bytes("Magic Num")};
  for (int i = 0; i < 500; ++i) {
    Bytes in = testing::random_bytes(rng, 30);
    std::string out = to_string(mutate(in, MutationStrategy::kDictionarySplice, dict, rng, 64));
    EXPECT_NE(out.find("Magic Num"), std::string::npos);
  }
}

TEST(Mutate, DictionarySpliceNeedsTokens) {
  Rng rng(46);
  EXPECT_THROW(mutate(to_bytes("a"), MutationStrategy::kDictionarySplice, {}, rng, 64), Error);
}

TEST(MutationStrategy, Names) {
  for (auto s : kAll) EXPECT_EQ(parse_mutation(to_string(s)), s);
  EXPECT_EQ(to_string(MutationStrategy::kBlockGuidedHavoc), "block_guided_havoc");
  EXPECT_THROW(parse_mutation("radamsa"), ConfigError);
}

}  // namespace
}  // namespace enf
