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

#ifndef ENF_MUTATE_H_
#define ENF_MUTATE_H_

#include <span>
#include <string_view>

#include "enf/common.h"
#include "enf/rng.h"

namespace enf {

enum class MutationStrategy {
  kBitflip,            // flip 1-4 distinct random bits
  kByteArith,          // add or subtract 1..35 on one random byte
  kHavoc,              // stack of 1-8 primitive edits
  kDictionarySplice,   // overwrite or insert one dictionary token
  kBlockGuidedHavoc,   // havoc; the owning fuzzer tracks block coverage
};

std::string_view to_string(MutationStrategy m);
MutationStrategy parse_mutation(std::string_view s);

// Produces a mutant of `input` no longer than `max_len`. Bitflip and
// byte_arith never return their input unchanged; on an empty input they
// append one random byte. dictionary_splice needs a nonempty dictionary.
Bytes mutate(ByteView input, MutationStrategy strategy, std::span<const Bytes> dictionary,
             Rng& rng, size_t max_len);

// Primitive edits, exposed for tests and reuse.
void flip_bit(Bytes& data, size_t bit);

enum class SpliceMode { kOverwrite, kInsert };

// Places `token` at `offset` (clamped to the input length). Overwrite
// extends the input when the token runs past its end. The result is
// truncated to max_len.
void splice_token(Bytes& data, ByteView token, size_t offset, SpliceMode mode, size_t max_len);

}  // namespace enf

#endif  // ENF_MUTATE_H_
