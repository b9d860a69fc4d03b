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

#include <algorithm>

namespace enf {

std::string_view to_string(MutationStrategy m) {
  switch (m) {
    case MutationStrategy::kBitflip: return "bitflip";
    case MutationStrategy::kByteArith: return "byte_arith";
    case MutationStrategy::kHavoc: return "havoc";
    case MutationStrategy::kDictionarySplice: return "dictionary_splice";
    case MutationStrategy::kBlockGuidedHavoc: return "block_guided_havoc";
  }
  return "?";
}

MutationStrategy parse_mutation(std::string_view s) {
  if (s == "bitflip") return MutationStrategy::kBitflip;
  if (s == "byte_arith") return MutationStrategy::kByteArith;
  if (s == "havoc") return MutationStrategy::kHavoc;
  if (s == "dictionary_splice") return MutationStrategy::kDictionarySplice;
  if (s == "block_guided_havoc") return MutationStrategy::kBlockGuidedHavoc;
  throw ConfigError("unknown mutation strategy '" + std::string(s) + "'");
}

void flip_bit(Bytes& data, size_t bit) { data.at(bit / 8) ^= static_cast<uint8_t>(1u << (bit % 8)); }

void splice_token(Bytes& data, ByteView token, size_t offset, SpliceMode mode, size_t max_len) {
  offset = std::min(offset, data.size());
  if (mode == SpliceMode::kInsert) {
    data.insert(data.begin() + static_cast<std::ptrdiff_t>(offset), token.begin(), token.end());
  } else {
    if (data.size() < offset + token.size()) data.resize(offset + token.size());
    std::copy(token.begin(), token.end(), data.begin() + static_cast<std::ptrdiff_t>(offset));
  }
  if (data.size() > max_len) data.resize(max_len);
}

namespace {

constexpr uint8_t kInteresting[] = {0x00, 0x01, 0x7f, 0x80, 0xff, 0x10, 0x20, 0x40};

void bitflip(Bytes& data, Rng& rng) {
  if (data.empty()) {
    data.push_back(static_cast<uint8_t>(rng.below(256)));
    return;
  }
  const size_t bits = data.size() * 8;
  const size_t k = std::min<size_t>(bits, 1 + rng.below(4));
  std::vector<size_t> chosen;
  while (chosen.size() < k) {
    size_t b = rng.below(bits);
    if (std::find(chosen.begin(), chosen.end(), b) == chosen.end()) chosen.push_back(b);
  }
  for (size_t b : chosen) flip_bit(data, b);
}

void byte_arith(Bytes& data, Rng& rng) {
  if (data.empty()) {
    data.push_back(static_cast<uint8_t>(rng.below(256)));
    return;
  }
  size_t at = rng.below(data.size());
  auto delta = static_cast<uint8_t>(1 + rng.below(35));
  data[at] = rng.coin() ? static_cast<uint8_t>(data[at] + delta)
                        : static_cast<uint8_t>(data[at] - delta);
}

void havoc_edit(Bytes& data, std::span<const Bytes> dictionary, Rng& rng, size_t max_len) {
  const uint64_t ops = dictionary.empty() ? 7 : 8;
  switch (rng.below(ops)) {
    case 0:
      bitflip(data, rng);
      break;
    case 1:
      if (data.empty()) {
        data.push_back(static_cast<uint8_t>(rng.below(256)));
      } else {
        data[rng.below(data.size())] = static_cast<uint8_t>(rng.below(256));
      }
      break;
    case 2:
      byte_arith(data, rng);
      break;
    case 3: {
      size_t n = 1 + rng.below(4);
      size_t at = rng.below(data.size() + 1);
      Bytes chunk(n);
      for (auto& b : chunk) b = static_cast<uint8_t>(rng.below(256));
      data.insert(data.begin() + static_cast<std::ptrdiff_t>(at), chunk.begin(), chunk.end());
      break;
    }
    case 4: {
      if (data.empty()) break;
      size_t at = rng.below(data.size());
      size_t n = std::min<size_t>(data.size() - at, 1 + rng.below(4));
      data.erase(data.begin() + static_cast<std::ptrdiff_t>(at),
                 data.begin() + static_cast<std::ptrdiff_t>(at + n));
      break;
    }
    case 5: {
      // Copy a chunk of the input over another position.
      if (data.size() < 2) break;
      size_t n = 1 + rng.below(std::min<size_t>(data.size() - 1, 8));
      size_t from = rng.below(data.size() - n + 1);
      size_t to = rng.below(data.size() - n + 1);
      Bytes chunk(data.begin() + static_cast<std::ptrdiff_t>(from),
                  data.begin() + static_cast<std::ptrdiff_t>(from + n));
      std::copy(chunk.begin(), chunk.end(), data.begin() + static_cast<std::ptrdiff_t>(to));
      break;
    }
    case 6:
      if (data.empty()) {
        data.push_back(kInteresting[rng.below(std::size(kInteresting))]);
      } else {
        data[rng.below(data.size())] = kInteresting[rng.below(std::size(kInteresting))];
      }
      break;
    default: {
      const Bytes& token = dictionary[rng.below(dictionary.size())];
      splice_token(data, token, rng.below(data.size() + 1),
                   rng.coin() ? SpliceMode::kInsert : SpliceMode::kOverwrite, max_len);
      break;
    }
  }
  if (data.size() > max_len) data.resize(max_len);
}

}  // namespace

Bytes mutate(ByteView input, MutationStrategy strategy, std::span<const Bytes> dictionary,
             Rng& rng, size_t max_len) {
  Bytes data(input.begin(), input.end());
  if (data.size() > max_len) data.resize(max_len);
  switch (strategy) {
    case MutationStrategy::kBitflip:
      bitflip(data, rng);
      break;
    case MutationStrategy::kByteArith:
      byte_arith(data, rng);
      break;
    case MutationStrategy::kHavoc:
    case MutationStrategy::kBlockGuidedHavoc: {
      const uint64_t edits = 1 + rng.below(8);
      for (uint64_t i = 0; i < edits; ++i) havoc_edit(data, dictionary, rng, max_len);
      break;
    }
    case MutationStrategy::kDictionarySplice: {
      if (dictionary.empty()) throw Error("dictionary_splice needs a dictionary");
      const Bytes& token = dictionary[rng.below(dictionary.size())];
      const SpliceMode mode = rng.coin() ? SpliceMode::kInsert : SpliceMode::kOverwrite;
      splice_token(data, token, rng.below(data.size() + 1), mode, max_len);
      break;
    }
  }
  if (data.size() > max_len) data.resize(max_len);
  return data;
}

}  // namespace enf
