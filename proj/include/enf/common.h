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

#ifndef ENF_COMMON_H_
#define ENF_COMMON_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace enf {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-provided configuration (config files, CLI flags, target
// specs). `line` is 0 when the problem is not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// 64-bit FNV-1a. Seed ids, seed file names and path ids all use it.
inline constexpr uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

uint64_t fnv1a64(ByteView data, uint64_t state = kFnvOffsetBasis);
uint64_t fnv1a64(std::string_view data);

// 16 lowercase hex digits.
std::string hex64(uint64_t value);
bool parse_hex64(std::string_view text, uint64_t& out);

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(ByteView b) { return std::string(b.begin(), b.end()); }

// C-style escaping of arbitrary bytes ("\x00", "\n", "\"").
std::string escape_bytes(ByteView b);
// Inverse of escape_bytes; throws ConfigError on malformed escapes.
Bytes unescape_bytes(std::string_view s);

}  // namespace enf

#endif  // ENF_COMMON_H_
