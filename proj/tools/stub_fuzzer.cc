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

// A scripted external fuzzer for exercising the directory protocol.
//
// Every poll it copies each new seed from $ENF_QUEUE_DIR to $ENF_OUT_DIR
// with one byte appended. Flags:
//   --crash             also write one crash seed with a .bt sidecar to
//                       $ENF_CRASH_DIR on the first poll
//   --exit-immediately  exit with status 1 before doing anything
//   --exit-after N      exit with status 0 after N polls
//   --interval-ms N     sleep between polls (default 20)

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <set>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "enf/fsproto.h"

namespace {

const char* require_env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) {
    std::cerr << "stub_fuzzer: " << name << " is not set\n";
    std::exit(64);
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  bool crash = false;
  bool exit_immediately = false;
  int exit_after = -1;
  int interval_ms = 20;
  CLI::App app{"Scripted external fuzzer", "enf_stub_fuzzer"};
  app.add_flag("--crash", crash);
  app.add_flag("--exit-immediately", exit_immediately);
  app.add_option("--exit-after", exit_after);
  app.add_option("--interval-ms", interval_ms);
  CLI11_PARSE(app, argc, argv);
  if (exit_immediately) return 1;

  const enf::fs::path queue = require_env("ENF_QUEUE_DIR");
  const enf::fs::path out = require_env("ENF_OUT_DIR");
  const enf::fs::path crashes = require_env("ENF_CRASH_DIR");

  std::set<std::string> seen;
  enf::ScanOptions opt{"stub", enf::SeedCause::kNewCoverage, {}, enf::kDefaultSeedCap};
  for (int poll = 0; exit_after < 0 || poll < exit_after; ++poll) {
    for (const enf::Seed& s : enf::scan_new(queue, seen, opt)) {
      enf::Bytes next = s.content;
      next.push_back(static_cast<uint8_t>('A' + (next.size() % 26)));
      if (next.size() <= opt.seed_cap) enf::write_seed(out, next);
    }
    if (crash && poll == 0) {
      enf::Backtrace bt = enf::parse_backtrace(
          "#0 0x4005d0 in stub_overflow stub.c:42\n#1 0x400700 in main stub.c:90\n");
      enf::write_crash(crashes, enf::to_bytes("stub crash input"), bt);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(interval_ms));
  }
  return 0;
}
