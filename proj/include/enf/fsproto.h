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

#ifndef ENF_FSPROTO_H_
#define ENF_FSPROTO_H_

#include <sys/types.h>

#include <chrono>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "enf/common.h"
#include "enf/corpus.h"
#include "enf/fuzzer.h"
#include "enf/triage.h"

namespace enf {

namespace fs = std::filesystem;

inline constexpr std::string_view kProtoVersion = "1";

// "<16 lowercase hex digits of fnv1a64(content)>.seed"
std::string seed_filename(uint64_t id);
// The id encoded in a well-formed seed filename.
std::optional<uint64_t> parse_seed_filename(std::string_view name);

// On-disk exchange layout:
//   global_pool/
//   fuzzers/<name>/queue/   monitor -> fuzzer
//   fuzzers/<name>/out/     fuzzer -> monitor
//   crashes/<name>/         <hash>.seed + <hash>.bt sidecar
//   status/proto_version    "1"
//   status/quarantine/      seed files that failed verification
class Workdir {
 public:
  // Creates the layout. A missing root is built in a sibling temp dir and
  // renamed into place; an existing root must carry a matching
  // proto_version. Throws Error / ConfigError.
  static Workdir create(const fs::path& root, const std::vector<std::string>& fuzzers);

  // Adds fuzzers/<name>/{queue,out} and crashes/<name>. Idempotent.
  void add_fuzzer(std::string_view name) const;

  const fs::path& root() const { return root_; }
  fs::path global_pool() const { return root_ / "global_pool"; }
  fs::path queue_dir(std::string_view name) const;
  fs::path out_dir(std::string_view name) const;
  fs::path crash_dir(std::string_view name) const;
  fs::path status_dir() const { return root_ / "status"; }
  fs::path quarantine_dir() const { return root_ / "status" / "quarantine"; }

 private:
  explicit Workdir(fs::path root) : root_(std::move(root)) {}
  fs::path root_;
};

// Called with the temp file after it is fully written and before the
// rename; lets tests inject a crash into the commit window.
using BeforeRename = std::function<void(const fs::path& tmp)>;

// Writes `<dir>/.<hash>.tmp` and renames it to `<dir>/<hash>.seed`.
// Idempotent: an existing seed file is left untouched. Throws Error with
// the path on I/O failure.
fs::path write_seed(const fs::path& dir, ByteView content, const BeforeRename& hook = {});

// Writes the `.bt` sidecar first so a visible crash seed always has it.
fs::path write_crash(const fs::path& dir, ByteView content, const Backtrace& bt);

struct ScanOptions {
  std::string origin;
  SeedCause cause = SeedCause::kNewCoverage;
  fs::path quarantine;  // empty: mismatching files are only skipped
  size_t seed_cap = kDefaultSeedCap;
};

// Reads `.seed` files of `dir` whose names are not in `seen`, in filename
// order. Files whose name does not match their content hash (or that
// exceed the cap) are moved to the quarantine dir. Never throws for
// per-file problems.
std::vector<Seed> scan_new(const fs::path& dir, std::set<std::string>& seen,
                           const ScanOptions& options);

struct ScannedCrash {
  Seed seed;
  std::optional<Backtrace> backtrace;
};

// scan_new over a crash dir, attaching each seed's `.bt` sidecar.
std::vector<ScannedCrash> scan_crashes(const fs::path& dir, std::set<std::string>& seen,
                                       const ScanOptions& options);

struct ExternalConfig {
  std::string name;
  std::string command;
  std::vector<std::string> args;
  // Sleep before each poll of out/ and crashes/.
  std::chrono::milliseconds poll_interval{100};
  // A process that dies this soon after a (re)start counts as a failed
  // restart.
  std::chrono::milliseconds startup_grace{50};
  Granularity granularity = Granularity::kEdge;
  size_t seed_cap = kDefaultSeedCap;

  void validate() const;
};

// Worker adapter around an external fuzzer process speaking the directory
// protocol. Dispatched seeds are written straight into its queue dir.
class ExternalWorker : public Worker {
 public:
  // Throws Error when the command cannot be found.
  ExternalWorker(ExternalConfig config, const Workdir& workdir, PoolChannel& pool);
  ~ExternalWorker() override;
  ExternalWorker(const ExternalWorker&) = delete;
  ExternalWorker& operator=(const ExternalWorker&) = delete;

  const std::string& name() const override { return config_.name; }
  Granularity granularity() const override { return config_.granularity; }
  // A process exit is a halt; the supervisor restarts it.
  bool halts_on_crash() const override { return true; }
  TickReport step(uint64_t tick) override;
  bool restart(uint64_t tick) override;
  void deliver(Seed seed) override;
  FuzzerStats stats() const override;

  bool running();
  pid_t pid() const { return pid_; }

 private:
  void spawn();
  // Reaps the child if it exited. Returns true while it is alive.
  bool alive();
  void kill_child();
  TickReport poll(uint64_t tick);

  ExternalConfig config_;
  fs::path queue_dir_;
  fs::path out_dir_;
  fs::path crash_dir_;
  fs::path quarantine_;
  PoolChannel& pool_;
  pid_t pid_ = -1;
  bool started_ = false;
  std::set<std::string> seen_out_;
  std::set<std::string> seen_crash_;
  mutable std::mutex mu_;
  FuzzerStats stats_;
};

}  // namespace enf

#endif  // ENF_FSPROTO_H_
