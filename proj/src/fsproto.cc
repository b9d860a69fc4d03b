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

#include "enf/fsproto.h"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

extern char** environ;

namespace enf {
namespace {

constexpr std::string_view kSeedExt = ".seed";
constexpr std::string_view kBacktraceExt = ".bt";

std::optional<Bytes> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) return std::nullopt;
  return data;
}

void write_file(const fs::path& p, ByteView data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot open {} for writing: {}", p.string(), std::strerror(errno)));
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw Error(fmt::format("write to {} failed", p.string()));
}

void make_dirs(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(fmt::format("cannot create {}: {}", p.string(), ec.message()));
}

void quarantine(const fs::path& file, const fs::path& dir) {
  std::error_code ec;
  if (dir.empty()) return;
  fs::create_directories(dir, ec);
  fs::path dest = dir / file.filename();
  for (int n = 1; fs::exists(dest, ec); ++n) {
    dest = dir / fmt::format("{}.{}", file.filename().string(), n);
  }
  fs::rename(file, dest, ec);
  if (ec) spdlog::warn("cannot quarantine {}: {}", file.string(), ec.message());
}

// Paths of unseen, well-formed seed files in `dir`, sorted by name. Bad
// names are quarantined.
std::vector<fs::path> list_unseen(const fs::path& dir, const std::set<std::string>& seen,
                                  const fs::path& quarantine_dir) {
  std::vector<fs::path> out;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) return out;
  for (const auto& entry : it) {
    std::string name = entry.path().filename().string();
    if (name.empty() || name.front() == '.') continue;  // in-flight temp files
    if (!name.ends_with(kSeedExt) || seen.contains(name)) continue;
    if (!parse_seed_filename(name)) {
      spdlog::warn("quarantining malformed seed name {}", entry.path().string());
      quarantine(entry.path(), quarantine_dir);
      continue;
    }
    out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Reads and verifies one seed file; quarantines it on failure.
std::optional<Seed> load_seed(const fs::path& p, const ScanOptions& opt) {
  auto data = read_file(p);
  if (!data) {
    spdlog::warn("cannot read {}", p.string());
    return std::nullopt;
  }
  uint64_t want = *parse_seed_filename(p.filename().string());
  if (fnv1a64(*data) != want || data->size() > opt.seed_cap) {
    spdlog::warn("quarantining {}: content does not match its name or exceeds the cap",
                 p.string());
    quarantine(p, opt.quarantine);
    return std::nullopt;
  }
  return Seed::make(std::move(*data), opt.origin, 0, opt.cause, opt.seed_cap);
}

bool command_exists(const std::string& cmd) {
  if (cmd.find('/') != std::string::npos) return ::access(cmd.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  std::stringstream dirs(path ? path : "/usr/bin:/bin");
  std::string d;
  while (std::getline(dirs, d, ':')) {
    if (d.empty()) d = ".";
    if (::access((fs::path(d) / cmd).c_str(), X_OK) == 0) return true;
  }
  return false;
}

}  // namespace

std::string seed_filename(uint64_t id) { return hex64(id) + std::string(kSeedExt); }

std::optional<uint64_t> parse_seed_filename(std::string_view name) {
  if (name.size() != 16 + kSeedExt.size() || !name.ends_with(kSeedExt)) return std::nullopt;
  std::string_view hex = name.substr(0, 16);
  bool lower = std::all_of(hex.begin(), hex.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  });
  uint64_t id = 0;
  if (!lower || !parse_hex64(hex, id)) return std::nullopt;
  return id;
}

Workdir Workdir::create(const fs::path& root, const std::vector<std::string>& fuzzers) {
  for (const std::string& f : fuzzers) {
    if (!valid_worker_name(f)) throw ConfigError(fmt::format("invalid fuzzer name '{}'", f));
  }
  std::error_code ec;
  const fs::path version_file = root / "status" / "proto_version";
  if (!fs::exists(root, ec)) {
    fs::path parent = root.has_parent_path() ? root.parent_path() : fs::path(".");
    make_dirs(parent);
    fs::path tmp = parent / fmt::format(".{}.tmp-{}", root.filename().string(), ::getpid());
    fs::remove_all(tmp, ec);
    for (const char* sub : {"global_pool", "fuzzers", "crashes", "status/quarantine"}) {
      make_dirs(tmp / sub);
    }
    write_file(tmp / "status" / "proto_version", to_bytes(kProtoVersion));
    fs::rename(tmp, root, ec);
    if (ec) {
      // Lost a race with another creator; fall through to validation.
      fs::remove_all(tmp, ec);
    }
  }
  auto version = read_file(version_file);
  if (!version) {
    throw ConfigError(fmt::format("{} is not a workdir (no status/proto_version)", root.string()));
  }
  std::string v = to_string(*version);
  while (!v.empty() && (v.back() == '\n' || v.back() == '\r')) v.pop_back();
  if (v != kProtoVersion) {
    throw ConfigError(
        fmt::format("{}: proto_version '{}' (expected '{}')", root.string(), v, kProtoVersion));
  }
  Workdir wd(root);
  for (const char* sub : {"global_pool", "fuzzers", "crashes", "status/quarantine"}) {
    make_dirs(root / sub);
  }
  for (const std::string& f : fuzzers) wd.add_fuzzer(f);
  return wd;
}

void Workdir::add_fuzzer(std::string_view name) const {
  if (!valid_worker_name(name)) throw ConfigError(fmt::format("invalid fuzzer name '{}'", name));
  make_dirs(queue_dir(name));
  make_dirs(out_dir(name));
  make_dirs(crash_dir(name));
}

fs::path Workdir::queue_dir(std::string_view name) const {
  return root_ / "fuzzers" / std::string(name) / "queue";
}
fs::path Workdir::out_dir(std::string_view name) const {
  return root_ / "fuzzers" / std::string(name) / "out";
}
fs::path Workdir::crash_dir(std::string_view name) const {
  return root_ / "crashes" / std::string(name);
}

fs::path write_seed(const fs::path& dir, ByteView content, const BeforeRename& hook) {
  const uint64_t id = fnv1a64(content);
  const fs::path dest = dir / seed_filename(id);
  std::error_code ec;
  if (fs::exists(dest, ec)) return dest;
  const fs::path tmp = dir / ("." + hex64(id) + ".tmp");
  write_file(tmp, content);
  if (hook) hook(tmp);
  fs::rename(tmp, dest, ec);
  if (ec) {
    throw Error(fmt::format("cannot rename {} to {}: {}", tmp.string(), dest.string(),
                            ec.message()));
  }
  return dest;
}

fs::path write_crash(const fs::path& dir, ByteView content, const Backtrace& bt) {
  const uint64_t id = fnv1a64(content);
  const fs::path sidecar = dir / (hex64(id) + std::string(kBacktraceExt));
  const fs::path tmp = dir / ("." + hex64(id) + ".bt.tmp");
  write_file(tmp, to_bytes(format_backtrace(bt)));
  std::error_code ec;
  fs::rename(tmp, sidecar, ec);
  if (ec) throw Error(fmt::format("cannot rename {}: {}", tmp.string(), ec.message()));
  return write_seed(dir, content);
}

std::vector<Seed> scan_new(const fs::path& dir, std::set<std::string>& seen,
                           const ScanOptions& options) {
  std::vector<Seed> out;
  for (const fs::path& p : list_unseen(dir, seen, options.quarantine)) {
    auto seed = load_seed(p, options);
    if (!seed) continue;
    seen.insert(p.filename().string());
    out.push_back(std::move(*seed));
  }
  return out;
}

std::vector<ScannedCrash> scan_crashes(const fs::path& dir, std::set<std::string>& seen,
                                       const ScanOptions& options) {
  std::vector<ScannedCrash> out;
  for (Seed& seed : scan_new(dir, seen, options)) {
    ScannedCrash c{std::move(seed), std::nullopt};
    fs::path sidecar = dir / (hex64(c.seed.id) + std::string(kBacktraceExt));
    if (auto text = read_file(sidecar)) {
      try {
        c.backtrace = parse_backtrace(to_string(*text));
      } catch (const Error& e) {
        spdlog::warn("{}: {}", sidecar.string(), e.what());
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

void ExternalConfig::validate() const {
  if (!valid_worker_name(name)) throw ConfigError(fmt::format("invalid fuzzer name '{}'", name));
  if (command.empty()) throw ConfigError(fmt::format("external fuzzer '{}' has no command", name));
  if (poll_interval.count() < 0 || startup_grace.count() < 0) {
    throw ConfigError("negative interval");
  }
}

ExternalWorker::ExternalWorker(ExternalConfig config, const Workdir& workdir, PoolChannel& pool)
    : config_(std::move(config)), pool_(pool) {
  config_.validate();
  if (!command_exists(config_.command)) {
    throw Error(fmt::format("external fuzzer '{}': command '{}' not found", config_.name,
                            config_.command));
  }
  workdir.add_fuzzer(config_.name);
  queue_dir_ = workdir.queue_dir(config_.name);
  out_dir_ = workdir.out_dir(config_.name);
  crash_dir_ = workdir.crash_dir(config_.name);
  quarantine_ = workdir.quarantine_dir();
}

ExternalWorker::~ExternalWorker() { kill_child(); }

void ExternalWorker::spawn() {
  std::vector<std::string> env_store = {
      "ENF_QUEUE_DIR=" + queue_dir_.string(),
      "ENF_OUT_DIR=" + out_dir_.string(),
      "ENF_CRASH_DIR=" + crash_dir_.string(),
  };
  std::vector<char*> envp;
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    if (kv.starts_with("ENF_QUEUE_DIR=") || kv.starts_with("ENF_OUT_DIR=") ||
        kv.starts_with("ENF_CRASH_DIR=")) {
      continue;
    }
    envp.push_back(*e);
  }
  for (std::string& s : env_store) envp.push_back(s.data());
  envp.push_back(nullptr);

  std::vector<std::string> argv_store = {config_.command};
  argv_store.insert(argv_store.end(), config_.args.begin(), config_.args.end());
  std::vector<char*> argv;
  for (std::string& s : argv_store) argv.push_back(s.data());
  argv.push_back(nullptr);

  // stdout belongs to the report; the child's goes to /dev/null.
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);
  pid_t pid = -1;
  int rc = posix_spawnp(&pid, config_.command.c_str(), &actions, &attr, argv.data(), envp.data());
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) {
    throw Error(fmt::format("external fuzzer '{}': cannot spawn '{}': {}", config_.name,
                            config_.command, std::strerror(rc)));
  }
  pid_ = pid;
  spdlog::debug("{}: spawned pid {}", config_.name, pid_);
}

bool ExternalWorker::alive() {
  if (pid_ <= 0) return false;
  int status = 0;
  pid_t r = ::waitpid(pid_, &status, WNOHANG);
  if (r == 0) return true;
  if (r == pid_) {
    spdlog::debug("{}: pid {} exited (status {})", config_.name, pid_, status);
  }
  pid_ = -1;
  return false;
}

bool ExternalWorker::running() { return alive(); }

void ExternalWorker::kill_child() {
  if (!alive()) return;
  ::kill(-pid_, SIGTERM);
  for (int i = 0; i < 100 && alive(); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  if (pid_ > 0) {
    ::kill(-pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }
}

TickReport ExternalWorker::poll(uint64_t tick) {
  TickReport rep;
  ScanOptions opt{config_.name, SeedCause::kNewCoverage, quarantine_, config_.seed_cap};
  std::vector<Submission> subs;
  for (Seed& s : scan_new(out_dir_, seen_out_, opt)) {
    s.birth_tick = tick;
    subs.push_back({std::move(s), std::nullopt});
    ++rep.new_seeds;
  }
  opt.cause = SeedCause::kCrash;
  for (ScannedCrash& c : scan_crashes(crash_dir_, seen_crash_, opt)) {
    c.seed.birth_tick = tick;
    subs.push_back({std::move(c.seed), std::move(c.backtrace)});
    ++rep.new_crashes;
  }
  {
    std::lock_guard lock(mu_);
    stats_.seeds_contributed += rep.new_seeds + rep.new_crashes;
    stats_.crashes += rep.new_crashes;
    if (rep.new_seeds + rep.new_crashes > 0) stats_.last_new_coverage_tick = tick;
  }
  for (Submission& s : subs) pool_.send(std::move(s));
  return rep;
}

TickReport ExternalWorker::step(uint64_t tick) {
  if (!started_) {
    spawn();
    started_ = true;
  }
  if (config_.poll_interval.count() > 0) std::this_thread::sleep_for(config_.poll_interval);
  bool up = alive();
  TickReport rep = poll(tick);
  rep.halted = !up;
  return rep;
}

bool ExternalWorker::restart(uint64_t tick) {
  {
    std::lock_guard lock(mu_);
    ++stats_.restarts;
  }
  kill_child();
  spawn();
  std::this_thread::sleep_for(config_.startup_grace);
  if (alive()) return true;
  spdlog::debug("{}: exited within {} ms of restart at tick {}", config_.name,
                config_.startup_grace.count(), tick);
  return false;
}

void ExternalWorker::deliver(Seed seed) {
  write_seed(queue_dir_, seed.content);
  std::lock_guard lock(mu_);
  ++stats_.imported;
}

FuzzerStats ExternalWorker::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

}  // namespace enf
