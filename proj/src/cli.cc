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

#include "enf/cli.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "enf/config.h"
#include "enf/diversity.h"
#include "enf/fsproto.h"
#include "enf/log.h"
#include "enf/report.h"
#include "enf/target.h"
#include "enf/triage.h"

namespace enf {
namespace {

namespace fs = std::filesystem;

// Shared by run and simulate.
struct OutputOptions {
  std::optional<uint64_t> ticks;
  std::string out_path;
  std::string timeline_path;
  std::string log_path;
  std::string format = "json";
};

void add_output_flags(CLI::App* cmd, OutputOptions& o) {
  cmd->add_option("--ticks", o.ticks, "Override the run budget (ticks; seconds in real mode)");
  cmd->add_option("--out", o.out_path, "Write the report here instead of stdout");
  cmd->add_option("--timeline", o.timeline_path, "Write the timeline CSV here");
  cmd->add_option("--log", o.log_path, "Write the replay log here");
  cmd->add_option("--format", o.format, "Report format: json or markdown")
      ->check(CLI::IsMember({"json", "markdown"}));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(fmt::format("cannot write {}", path));
  return f;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  auto f = open_out(path);
  f << text;
}

void finish_run(const Ensemble& ens, const FinalReport& rep, Json config_echo,
                const OutputOptions& o, std::ostream& out) {
  if (!o.timeline_path.empty()) {
    auto f = open_out(o.timeline_path);
    write_timeline(f, rep.timeline);
  }
  if (!o.log_path.empty()) {
    auto f = open_out(o.log_path);
    write_replay_log(f, ens.state().log);
  }
  if (o.format == "markdown") {
    emit(report_markdown(rep), o.out_path, out);
  } else {
    emit(report_json(rep, config_echo, o.timeline_path).dump(2) + "\n", o.out_path, out);
  }
}

FuzzerConfig preset_fuzzer(std::string name, std::string_view token, uint64_t rng_seed) {
  FuzzerConfig f;
  f.name = std::move(name);
  f.selection = SelectionPolicy::kRoundRobin;
  f.mutation = MutationStrategy::kDictionarySplice;
  f.granularity = Granularity::kEdge;
  f.dictionary = {to_bytes(token)};
  f.rng_seed = rng_seed;
  return f;
}

int cmd_run(const std::string& config_path, const OutputOptions& o, std::ostream& out) {
  RunConfig cfg = load_run_config(config_path);
  if (o.ticks) cfg.ensemble.run_budget = *o.ticks;
  TargetSpec target = cfg.load_target();
  Json echo = to_json(cfg.ensemble);
  echo["mode"] = to_string(cfg.mode);
  echo["rng_seed"] = cfg.rng_seed;
  echo["target"] = target.name;

  Ensemble ens(cfg.ensemble, std::move(target));
  std::optional<Workdir> wd;
  if (cfg.workdir) {
    std::vector<std::string> names;
    for (const FuzzerConfig& f : cfg.ensemble.fuzzers) names.push_back(f.name);
    for (const ExternalConfig& x : cfg.externals) names.push_back(x.name);
    wd = Workdir::create(*cfg.workdir, names);
  }
  for (ExternalConfig x : cfg.externals) {
    x.seed_cap = std::min(cfg.ensemble.seed_cap, ens.target().max_input_len);
    echo["externals"].push_back(x.name);
    ens.add_worker(std::make_unique<ExternalWorker>(std::move(x), *wd, ens.pool_channel()));
  }
  FinalReport rep;
  if (cfg.mode == RunMode::kSim) {
    rep = ens.run();
  } else {
    rep = ens.run_realtime(std::chrono::seconds(cfg.ensemble.sync_period),
                           std::chrono::seconds(cfg.ensemble.run_budget));
  }
  finish_run(ens, rep, echo, o, out);
  return kExitOk;
}

int cmd_simulate(const std::string& target_name, const std::string& preset,
                 const OutputOptions& o, std::ostream& out) {
  EnsembleConfig cfg = preset_config(preset);
  if (o.ticks) cfg.run_budget = *o.ticks;
  Ensemble ens(cfg, builtin_target(target_name));
  FinalReport rep = ens.run();
  Json echo = to_json(cfg);
  echo["preset"] = preset;
  echo["target"] = target_name;
  finish_run(ens, rep, echo, o, out);
  return kExitOk;
}

std::vector<double> parse_weights(const std::string& s) {
  std::vector<double> w;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      size_t used = 0;
      w.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("bad weight '{}'", part));
    }
  }
  if (w.size() != 3) throw ConfigError("--weights takes three values: paths,branches,bugs");
  return w;
}

struct DiversityOptions {
  std::string paths;
  std::string branches;
  std::string bugs;
  std::string weights;
  std::string baseline = "baseline";
  size_t k = 2;
  std::vector<std::string> candidates;
};

int cmd_diversity(const DiversityOptions& o, std::ostream& out) {
  DiversityWeights w;
  if (!o.weights.empty()) {
    auto v = parse_weights(o.weights);
    w = {v[0], v[1], v[2]};
  }
  std::vector<StatTable> tables;
  std::vector<double> weights;
  tables.push_back(load_stats(o.paths, o.baseline));
  weights.push_back(w.paths);
  if (!o.branches.empty()) {
    tables.push_back(load_stats(o.branches, o.baseline));
    weights.push_back(w.branches);
  }
  if (!o.bugs.empty()) {
    tables.push_back(load_stats(o.bugs, o.baseline));
    weights.push_back(w.bugs);
  }
  std::vector<WeightedTable> weighted;
  for (size_t i = 0; i < tables.size(); ++i) weighted.push_back({&tables[i], weights[i]});

  // Fuzzers present in every table, in the first table's column order.
  std::vector<std::string> fuzzers;
  for (const std::string& f : tables.front().fuzzers) {
    if (std::all_of(tables.begin(), tables.end(), [&](const StatTable& t) { return t.has(f); })) {
      fuzzers.push_back(f);
    }
  }
  std::vector<std::vector<std::string>> candidates;
  if (o.candidates.empty()) {
    candidates = k_subsets(fuzzers, o.k);
  } else {
    for (const std::string& c : o.candidates) {
      std::vector<std::string> members;
      std::stringstream in(c);
      std::string m;
      while (std::getline(in, m, '+')) {
        if (!m.empty()) members.push_back(m);
      }
      candidates.push_back(std::move(members));
    }
  }
  auto ranked = rank_ensemble(weighted, std::move(candidates));
  out << diversity_json(weighted, fuzzers, ranked).dump(2) << "\n";
  return kExitOk;
}

// Files named on the command line must parse; files found while walking a
// directory are skipped with a warning.
std::optional<CrashRecord> read_crash(const fs::path& p, uint64_t order, bool strict) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read {}", p.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  CrashRecord rec;
  rec.tick = order;
  rec.fuzzer = p.parent_path().filename().string();
  if (auto id = parse_seed_filename(p.stem().string() + ".seed")) rec.seed_id = *id;
  try {
    rec.backtrace = parse_backtrace(buf.str());
  } catch (const Error& e) {
    if (strict) throw ConfigError(fmt::format("{}: {}", p.string(), e.what()));
    spdlog::warn("{}: {}", p.string(), e.what());
    return std::nullopt;
  }
  return rec;
}

int cmd_triage(const std::vector<std::string>& inputs, const std::string& format,
               std::ostream& out) {
  std::vector<fs::path> files;
  std::vector<bool> named;
  for (const std::string& in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".bt") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
      named.resize(files.size(), false);
    } else if (fs::exists(p)) {
      files.push_back(p);
      named.push_back(true);
    } else {
      throw ConfigError(fmt::format("no such file or directory: {}", in));
    }
  }
  // tick carries the file index so exemplars map back to files.
  std::vector<CrashRecord> crashes;
  for (size_t i = 0; i < files.size(); ++i) {
    if (auto rec = read_crash(files[i], i, named[i])) crashes.push_back(std::move(*rec));
  }
  auto bugs = dedup(crashes);
  if (format == "text") {
    for (const UniqueBug& b : bugs) {
      out << fmt::format("{}\t{}\t{}\n", b.occurrences, b.key.to_string(),
                         files[b.exemplar.tick].string());
    }
  } else {
    Json arr = Json::array();
    for (const UniqueBug& b : bugs) {
      arr.push_back({{"bug_key", b.key.to_string()},
                     {"function", b.key.function},
                     {"file", b.key.file},
                     {"line", b.key.line},
                     {"occurrences", b.occurrences},
                     {"exemplar_file", files[b.exemplar.tick].string()}});
    }
    out << arr.dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_report(const std::string& timeline, const std::string& format, std::ostream& out,
               std::ostream& err) {
  auto rows = load_timeline(timeline);
  auto rendered = render_timeline(rows, parse_report_format(format));
  out << rendered.body;
  for (const std::string& w : rendered.warnings) err << "warning: " << w << "\n";
  return kExitOk;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"solo1", "solo2", "ensemble_nosync", "ensemble_sync"};
}

EnsembleConfig preset_config(std::string_view preset) {
  EnsembleConfig cfg;
  cfg.initial_seeds = {Bytes(32, 'x')};
  cfg.sync_period = 20;
  cfg.run_budget = 5000;
  FuzzerConfig f1 = preset_fuzzer("fuzzer1", "Magic Str", 1);
  FuzzerConfig f2 = preset_fuzzer("fuzzer2", "Magic Num", 2);
  if (preset == "solo1") {
    cfg.fuzzers = {f1};
  } else if (preset == "solo2") {
    cfg.fuzzers = {f2};
  } else if (preset == "ensemble_nosync") {
    cfg.fuzzers = {f1, f2};
    cfg.sync = false;
  } else if (preset == "ensemble_sync") {
    cfg.fuzzers = {f1, f2};
  } else {
    throw ConfigError(fmt::format("unknown preset '{}' (solo1, solo2, ensemble_nosync, "
                                  "ensemble_sync)",
                                  preset));
  }
  return cfg;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  init_logging();
  CLI::App app{"Ensemble fuzzing with periodic seed synchronization", "enf"};
  app.require_subcommand(1);

  std::string config_path;
  OutputOptions run_opts;
  auto* run = app.add_subcommand("run", "Run an ensemble from a config file");
  run->add_option("config", config_path, "Run configuration")->required();
  add_output_flags(run, run_opts);

  std::string target_name = "motivating";
  std::string preset;
  OutputOptions sim_opts;
  auto* sim = app.add_subcommand("simulate", "Run a canned configuration on a builtin target");
  sim->add_option("--target", target_name, "Builtin target");
  sim->add_option("--preset", preset, "solo1, solo2, ensemble_nosync or ensemble_sync")
      ->required();
  add_output_flags(sim, sim_opts);

  DiversityOptions div;
  auto* dv = app.add_subcommand("diversity", "Diversity of fuzzers against a baseline");
  dv->add_option("--stats", div.paths, "Per-app path counts CSV")->required();
  dv->add_option("--stats-branches", div.branches, "Per-app branch counts CSV");
  dv->add_option("--stats-bugs", div.bugs, "Per-app bug counts CSV");
  dv->add_option("--weights", div.weights, "paths,branches,bugs weights (default 1,1,2)");
  dv->add_option("--baseline", div.baseline, "Baseline column name");
  dv->add_option("--k", div.k, "Ensemble size for generated candidates");
  dv->add_option("--candidate", div.candidates, "Candidate ensemble as A+B+C (repeatable)");

  std::vector<std::string> triage_inputs;
  std::string triage_format = "json";
  auto* tr = app.add_subcommand("triage", "Deduplicate crash backtraces by top frame");
  tr->add_option("inputs", triage_inputs, ".bt files or directories holding them")->required();
  tr->add_option("--format", triage_format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));

  std::string timeline;
  std::string report_format = "text";
  auto* rp = app.add_subcommand("report", "Render a timeline CSV");
  rp->add_option("timeline", timeline, "Timeline CSV")->required();
  rp->add_option("--format", report_format, "text, markdown or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, run_opts, out);
    if (*sim) return cmd_simulate(target_name, preset, sim_opts, out);
    if (*dv) return cmd_diversity(div, out);
    if (*tr) return cmd_triage(triage_inputs, triage_format, out);
    if (*rp) return cmd_report(timeline, report_format, out, err);
  } catch (const ConfigError& e) {
    err << "enf: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "enf: error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace enf
