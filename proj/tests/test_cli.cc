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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "enf/report.h"
#include "test_util.h"

namespace enf {
namespace {

using testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "enf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

TEST(Cli, SimulatePresetCoverage) {
  const std::pair<const char*, int> want[] = {
      {"solo1", 1}, {"solo2", 1}, {"ensemble_nosync", 2}, {"ensemble_sync", 4}};
  for (auto [preset, paths] : want) {
    Result r = run({"simulate", "--target", "motivating", "--preset", preset});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    Json j = Json::parse(r.out);
    EXPECT_EQ(j["global"]["paths"], paths) << preset;
    if (paths == 4) {
      EXPECT_EQ(j["global"]["branches"], 6);
    }
  }
  EXPECT_EQ(preset_names().size(), 4u);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, kExitConfig);
  EXPECT_EQ(run({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(run({"simulate", "--preset", "trio"}).code, kExitConfig);
  EXPECT_EQ(run({"simulate", "--target", "nope", "--preset", "solo1"}).code, kExitConfig);
  EXPECT_EQ(run({"run", "/no/such/config.toml"}).code, kExitConfig);
  EXPECT_EQ(run({"simulate", "--preset", "solo1", "--format", "yaml"}).code, kExitConfig);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, RunWritesReportTimelineAndLog) {
  TempDir d;
  std::string cfg = std::string(ENF_SOURCE_DIR) + "/configs/motivating.toml";
  Result r = run({"run", cfg, "--ticks", "300", "--out", (d / "r.json").string(), "--timeline",
                  (d / "t.csv").string(), "--log", (d / "log.txt").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  Json j = Json::parse(slurp(d / "r.json"));
  EXPECT_EQ(j["ticks"], 300);
  auto rows = load_timeline(d / "t.csv");
  EXPECT_EQ(rows.size(), 300u);
  EXPECT_EQ(rows.back().paths, j["global"]["paths"].get<uint64_t>());
  EXPECT_NE(slurp(d / "log.txt").find(" submit "), std::string::npos);
}

TEST(Cli, ZeroTicksGivesEmptyTimeline) {
  std::string cfg = std::string(ENF_SOURCE_DIR) + "/configs/motivating.toml";
  Result r = run({"run", cfg, "--ticks", "0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_TRUE(j["timeline"]["rows"].empty());
  EXPECT_EQ(j["global"]["pool_size"], 1);
}

TEST(Cli, MarkdownFormat) {
  Result r = run({"simulate", "--preset", "solo1", "--format", "markdown"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out.rfind("#", 0), 0u);
}

TEST(Cli, RuntimeFailureExitsThree) {
  TempDir d;
  std::ofstream(d / "run.toml") << "[target]\nbuiltin = \"motivating\"\n[workdir]\npath = \"wd\"\n"
                                   "[[fuzzer]]\nname = \"a\"\n[[external]]\nname = \"e\"\n"
                                   "command = \"" ENF_STUB_FUZZER "\"\nargs = [\"--exit-immediately\"]\n"
                                   "[ensemble]\nrun_budget = 5\nstorm_limit = 2\n";
  Result r = run({"run", (d / "run.toml").string()});
  EXPECT_EQ(r.code, kExitRuntime) << r.out;
  EXPECT_NE(r.err.find("crash storm"), std::string::npos);
}

TEST(Cli, Diversity) {
  std::string csv = std::string(ENF_DATA_DIR) + "/paths_by_app.csv";
  Result r = run({"diversity", "--stats", csv, "--candidate", "AFLFast", "--candidate", "libFuzzer"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_NEAR(j["fuzzers"]["AFLFast"]["diversity"].get<double>(), 0.038, 0.001);
  EXPECT_EQ(j["ensembles"][0]["members"][0], "libFuzzer");
  Result pairs = run({"diversity", "--stats", csv, "--k", "2"});
  ASSERT_EQ(pairs.code, kExitOk);
  EXPECT_EQ(Json::parse(pairs.out)["ensembles"].size(), 10u);
  Result two = run({"diversity", "--stats", csv, "--stats-branches",
                    std::string(ENF_DATA_DIR) + "/branches_by_app.csv", "--weights", "1,3,2"});
  ASSERT_EQ(two.code, kExitOk) << two.err;
  EXPECT_TRUE(Json::parse(two.out)["fuzzers"]["QSYM"].contains("weighted"));
  EXPECT_EQ(run({"diversity", "--stats", csv, "--candidate", "AFL++"}).code, kExitConfig);
  EXPECT_EQ(run({"diversity", "--stats", csv, "--weights", "1,x"}).code, kExitConfig);
  EXPECT_EQ(run({"diversity", "--stats", "/nope.csv"}).code, kExitConfig);
}

TEST(Cli, TriageGroupsBacktraceFiles) {
  TempDir d;
  std::filesystem::create_directories(d / "sub");
  std::ofstream(d / "a.bt") << "#0 0x1 in png_free_data png.c:564\n#1 0x2 in main m.c:1\n";
  std::ofstream(d / "sub" / "b.bt") << "#0 0x9 in png_free_data png.c:564\n#1 0x3 in other o.c:2\n";
  std::ofstream(d / "c.bt") << "#0 0x1 in inflate zlib.c:10\n";
  std::ofstream(d / "ignored.txt") << "not a backtrace";
  Result r = run({"triage", d.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  Json j = Json::parse(r.out);
  ASSERT_EQ(j.size(), 2u);
  size_t total = 0;
  for (const auto& b : j) total += b["occurrences"].get<size_t>();
  EXPECT_EQ(total, 3u);
  bool found = false;
  for (const auto& b : j) {
    if (b["function"] == "png_free_data") {
      found = true;
      EXPECT_EQ(b["file"], "png.c");
      EXPECT_EQ(b["line"], 564);
      EXPECT_EQ(b["occurrences"], 2);
    }
  }
  EXPECT_TRUE(found);
  std::ofstream(d / "bad.bt") << "garbage\n";
  EXPECT_EQ(run({"triage", (d / "bad.bt").string()}).code, kExitConfig);
}

TEST(Cli, ReportRendersTimeline) {
  TempDir d;
  std::ofstream(d / "t.csv") << "tick,paths,branches,unique_bugs\n1,1,2,0\n2,0,2,0\n";
  Result r = run({"report", (d / "t.csv").string(), "--format", "markdown"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("| 2 | 0 | 2 | 0 |"), std::string::npos);
  EXPECT_NE(r.err.find("paths decreases"), std::string::npos);
  std::ofstream(d / "bad.csv") << "tick,paths,branches,unique_bugs\n1,1\n";
  EXPECT_EQ(run({"report", (d / "bad.csv").string()}).code, kExitConfig);
}

}  // namespace
}  // namespace enf
