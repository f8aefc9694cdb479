// Copyright 2026 The nnUZoo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nnuzoo/cli/cli.hpp"

using namespace nnuzoo;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("nnuzoo_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write_cases(const fs::path& p, const std::vector<std::pair<std::string, double>>& rows) {
  std::ofstream o(p);
  o << "case_id,dice\n";
  for (const auto& [id, d] : rows) o << id << ',' << d << '\n';
}

}  // namespace

class HelpGolden : public ::testing::TestWithParam<std::string> {};

TEST_P(HelpGolden, MatchesFile) {
  const auto sub = GetParam();
  const auto r = sub == "nnuzoo" ? run({"--help"}) : run({sub, "--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_EQ(r.out, slurp(fs::path(NNUZOO_GOLDEN_DIR) / (sub + "_help.txt")));
}

INSTANTIATE_TEST_SUITE_P(Cli, HelpGolden,
                         ::testing::Values("nnuzoo", "list", "params", "build", "synth", "train", "eval", "bench",
                                           "compare", "rerun"));

TEST(Cli, VersionMatchesProject) {
  const auto r = run({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(cli::version()), std::string::npos);
}

TEST(Cli, ParamsReportsCountAndDelta) {
  const auto r = run({"params", "SS2D2Net", "--preset", "AbdomenCT"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pos = r.out.find(": ");
  const double n = std::stod(r.out.substr(pos + 2));
  EXPECT_NEAR(n / 39.2e6, 1.0, 0.10);
  EXPECT_NE(r.out.find("delta"), std::string::npos);
}

TEST(Cli, InvalidInputsExitTwo) {
  EXPECT_EQ(run({"params", "NoSuchNet"}).code, cli::kExitInvalid);
  EXPECT_EQ(run({"params", "U2Net", "--preset", "Nowhere"}).code, cli::kExitInvalid);
  EXPECT_EQ(run({"params"}).code, cli::kExitInvalid);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitInvalid);
  EXPECT_EQ(run({}).code, cli::kExitInvalid);
  EXPECT_EQ(run({"list", "--threads", "-1"}).code, cli::kExitInvalid);
  const auto r = run({"train", "U2NetS", "--data", "/nonexistent/ds", "--out", scratch("missing").string()});
  EXPECT_EQ(r.code, cli::kExitInvalid);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Cli, CompareIdenticalRunsIsUndefined) {
  const auto d = scratch("compare_same");
  write_cases(d / "a.csv", {{"c1", 0.5}, {"c2", 0.7}, {"c3", 0.9}});
  write_cases(d / "b.csv", {{"c1", 0.5}, {"c2", 0.7}, {"c3", 0.9}});
  const auto r = run({"compare", "--runs", (d / "a.csv").string(), (d / "b.csv").string()});
  EXPECT_EQ(r.code, cli::kExitUndefined);
  EXPECT_NE(r.err.find("undefined"), std::string::npos);
}

TEST(Cli, CompareWritesPValues) {
  const auto d = scratch("compare_diff");
  std::vector<std::pair<std::string, double>> a, b;
  for (int i = 0; i < 8; ++i) {
    a.push_back({"c" + std::to_string(i), 0.5 + 0.01 * i});
    b.push_back({"c" + std::to_string(i), 0.6 + 0.013 * i});
  }
  write_cases(d / "a.csv", a);
  write_cases(d / "b.csv", b);
  const auto r = run({"compare", "--runs", (d / "a.csv").string(), (d / "b.csv").string(), "--out", (d / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("p = 0.0078125"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(d / "o" / "pvalues.csv"));
  EXPECT_TRUE(fs::exists(d / "o" / cli::kRunManifest));
}

TEST(Cli, BuildWritesLoadableCheckpoint) {
  const auto d = scratch("build");
  const auto r = run({"build", "U2NetS", "--width", "0.25", "--out", (d / "m.ckpt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(d / "m.ckpt"));
  EXPECT_TRUE(fs::exists(d / cli::kRunManifest));
}

TEST(Cli, SynthTrainEvalRerunEndToEnd) {
  const auto d = scratch("e2e");
  const auto ds = (d / "ds").string();
  ASSERT_EQ(run({"synth", "--count", "8", "--seed", "4", "--noise", "0", "--out", ds}).code, 0);
  ASSERT_TRUE(fs::exists(d / "ds" / "manifest.json"));

  const auto r1 = (d / "r1").string();
  const auto t = run({"train", "U2NetS", "--data", ds, "--epochs", "1", "--width", "0.25", "--seed", "2", "--out", r1});
  ASSERT_EQ(t.code, 0) << t.err;
  for (const char* f : {"run.json", "history.csv", "best.ckpt", "last.ckpt", "val_dice.csv"})
    EXPECT_TRUE(fs::exists(d / "r1" / f)) << f;

  const auto m = nlohmann::json::parse(slurp(d / "r1" / cli::kRunManifest));
  EXPECT_EQ(m.at("command"), "train");
  EXPECT_EQ(m.at("protocol").at("split").at("val_ids").size(), 2u);
  EXPECT_EQ(m.at("protocol").at("optimizer").at("kind"), "adam");

  const auto r2 = (d / "r2").string();
  ASSERT_EQ(run({"rerun", "--manifest", (d / "r1" / cli::kRunManifest).string(), "--out", r2}).code, 0);
  EXPECT_EQ(slurp(d / "r1" / "history.csv"), slurp(d / "r2" / "history.csv"));
  EXPECT_EQ(slurp(d / "r1" / "val_dice.csv"), slurp(d / "r2" / "val_dice.csv"));
  EXPECT_EQ(slurp(d / "r1" / "best.ckpt"), slurp(d / "r2" / "best.ckpt"));

  const auto ev = run({"eval", "--ckpt", (d / "r1" / "best.ckpt").string(), "--data", ds, "--report",
                       (d / "ev").string()});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_TRUE(fs::exists(d / "ev" / "cases" / "U2NetS.csv"));
  EXPECT_TRUE(fs::exists(d / "ev" / "dice.csv"));
}

TEST(Cli, BenchManifestsShareProtocol) {
  const auto d = scratch("bench");
  const auto r = run({"bench", "--archs", "U2NetS,SS2D2NetS", "--width", "0.25", "--reps", "3", "--warmup", "0",
                      "--epochs", "1", "--count", "8", "--out", d.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto a = nlohmann::json::parse(slurp(d / "U2NetS" / cli::kRunManifest));
  const auto b = nlohmann::json::parse(slurp(d / "SS2D2NetS" / cli::kRunManifest));
  EXPECT_FALSE(a.at("protocol").is_null());
  EXPECT_EQ(a.at("protocol"), b.at("protocol"));
  for (const char* f : {"params.csv", "timing.csv", "dice.csv", "pvalues.csv", "report.md"})
    EXPECT_TRUE(fs::exists(d / f)) << f;
}

TEST(Cli, BenchRejectsTooFewReps) {
  const auto d = scratch("bench_reps");
  EXPECT_EQ(run({"bench", "--archs", "U2NetS", "--width", "0.25", "--reps", "2", "--out", d.string()}).code,
            cli::kExitInvalid);
}
