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

// Acceptance runner. Links the oracle, gradient and statistics suites from
// tests/unit next to the end-to-end checks below, runs the tests belonging to
// each criterion and prints one PASS/FAIL line per criterion.
//
//   nnuzoo_acceptance [--criteria 1,3,5] [gtest flags]

#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nnuzoo/cli/cli.hpp"
#include "nnuzoo/eval/report.hpp"
#include "nnuzoo/models/model.hpp"
#include "nnuzoo/train/trainer.hpp"

using namespace nnuzoo;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Criterion {
  int id;
  const char* title;
  std::vector<std::string> patterns;  // "Suite.Name", "Suite.*" or "*.Name"
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "parameter counts within 10% of the reference table; SS2D2Net/SS2D2NetS ratio in [12, 25]",
       {"Acceptance.ParameterCounts", "Acceptance.SmallVariantRatio"}},
      {2, "kernel oracles (scan, ss2d, window attention, depthwise separable, conv adjoint)",
       {"SelectiveScan.MatchesNaiveRecurrence", "Ss2d.MatchesExplicitReorderingOracle",
        "WindowAttention.FullWindowEqualsDenseAttention", "WindowAttention.ShiftedMatchesMaskedDenseOracle",
        "Mhsa.MatchesPerHeadLoopOracle", "DepthwiseSeparable.MatchesComposedOracle", "Conv2d.MatchesNestedLoopOracle",
        "ConvTranspose2d.MatchesScatterOracle", "ConvTranspose2d.AdjointOfConv"}},
      {3, "finite-difference gradients of primitives, kernels, losses and every U-Block kind",
       {"Autodiff.FiniteDifferenceEveryPrimitive", "Autodiff.CompositeGraphGradcheck", "*.Gradcheck",
        "Loss.DiceGradient", "Loss.CrossEntropyGradient", "Loss.CombinedGradient", "UBlock.GradcheckEveryKind"}},
      {4, "tiny U2NetS and SS2D2NetS reach val dice >= 0.70 in 20 epochs, < 15 min each, bit-reproducible",
       {"Synth.NoiselessTaskIsThresholdSeparable", "Acceptance.TinyTrainingU2NetS",
        "Acceptance.TinyTrainingSS2D2NetS"}},
      {5, "Wilcoxon exact vs enumeration, n=5 all-positive p, normal approximation at n=12, dice cases",
       {"Wilcoxon.ExactMatchesEnumerationUpToTwelve", "Wilcoxon.AllPositiveFive",
        "Wilcoxon.NormalApproximationAgreesWithExactAtTwelve", "Dice.IdentityDisjointHalf"}},
      {6, "80/20 split, weighted dice+CE loss, identical protocol across bench architectures",
       {"Split.EightyTwenty", "Split.DatasetMembership", "Loss.CombinedIsWeightedSum",
        "Acceptance.BenchProtocolIdenticalAcrossArchitectures"}},
      {7, "bench step time of SS2D2NetS exceeds U2NetS at identical geometry",
       {"Acceptance.StepTimeOrdering"}},
  };
  return all;
}

bool matches(const std::string& pattern, const std::string& suite, const std::string& name) {
  const auto dot = pattern.find('.');
  const auto ps = pattern.substr(0, dot), pn = pattern.substr(dot + 1);
  return (ps == "*" || ps == suite) && (pn == "*" || pn == name);
}

struct Outcome {
  int run = 0, failed = 0;
  double seconds = 0;
  std::vector<std::string> failures;
};

class CriterionListener : public ::testing::EmptyTestEventListener {
 public:
  explicit CriterionListener(std::map<int, Outcome>& out) : out_(out) {}
  void OnTestEnd(const ::testing::TestInfo& t) override {
    if (!t.should_run()) return;
    for (const auto& c : criteria())
      for (const auto& p : c.patterns)
        if (matches(p, t.test_suite_name(), t.name())) {
          auto& o = out_[c.id];
          ++o.run;
          o.seconds += static_cast<double>(t.result()->elapsed_time()) / 1000.0;
          if (t.result()->Failed()) {
            ++o.failed;
            o.failures.push_back(std::string(t.test_suite_name()) + "." + t.name());
          }
          break;
        }
  }

 private:
  std::map<int, Outcome>& out_;
};

struct Cmd {
  int code;
  std::string out, err;
  double seconds;
};

Cmd nnuzoo_cmd(std::vector<std::string> args) {
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  const int code = cli::run_command(args, out, err);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {code, out.str(), err.str(), s};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path workdir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("nnuzoo_acceptance_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

double millions(ArchitectureId a, const std::string& preset) {
  return static_cast<double>(count_params(preset_config(a, preset))) / 1e6;
}

}  // namespace

// ---- 1

TEST(Acceptance, ParameterCounts) {
  const std::vector<std::pair<ArchitectureId, double>> headline = {
      {ArchitectureId::U2Net, 42.0},    {ArchitectureId::U2NetS, 1.10}, {ArchitectureId::SS2D2Net, 39.0},
      {ArchitectureId::SS2D2NetS, 2.00}, {ArchitectureId::SwT, 39.5},   {ArchitectureId::MambaND2Net, 39.5}};
  for (const auto& [a, target] : headline) {
    const double m = millions(a, "Microscopy");
    std::printf("  %-12s %8.3fM  reference %6.2fM  delta %+5.1f%%\n", arch_name(a).c_str(), m, target,
                100 * (m / target - 1));
    EXPECT_NEAR(m / target, 1.0, 0.10) << arch_name(a);
  }
  for (auto a : all_architectures())
    for (const auto& p : preset_names()) {
      if (const auto t = target_params_millions(a, p)) {
        EXPECT_NEAR(millions(a, p) / *t, 1.0, 0.10) << arch_name(a) << " @ " << p;
      }
    }
}

TEST(Acceptance, SmallVariantRatio) {
  for (const auto& p : preset_names()) {
    if (!target_params_millions(ArchitectureId::SS2D2Net, p)) continue;
    const double r = millions(ArchitectureId::SS2D2Net, p) / millions(ArchitectureId::SS2D2NetS, p);
    std::printf("  %-11s SS2D2Net/SS2D2NetS = %.2f\n", p.c_str(), r);
    EXPECT_GE(r, 12.0) << p;
    EXPECT_LE(r, 25.0) << p;
  }
}

// ---- 4

namespace {

void tiny_training(const std::string& arch) {
  const auto d = workdir("train_" + arch);
  const auto ds = (d / "data").string();
  const auto synth = nnuzoo_cmd({"synth", "--preset", "SynthShapes", "--noise", "0", "--count", "120", "--seed", "11",
                                 "--out", ds});
  ASSERT_EQ(synth.code, 0) << synth.err;

  const auto width = eval::format_double(kTinyWidth);
  const auto r1 = (d / "run1").string();
  const auto t = nnuzoo_cmd({"train", arch, "--data", ds, "--preset", "SynthShapes", "--width", width, "--epochs",
                             "20", "--seed", "5", "--threads", "1", "--out", r1});
  ASSERT_EQ(t.code, 0) << t.err;
  const auto history = train::read_history_csv((d / "run1" / "history.csv").string());
  ASSERT_EQ(history.size(), 20u);
  const double final_dice = history.back().val_dice;
  std::printf("  %-10s final val dice %.4f, %.1f s\n", arch.c_str(), final_dice, t.seconds);
  EXPECT_GE(final_dice, 0.70);
  EXPECT_LT(t.seconds, 15 * 60.0);

  const auto r2 = (d / "run2").string();
  const auto re = nnuzoo_cmd({"rerun", "--manifest", (d / "run1" / cli::kRunManifest).string(), "--out", r2});
  ASSERT_EQ(re.code, 0) << re.err;
  EXPECT_EQ(slurp(d / "run1" / "history.csv"), slurp(d / "run2" / "history.csv"));
  EXPECT_EQ(slurp(d / "run1" / "best.ckpt"), slurp(d / "run2" / "best.ckpt"));
  EXPECT_EQ(slurp(d / "run1" / "val_dice.csv"), slurp(d / "run2" / "val_dice.csv"));
}

}  // namespace

TEST(Acceptance, TinyTrainingU2NetS) { tiny_training("U2NetS"); }
TEST(Acceptance, TinyTrainingSS2D2NetS) { tiny_training("SS2D2NetS"); }

// ---- 6

TEST(Acceptance, BenchProtocolIdenticalAcrossArchitectures) {
  const auto d = workdir("bench_protocol");
  const auto b = nnuzoo_cmd({"bench", "--archs", "all", "--preset", "SynthShapes", "--width", "0.25", "--reps", "3",
                             "--warmup", "0", "--epochs", "1", "--count", "20", "--w-dice", "0.7", "--w-ce", "1.3",
                             "--out", d.string()});
  ASSERT_EQ(b.code, 0) << b.err;
  json reference;
  for (auto a : all_architectures()) {
    const auto m = json::parse(slurp(d / arch_name(a) / cli::kRunManifest));
    const auto& p = m.at("protocol");
    ASSERT_FALSE(p.is_null()) << arch_name(a);
    EXPECT_EQ(p.at("split").at("ratio"), 0.8);
    EXPECT_EQ(p.at("split").at("val_ids").size(), 4u);
    EXPECT_EQ(p.at("loss").at("w_dice"), 0.7);
    EXPECT_EQ(p.at("loss").at("w_ce"), 1.3);
    if (reference.is_null()) reference = p;
    for (const char* field : {"split", "loss", "augmentation", "optimizer", "lr_schedule", "epochs"})
      EXPECT_EQ(p.at(field), reference.at(field)) << arch_name(a) << " " << field;
  }
}

// ---- 7

TEST(Acceptance, StepTimeOrdering) {
  const auto d = workdir("bench_timing");
  const auto b = nnuzoo_cmd({"bench", "--archs", "nnUNet-like,U2NetS,SS2D2NetS", "--preset", "SynthShapes", "--width",
                             eval::format_double(kTinyWidth), "--reps", "5", "--warmup", "1", "--threads", "1",
                             "--out", d.string()});
  ASSERT_EQ(b.code, 0) << b.err;
  const auto t = eval::read_csv((d / "timing.csv").string());
  std::size_t arch_col = 0, step_col = 0;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == "architecture") arch_col = i;
    if (t.header[i] == "step_median_ms") step_col = i;
  }
  ASSERT_GT(step_col, 0u);
  std::map<std::string, double> step;
  for (const auto& row : t.rows) step[row[arch_col]] = std::stod(row[step_col]);
  ASSERT_EQ(step.size(), 3u);
  std::printf("  step median ms: nnUNet-like %.1f, U2NetS %.1f, SS2D2NetS %.1f\n", step["nnUNet-like"],
              step["U2NetS"], step["SS2D2NetS"]);
  std::printf("  SS2D2NetS/U2NetS %.2f, SS2D2NetS/nnUNet-like %.2f (reported only)\n",
              step["SS2D2NetS"] / step["U2NetS"], step["SS2D2NetS"] / step["nnUNet-like"]);
  EXPECT_GT(step["SS2D2NetS"], step["U2NetS"]);
}

int main(int argc, char** argv) {
  std::set<int> selected;
  std::vector<char*> rest = {argv[0]};
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criteria") == 0 && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) selected.insert(std::stoi(tok));
    } else {
      rest.push_back(argv[i]);
    }
  }
  if (selected.empty())
    for (const auto& c : criteria()) selected.insert(c.id);

  std::string filter;
  for (const auto& c : criteria())
    if (selected.count(c.id))
      for (const auto& p : c.patterns) filter += (filter.empty() ? "" : ":") + p;
  ::testing::GTEST_FLAG(filter) = filter;

  int n = static_cast<int>(rest.size());
  ::testing::InitGoogleTest(&n, rest.data());
  std::map<int, Outcome> outcomes;
  ::testing::UnitTest::GetInstance()->listeners().Append(new CriterionListener(outcomes));
  (void)RUN_ALL_TESTS();

  bool all_pass = true;
  std::printf("\n");
  for (const auto& c : criteria()) {
    if (!selected.count(c.id)) continue;
    const auto& o = outcomes[c.id];
    const bool pass = o.run > 0 && o.failed == 0;
    all_pass &= pass;
    std::printf("%s criterion %d: %s [%d tests, %.1f s]\n", pass ? "PASS" : "FAIL", c.id, c.title, o.run, o.seconds);
    for (const auto& f : o.failures) std::printf("       failed: %s\n", f.c_str());
  }
  return all_pass ? 0 : 1;
}
