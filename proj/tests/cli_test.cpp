// SPDX-License-Identifier: Apache-2.0
#include "oddkit/cli.hpp"
#include "support/oracle.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace oddkit {
namespace {

namespace fs = std::filesystem;

struct Invocation {
  int code;
  std::string out, err;
};

Invocation oddkit(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string spec() { return test::data_path("flight_envelope.odd"); }
std::string extended() { return test::data_path("flight_envelope_extended.odd"); }
std::string golden() { return test::data_path("golden_points.csv"); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("oddkit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string file(const std::string& name, const std::string& content = {}) {
    const fs::path p = dir_ / name;
    if (!content.empty()) std::ofstream(p) << content;
    return p.string();
  }
  fs::path dir_;
};

TEST_F(CliTest, ValidateCorpus) {
  const Invocation ok = oddkit({"validate", spec()});
  EXPECT_EQ(ok.code, cli::kOk);
  EXPECT_NE(ok.out.find("4 nodes"), std::string::npos);
  EXPECT_EQ(oddkit({"validate", extended()}).code, cli::kOk);
}

TEST_F(CliTest, ValidateReportsDiagnostics) {
  const Invocation bad = oddkit({"validate", file("bad.odd", "odd \"A\" level system_od {\n  param Mach range [1, 0]\n}\n")});
  EXPECT_EQ(bad.code, cli::kDiagnostics);
  EXPECT_NE(bad.err.find("error"), std::string::npos);
  EXPECT_EQ(oddkit({"validate", file("missing.odd")}).code, cli::kUsage);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(oddkit({}).code, cli::kUsage);
  EXPECT_EQ(oddkit({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(oddkit({"classify", spec(), golden()}).code, cli::kUsage);
  EXPECT_EQ(oddkit({"classify", spec(), golden(), "--node", "MLMODD", "--chain", "MLMODD,SOD"}).code, cli::kUsage);
  EXPECT_EQ(oddkit({"classify", spec(), golden(), "--node", "nowhere"}).code, cli::kUsage);
  EXPECT_EQ(oddkit({"partition", spec(), golden(), "--chain", "MLMODD"}).code, cli::kUsage);
  EXPECT_EQ(oddkit({"coverage", spec(), golden(), "--node", "MLMODD", "--grid", "3by4"}).code, cli::kUsage);
  EXPECT_EQ(oddkit({"generate", spec(), "--mode", "edge"}).code, cli::kUsage);
  EXPECT_EQ(oddkit({"generate", spec(), "--node", "MLMODD", "--mode", "sideways"}).code, cli::kUsage);
  EXPECT_EQ(oddkit({"generate", spec(), "--node", "MLMODD", "--mode", "inlier", "--transform", "scale:Alt"}).code,
            cli::kUsage);
  EXPECT_EQ(oddkit({"--help"}).code, cli::kOk);
}

TEST_F(CliTest, ClassifyMatchesGoldenLabels) {
  const Invocation r = oddkit({"classify", extended(), golden(), "--chain", "MLMODD,MLCODD_spec,MLCODD_oper", "--extended",
                        "MLMODD_temp"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.out, test::read_file(test::data_path("golden_labels.csv")));
  const Invocation node = oddkit({"classify", spec(), golden(), "--node", "MLMODD"});
  ASSERT_EQ(node.code, cli::kOk) << node.err;
  EXPECT_EQ(node.out.substr(0, node.out.find('\n')), "row,kind,category,node,on_boundary,annotations");
}

TEST_F(CliTest, OutputFilesAreNotOverwrittenWithoutForce) {
  const std::string out = file("labels.csv", "keep me\n");
  const std::vector<std::string> base{"classify", spec(), golden(), "--node", "MLMODD", "-o", out};
  EXPECT_EQ(oddkit(base).code, cli::kUsage);
  EXPECT_EQ(test::read_file(out), "keep me\n");
  auto forced = base;
  forced.push_back("--force");
  EXPECT_EQ(oddkit(forced).code, cli::kOk);
  EXPECT_NE(test::read_file(out), "keep me\n");
}

TEST_F(CliTest, PartitionAndAnalyze) {
  const std::vector<std::string> chain{"--chain", "MLMODD,MLCODD_spec,MLCODD_oper"};
  auto args = [&](std::vector<std::string> head) {
    head.insert(head.end(), chain.begin(), chain.end());
    return head;
  };
  const Invocation p = oddkit(args({"partition", spec(), golden()}));
  ASSERT_EQ(p.code, cli::kOk) << p.err;
  EXPECT_EQ(p.out.substr(0, p.out.find('\n')), "kinds,category,count,rows");

  const Invocation text = oddkit(args({"analyze", spec(), golden()}));
  ASSERT_EQ(text.code, cli::kOk) << text.err;
  const Invocation csv = oddkit(args({"analyze", spec(), golden(), "--format", "csv"}));
  ASSERT_EQ(csv.code, cli::kOk) << csv.err;
  EXPECT_NE(text.out, csv.out);
  EXPECT_EQ(oddkit(args({"analyze", spec(), golden(), "--format", "xml"})).code, cli::kUsage);

  const Invocation broken = oddkit(args({"analyze", spec(), golden(), "--rules", file("bad.rules", "this is not a rule\n")}));
  EXPECT_EQ(broken.code, cli::kDiagnostics);
}

TEST_F(CliTest, RulesFromEnvironment) {
  const std::string rules = file("env.rules", "this is not a rule\n");
  ::setenv("ODDKIT_RULES", rules.c_str(), 1);
  const int code = oddkit({"analyze", spec(), golden(), "--chain", "MLMODD,MLCODD_spec"}).code;
  ::unsetenv("ODDKIT_RULES");
  EXPECT_EQ(code, cli::kDiagnostics);
  EXPECT_EQ(oddkit({"analyze", spec(), golden(), "--chain", "MLMODD,MLCODD_spec"}).code, cli::kOk);
}

TEST_F(CliTest, Coverage) {
  const Invocation r = oddkit({"coverage", spec(), golden(), "--node", "MLMODD", "--grid", "4x4"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_FALSE(r.out.empty());
}

TEST_F(CliTest, GenerateModesRoundTripThroughClassify) {
  struct Case {
    std::vector<std::string> args;
    std::string category;
  };
  const std::vector<Case> cases{
      {{"--node", "MLMODD", "--mode", "nominal_interior"}, "Nominal"},
      {{"--node", "MLMODD", "--mode", "edge"}, "EdgeCase"},
      {{"--node", "MLMODD", "--mode", "outlier_ring"}, "Outlier"},
      {{"--node", "MLMODD", "--mode", "inlier", "--transform", "scale:Alt:0.1"}, "Inlier"},
  };
  for (const auto& c : cases) {
    std::vector<std::string> args{"generate", spec(), "-n", "25", "--seed", "4"};
    args.insert(args.end(), c.args.begin(), c.args.end());
    const Invocation g = oddkit(args);
    ASSERT_EQ(g.code, cli::kOk) << g.err;
    EXPECT_EQ(g.out, oddkit(args).out);
    const std::string path = file(c.category + ".csv", g.out);
    const Invocation labels = oddkit({"classify", spec(), path, "--node", "MLMODD"});
    ASSERT_EQ(labels.code, cli::kOk) << labels.err;
    std::istringstream lines(labels.out);
    std::string line;
    std::getline(lines, line);
    std::size_t rows = 0;
    for (; std::getline(lines, line); ++rows)
      EXPECT_NE(line.find("," + c.category + ","), std::string::npos) << line;
    EXPECT_EQ(rows, 25u);
  }
}

TEST_F(CliTest, GenerateNovelty) {
  const Invocation g = oddkit({"generate", extended(), "--mode", "novelty", "--extended", "MLMODD_temp", "-n", "10"});
  ASSERT_EQ(g.code, cli::kOk) << g.err;
  EXPECT_NE(g.out.find("hidden:Temp"), std::string::npos);
  EXPECT_EQ(oddkit({"generate", extended(), "--mode", "novelty", "--extended", "MLMODD"}).code, cli::kUsage);
}

TEST_F(CliTest, GenerateEmptyStratumIsADomainError) {
  const std::string diamond = file("diamond.odd",
                                   "odd \"D\" level system_od {\n"
                                   "  param x : m range [0, 1] class operational\n  param y : m range [0, 1] class operational\n"
                                   "  region polygon { (0.5, 0) (1, 0.5) (0.5, 1) (0, 0.5) }\n}\n");
  ASSERT_EQ(oddkit({"validate", diamond}).code, cli::kOk) << oddkit({"validate", diamond}).err;
  EXPECT_EQ(oddkit({"generate", diamond, "--node", "D", "--mode", "feasible_corner"}).code, cli::kDiagnostics);
}

TEST_F(CliTest, Simulate) {
  const std::string metrics = file("metrics.txt");
  const Invocation r = oddkit({"simulate", extended(), "--scenario", "outcod", "--metrics", metrics});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "row,disposition,action,detector,latched,stub_output,decisions");
  EXPECT_NE(test::read_file(metrics).find("detection.kind.OutCOD=1\n"), std::string::npos);
  const Invocation to_stderr = oddkit({"simulate", extended(), "--scenario", "novelty"});
  EXPECT_NE(to_stderr.err.find("detection.input_side=0\n"), std::string::npos);
  EXPECT_EQ(oddkit({"simulate", extended(), "--scenario", "nowhere"}).code, cli::kDiagnostics);
}

TEST_F(CliTest, Render) {
  const Invocation r = oddkit({"render", spec(), golden(), "--chain", "MLMODD,MLCODD_spec"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.out.rfind("<?xml", 0), 0u);
  EXPECT_NE(r.out.find("cat-"), std::string::npos);
  EXPECT_EQ(oddkit({"render", extended()}).code, cli::kUsage);
  EXPECT_EQ(oddkit({"render", spec(), "--nodes", "SOD,nowhere"}).code, cli::kUsage);
}

}  // namespace
}  // namespace oddkit
