// Copyright 2026 The qitsim Authors
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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace qitsim::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("qitsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run_args(std::vector<std::string> args, const fs::path& out_dir) {
    out_.str("");
    err_.str("");
    args.push_back("--out");
    args.push_back(out_dir.string());
    return run(args, out_, err_);
  }
  int run_args(std::vector<std::string> args) { return run_args(std::move(args), dir_); }

  Json read_json(const std::string& name) const {
    std::ifstream f(dir_ / name);
    return Json::parse(f);
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST(ParseComplex, Forms) {
  EXPECT_EQ(parse_complex("0.5"), Complex(0.5, 0));
  EXPECT_EQ(parse_complex("-0.5i"), Complex(0, -0.5));
  EXPECT_EQ(parse_complex("0.5+0.5i"), Complex(0.5, 0.5));
  EXPECT_EQ(parse_complex("i"), Complex(0, 1));
  EXPECT_EQ(parse_complex("-i"), Complex(0, -1));
  EXPECT_EQ(parse_complex(" 1e-3-2e-3j "), Complex(1e-3, -2e-3));
  EXPECT_THROW(parse_complex("abc"), std::invalid_argument);
  EXPECT_THROW(parse_complex(""), std::invalid_argument);
  EXPECT_EQ(parse_complex_list("1,0,0,1").size(), 4u);
}

TEST_F(CliTest, ProtocolFourToTwo) {
  EXPECT_EQ(run_args({"protocol", "qit4to2", "--state", "0.5,0.5,0.5,0.5"}), kOk) << err_.str();
  const auto j = read_json("protocol.json");
  EXPECT_NEAR(j["output"]["fidelity"].get<double>(), 1.0, kNumericTol);
  EXPECT_EQ(j["output"]["result"]["final_state"]["dims"], Json::parse("[2, 4]"));
  EXPECT_TRUE(fs::exists(dir_ / "metadata.json"));
  EXPECT_TRUE(read_json("metadata.json").contains("timestamp"));
  EXPECT_NE(out_.str().find("PASS fidelity"), std::string::npos);
}

TEST_F(CliTest, MergeBasisStates) {
  EXPECT_EQ(run_args({"protocol", "merge", "--d", "2", "--qubit", "1,0", "--qudit", "1,0"}), kOk) << err_.str();
  const auto amps = read_json("protocol.json")["output"]["result"]["final_state"]["amplitudes"];
  ASSERT_EQ(amps.size(), 4u);
  EXPECT_NEAR(std::abs(io::complex_from_json(amps[0])), 1.0, kNumericTol);
}

TEST_F(CliTest, PostSelectedSplit) {
  EXPECT_EQ(run_args({"--mode", "postselect", "--kept", "0", "protocol", "split", "--state", "1,0,0,0,0,0,1,0"}), kOk)
      << err_.str();
  const auto r = read_json("protocol.json")["output"]["result"];
  EXPECT_EQ(r["outcome_log"][0]["outcome"], 0);
  EXPECT_NEAR(r["success_probability"].get<double>(), 0.5, kNumericTol);
  // The upper branch needs the X (x) X_2d correction, which post-selection
  // does not apply: the run completes but its check fails.
  EXPECT_EQ(run_args({"--mode", "postselect", "--kept", "1", "protocol", "split", "--state", "1,0,0,0,0,0,1,0"}),
            kCheckFailed);
  EXPECT_NE(out_.str().find("FAIL fidelity"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "protocol.json"));
}

TEST_F(CliTest, SynthesizeCcz) {
  EXPECT_EQ(run_args({"synthesize", "--n", "3", "--gate", "ccz", "--check"}), kOk) << err_.str();
  EXPECT_NE(out_.str().find("PASS oracle_equivalence"), std::string::npos);
  EXPECT_EQ(run_args({"synthesize", "--n", "2", "--gate", "ccz"}), kUsageError);
}

TEST_F(CliTest, SuiteFig4Ideal) {
  EXPECT_EQ(run_args({"--q", "1", "paper-suite", "fig4", "--infinite"}), kOk) << err_.str();
  const auto rows = read_json("fig4.json")["output"]["rows"];
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r["estimate"]["value"].get<double>(), 1.0, kNumericTol);
    EXPECT_EQ(r["experiment"]["reference_only"], true);
  }
  const auto csv = slurp(dir_ / "fig4.csv");
  EXPECT_NE(csv.find("experiment_fidelity"), std::string::npos);
  EXPECT_NE(csv.find("reference_only"), std::string::npos);
}

TEST_F(CliTest, SuiteHomAndCx4) {
  EXPECT_EQ(run_args({"--q", "0.826", "paper-suite", "hom"}), kOk) << err_.str();
  const auto rows = read_json("hom.json")["output"]["rows"];
  bool found = false;
  for (const auto& r : rows) {
    if (r["q"] == 0.826) {
      EXPECT_NEAR(r["visibility"].get<double>(), 0.661, 1e-3);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(run_args({"paper-suite", "cx4"}), kOk) << err_.str();
  EXPECT_NE(out_.str().find("PASS standard_success_1_27"), std::string::npos);
}

TEST_F(CliTest, HomScanDefaultSweep) {
  EXPECT_EQ(run_args({"hom-scan"}), kOk) << err_.str();
  const auto rows = read_json("hom_scan.json")["output"];
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0]["visibility"].get<double>(), 0.0, kIdentityTol);
  EXPECT_NEAR(rows[1]["visibility"].get<double>(), 0.4, kIdentityTol);
  EXPECT_NEAR(rows[2]["visibility"].get<double>(), 0.8, kIdentityTol);
}

TEST_F(CliTest, TomographyExactAndSampled) {
  EXPECT_EQ(run_args({"tomo", "--state", "1,0,1,0", "--infinite"}), kOk) << err_.str();
  EXPECT_NEAR(read_json("tomo.json")["output"]["fidelity"].get<double>(), 1.0, kNumericTol);
  EXPECT_EQ(run_args({"--seed", "3", "tomo", "--state", "1,0,1,0"}), kOk) << err_.str();
  EXPECT_NE(out_.str().find("PASS physical"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "tomo.csv").find("setting,outcome,count,expected"), std::string::npos);
}

TEST_F(CliTest, OpticalRuns) {
  EXPECT_EQ(run_args({"optical", "--run", "cx4", "--a", "1,1", "--b", "1,0,0,i"}), kOk) << err_.str();
  EXPECT_EQ(run_args({"optical", "--run", "2to4", "--a", "1,1", "--b", "1,0", "--variant", "simplified"}), kOk)
      << err_.str();
  EXPECT_EQ(run_args({"--q", "0.826", "optical", "--run", "4to2", "--b", "1,1,1,1"}), kOk) << err_.str();
  const double f = read_json("optical.json")["output"]["run"]["fidelity"].get<double>();
  EXPECT_GT(f, 2.0 / 3.0);
  EXPECT_LT(f, 1.0);
}

TEST_F(CliTest, ErrorsAreUsageFailures) {
  EXPECT_EQ(run_args({"--q", "1.5", "hom-scan"}), kUsageError);
  EXPECT_NE(err_.str().find("/q: above maximum"), std::string::npos);
  EXPECT_EQ(run_args({"protocol", "teleport"}), kUsageError);
  EXPECT_EQ(run_args({"protocol", "qit4to2", "--state", "1,0"}), kUsageError);
  EXPECT_EQ(run_args({"protocol", "qit4to2", "--state", "1,zz"}), kUsageError);
  EXPECT_EQ(run_args({"tomo"}), kUsageError);
  EXPECT_EQ(run_args({"frobnicate"}), kUsageError);
  EXPECT_FALSE(fs::exists(dir_ / "tomo.json"));
}

TEST_F(CliTest, ConfigFileWithOverrides) {
  fs::create_directories(dir_);
  const auto cfg = dir_ / "spec.json";
  std::ofstream(cfg) << R"({"schema_version": 1, "command": "hom-scan", "hom": {"q_values": [0.25]}})";
  EXPECT_EQ(run_args({"--config", cfg.string(), "run"}), kOk) << err_.str();
  EXPECT_NEAR(read_json("hom_scan.json")["output"][0]["visibility"].get<double>(), 0.2, kIdentityTol);
  EXPECT_EQ(run_args({"--config", cfg.string(), "hom-scan", "--q-values", "0.5"}), kOk) << err_.str();
  EXPECT_NEAR(read_json("hom_scan.json")["output"][0]["visibility"].get<double>(), 0.4, kIdentityTol);
  std::ofstream(cfg) << R"({"schema_version": 1, "command": "hom-scan", "bogus": true})";
  EXPECT_EQ(run_args({"--config", cfg.string(), "run"}), kUsageError);
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  ::setenv(kOutDirEnv, dir_.string().c_str(), 1);
  std::ostringstream out, err;
  EXPECT_EQ(run({"hom-scan"}, out, err), kOk) << err.str();
  ::unsetenv(kOutDirEnv);
  EXPECT_TRUE(fs::exists(dir_ / "hom_scan.json"));
}

TEST_F(CliTest, SeededRunsAreByteIdentical) {
  const std::vector<std::string> args{"--seed", "11", "--q", "0.826", "paper-suite", "fig5"};
  EXPECT_EQ(run_args(args, dir_ / "a"), kOk) << err_.str();
  EXPECT_EQ(run_args(args, dir_ / "b"), kOk) << err_.str();
  EXPECT_EQ(slurp(dir_ / "a" / "fig5.json"), slurp(dir_ / "b" / "fig5.json"));
  EXPECT_EQ(slurp(dir_ / "a" / "fig5.csv"), slurp(dir_ / "b" / "fig5.csv"));
  EXPECT_EQ(run_args({"--seed", "12", "--q", "0.826", "paper-suite", "fig5"}, dir_ / "c"), kOk);
  EXPECT_NE(slurp(dir_ / "a" / "fig5.csv"), slurp(dir_ / "c" / "fig5.csv"));
}

TEST_F(CliTest, SchemaAndHelp) {
  std::ostringstream out, err;
  EXPECT_EQ(run({"schema"}, out, err), kOk);
  EXPECT_EQ(Json::parse(out.str()), run_spec_schema());
  std::ostringstream hout;
  EXPECT_EQ(run({"--help"}, hout, err), kOk);
  EXPECT_NE(hout.str().find("paper-suite"), std::string::npos);
}

}  // namespace
}  // namespace qitsim::cli
