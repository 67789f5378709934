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

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "qitsim/serialize.hpp"

namespace qitsim::io {
namespace {

using photonics::cx4_circuit;
using photonics::Cx4Variant;

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Complex, JsonForms) {
  EXPECT_EQ(complex_to_json({1.5, -2.0}).dump(), "[1.5,-2.0]");
  EXPECT_EQ(complex_from_json(Json(0.25)), Complex(0.25, 0.0));
  EXPECT_EQ(complex_from_json(Json::parse("[0.5, -0.5]")), Complex(0.5, -0.5));
  EXPECT_THROW(complex_from_json(Json::parse("[1, 2, 3]")), std::invalid_argument);
  EXPECT_THROW(complex_from_json(Json("x")), std::invalid_argument);
}

TEST(ToJson, StateRoundTripsExactly) {
  Rng rng(1);
  const auto psi = haar_random_state({2, 4}, rng);
  const auto j = Json::parse(to_json(psi).dump());
  EXPECT_EQ(j["dims"], Json::parse("[2, 4]"));
  for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_EQ(complex_from_json(j["amplitudes"][i]), psi[i]);
}

TEST(ToJson, ProtocolResult) {
  const Complex amps[] = {0.5, 0.5, 0.5, 0.5};
  const auto r = qit_4to2(make_state({4}, amps), CompletionMode::feed_forward(), 1u);
  const auto j = to_json(r);
  EXPECT_EQ(j["protocol"], "qit_4to2");
  EXPECT_EQ(j["outcome_log"].size(), 1u);
  EXPECT_EQ(j["corrections_applied"].size(), 2u);
  EXPECT_EQ(j["success_probability"], 1.0);
  EXPECT_EQ(j["final_state"]["dims"], Json::parse("[2, 4]"));
}

TEST(ToJson, CircuitRoundTripInDegrees) {
  const auto c = cx4_circuit(Cx4Variant::Standard);
  const auto j = to_json(c);
  EXPECT_NEAR(j["elements"][0]["angle_deg"].get<double>(), 22.5, 1e-12);
  const auto back = circuit_from_json(Json::parse(j.dump()));
  ASSERT_EQ(back.elements.size(), c.elements.size());
  for (std::size_t k = 0; k < c.elements.size(); ++k) {
    EXPECT_EQ(back.elements[k].kind, c.elements[k].kind);
    EXPECT_EQ(back.elements[k].photon, c.elements[k].photon);
    EXPECT_EQ(back.elements[k].partner, c.elements[k].partner);
    EXPECT_EQ(back.elements[k].path, c.elements[k].path);
    EXPECT_NEAR(back.elements[k].angle, c.elements[k].angle, 1e-15);
    EXPECT_NEAR(back.elements[k].v_amplitude, c.elements[k].v_amplitude, 1e-15);
  }
  EXPECT_THROW(circuit_from_json(Json::parse(R"({"name": "x", "elements": [{"kind": "Mirror"}]})")),
               std::invalid_argument);
}

TEST(Csv, CountsAndEscaping) {
  stats::CountTable t;
  t.settings = {"ZX"};
  t.outcomes = {{"00", "01"}};
  t.counts = {{3, 0}};
  t.expected = {{2.5, 0.1}};
  EXPECT_EQ(counts_csv(t), "setting,outcome,count,expected\nZX,00,3,2.5\nZX,01,0,0.10000000000000001\n");
  CsvTable c({"a", "b"});
  c.row({"x,y", "say \"hi\""});
  EXPECT_EQ(c.str(), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
  EXPECT_THROW(c.row({"only one"}), std::invalid_argument);
}

TEST(ToJson, EstimatesAndBounds) {
  const auto e = stats::FidelityEstimate::make(0.9, 0.01, stats::FidelityMethod::Tomography);
  EXPECT_EQ(to_json(e)["method"], "tomography");
  const auto b = to_json(stats::classical_bound_check({e}));
  EXPECT_EQ(b["all_above"], true);
  EXPECT_EQ(b["margins"].size(), 1u);
}

// --- schema validator -------------------------------------------------------

const Json& schema() { return cli::run_spec_schema(); }

std::vector<std::string> check(const char* text) { return validate_schema(Json::parse(text), schema()); }

TEST(Schema, EmbeddedCopyMatchesPublishedFile) {
  std::ifstream f(QITSIM_SCHEMA_PATH);
  ASSERT_TRUE(f.good());
  EXPECT_EQ(Json::parse(f), schema());
}

TEST(Schema, AcceptsValidSpecs) {
  EXPECT_TRUE(check(R"({"schema_version": 1, "command": "protocol", "protocol": {"name": "qit4to2", "state": [0.5, [0, 0.5], 0.5, 0.5]}})").empty());
  EXPECT_TRUE(check(R"({"schema_version": 1, "command": "hom-scan", "q": 0.826, "hom": {"q_values": [0, 0.5, 1]}})").empty());
  EXPECT_TRUE(check(R"({"schema_version": 1, "command": "paper-suite", "seed": 4, "experiment": {"rate": 0.22, "duration": 600}, "paper_suite": {"which": "fig5"}})").empty());
}

TEST(Schema, ReportsViolationsWithPointers) {
  auto has = [](const std::vector<std::string>& errs, const std::string& needle) {
    for (const auto& e : errs)
      if (e.find(needle) != std::string::npos) return true;
    return false;
  };
  EXPECT_TRUE(has(check(R"({"command": "tomo"})"), "schema_version"));
  EXPECT_TRUE(has(check(R"({"schema_version": 2, "command": "tomo"})"), "/schema_version"));
  EXPECT_TRUE(has(check(R"({"schema_version": 1, "command": "fly"})"), "/command"));
  EXPECT_TRUE(has(check(R"({"schema_version": 1, "command": "tomo", "q": 1.5})"), "/q: above maximum"));
  EXPECT_TRUE(has(check(R"({"schema_version": 1, "command": "tomo", "seed": -1})"), "/seed: below minimum"));
  EXPECT_TRUE(has(check(R"({"schema_version": 1, "command": "tomo", "seed": 1.5})"), "/seed: expected type"));
  EXPECT_TRUE(has(check(R"({"schema_version": 1, "command": "tomo", "colour": 1})"), "unexpected property"));
  EXPECT_TRUE(has(check(R"({"schema_version": 1, "command": "tomo", "tomo": {"state": [[1, 2, 3]]}})"), "/tomo/state/0"));
  EXPECT_TRUE(has(check(R"({"schema_version": 1, "command": "tomo", "experiment": {"rate": 0}})"), "must exceed"));
  EXPECT_TRUE(has(check(R"({"schema_version": 1, "command": "tomo", "kept": []})"), "fewer than"));
}

}  // namespace
}  // namespace qitsim::io
