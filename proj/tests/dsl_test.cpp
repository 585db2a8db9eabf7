// SPDX-License-Identifier: Apache-2.0
#include "oddkit/dsl.hpp"
#include "support/oracle.hpp"
#include "support/spec_fuzz.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace oddkit {
namespace {

std::vector<std::string> codes(const ParseResult& r) {
  std::vector<std::string> out;
  for (const auto& d : r.diagnostics) out.push_back(d.code);
  return out;
}

bool has_code(const ParseResult& r, const std::string& code) {
  const auto c = codes(r);
  return std::ranges::find(c, code) != c.end();
}

constexpr const char* kSquare = R"(
odd "A" level mlm_odd {
  param x : m range [0, 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) (0, 1) }
}
)";

void expect_round_trip(const std::string& text) {
  const ParseResult first = parse_spec(text);
  ASSERT_TRUE(first.ok()) << text << "\n" << (first.diagnostics.empty() ? "" : format(first.diagnostics[0]));
  const std::string canonical = serialize_spec(first.document);
  const ParseResult second = parse_spec(canonical);
  ASSERT_TRUE(second.ok()) << canonical;
  EXPECT_TRUE(structurally_equal(first.document, second.document)) << canonical;
  // Canonical text is a fixed point.
  EXPECT_EQ(serialize_spec(second.document), canonical);
}

TEST(Dsl, CorpusRoundTrips) {
  expect_round_trip(test::read_file(test::data_path("flight_envelope.odd")));
  expect_round_trip(test::read_file(test::data_path("flight_envelope_extended.odd")));
}

TEST(Dsl, FuzzedSpecsRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SCOPED_TRACE(seed);
    expect_round_trip(test::fuzz_spec(seed));
  }
}

TEST(Dsl, CorpusContents) {
  const SpecDocument doc = test::load_spec("flight_envelope_extended.odd");
  ASSERT_EQ(doc.nodes.size(), 5u);
  ASSERT_EQ(doc.scenarios.size(), 3u);
  const OddNode* mlm = doc.find("MLMODD");
  ASSERT_NE(mlm, nullptr);
  EXPECT_EQ(mlm->level, OddLevel::mlm_odd);
  EXPECT_EQ(mlm->allocates, "MLCODD_spec");
  ASSERT_TRUE(mlm->parameters[0].distribution.has_value());
  EXPECT_EQ(mlm->parameters[0].distribution->kind, DistributionKind::triangular);
  EXPECT_EQ(doc.first_with_level(OddLevel::system_od)->name, "SOD");
  EXPECT_EQ(doc.find("MLCODD_oper")->variant, OddVariant::as_operated);
  EXPECT_EQ(doc.find("MLMODD_temp")->extends, "MLMODD");

  const ScenarioSpec* novelty = doc.find_scenario("novelty");
  ASSERT_NE(novelty, nullptr);
  EXPECT_EQ(novelty->monitors.size(), 5u);
  EXPECT_EQ(novelty->stub.coefficients, (std::vector<double>{0, 1, 1}));
  EXPECT_EQ(novelty->monitors[4].action.kind, ActionKind::failover);
  EXPECT_EQ(novelty->monitors[2].known_inputs, (std::vector<std::vector<double>>{{0.2, 5000}}));
}

TEST(Dsl, SyntaxErrorsRecoverAndCarryLocations) {
  const ParseResult r = parse_spec(R"(
odd "A" level mlm_odd {
  param x : m range [0 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) (0, 1) }
}
odd "B" level mlm_odd {
  param x : m range [0, 1]
  param y : m range [0, 1] class nonsense
  region polygon { (0, 0) (1, 0) (1, 1) }
}
)");
  EXPECT_FALSE(r.ok());
  ASSERT_EQ(r.diagnostics.size(), 2u);
  EXPECT_EQ(r.diagnostics[0].code, "E001");
  EXPECT_EQ(r.diagnostics[0].location.line, 3u);
  EXPECT_TRUE(has_code(r, "E011"));
  EXPECT_EQ(format(r.diagnostics[0], "f.odd").rfind("f.odd:3:", 0), 0u);
}

TEST(Dsl, SemanticErrors) {
  EXPECT_TRUE(has_code(parse_spec(std::string(kSquare) + kSquare), "E002"));
  EXPECT_TRUE(has_code(parse_spec(R"(odd "A" allocates "Z" {
  param x : m range [0, 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) (0, 1) }
})"),
                       "E003"));
  EXPECT_TRUE(has_code(parse_spec(R"(odd "A" {
  param x : m range [0, 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (0.5, 0.5) (1, 1) }
})"),
                       "E004"));  // collinear
  EXPECT_TRUE(has_code(parse_spec(R"(odd "A" {
  param x : m range [1, 0]
  param y : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) }
})"),
                       "E005"));
  EXPECT_TRUE(has_code(parse_spec(R"(odd "A" {
  param x : m range [0, 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (3, 0) (1, 1) }
})"),
                       "E006"));
  EXPECT_TRUE(has_code(parse_spec(R"(odd "A" level system_od {
  param x : m range [0, 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) }
}
odd "B" level system_od {
  param x : m range [0, 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) }
})"),
                       "E007"));
  EXPECT_TRUE(has_code(parse_spec(R"(odd "A" allocates "B" {
  param x : m range [0, 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) }
}
odd "B" allocates "A" {
  param x : m range [0, 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) }
})"),
                       "E008"));
  EXPECT_TRUE(has_code(parse_spec(R"(odd "A" {
  param x : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) }
})"),
                       "E010"));
  EXPECT_TRUE(has_code(parse_spec(R"(odd "A" {
  param x : m range [0, 1]
  param y : m range [0, 1]
})"),
                       "E012"));
  EXPECT_TRUE(has_code(parse_spec(R"(odd "A" {
  param x : m range [0, 1] dist triangular 5
  param y : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) }
})"),
                       "E013"));
  EXPECT_TRUE(has_code(parse_spec(R"(odd "A" {
  param x : m range [0, 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) }
  preprocess x scale 0
})"),
                       "E013"));
}

TEST(Dsl, ExtendsMustAddParametersAndStayInsideBase) {
  const std::string base = kSquare;
  EXPECT_TRUE(has_code(parse_spec(base + R"(odd "E" extends "A" {
  param x : m range [0, 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) }
})"),
                       "E009"));
  EXPECT_TRUE(parse_spec(base + R"(odd "E" extends "A" {
  param x : m range [0, 1]
  param y : m range [0, 1]
  param z : m range [0, 1]
  region polytope {
    halfspace 1 0 0 <= 1
    halfspace -1 0 0 <= 0
    halfspace 0 1 0 <= 1
    halfspace 0 -1 0 <= 0
    halfspace 0 0 1 <= 1
    halfspace 0 0 -1 <= 0
    vertex (0, 0, 0) vertex (1, 0, 0) vertex (0, 1, 0) vertex (1, 1, 0)
    vertex (0, 0, 1) vertex (1, 0, 1) vertex (0, 1, 1) vertex (1, 1, 1)
  }
})")
                  .ok());
}

TEST(Dsl, WarningsDoNotBlock) {
  const ParseResult r = parse_spec(R"(odd "A" colour "red" {
  param x : m range [0, 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) }
  frobnicate 3
})");
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(has_code(r, "W001"));
  EXPECT_TRUE(has_code(r, "W002"));
  EXPECT_EQ(r.document.nodes.size(), 1u);
}

TEST(Dsl, ParsingIsDeterministic) {
  const std::string text = test::read_file(test::data_path("flight_envelope_extended.odd"));
  EXPECT_EQ(serialize_spec(parse_spec(text).document), serialize_spec(parse_spec(text).document));
}

TEST(Dsl, SerializationUsesNineSignificantDigits) {
  const ParseResult r = parse_spec(R"(odd "A" {
  param x : m range [0, 0.123456789012]
  param y : m range [0, 1]
  region polygon { (0, 0) (0.1, 0) (0.1, 1) }
})");
  ASSERT_TRUE(r.ok());
  const std::string text = serialize_spec(r.document);
  EXPECT_NE(text.find("0.123456789]"), std::string::npos) << text;
}

TEST(Dsl, AllocationContainmentWarning) {
  const ParseResult r = parse_spec(R"(odd "P" level mlc_odd {
  param x : m range [0, 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (0.5, 0) (0.5, 1) (0, 1) }
}
odd "C" level mlm_odd allocates "P" {
  param x : m range [0, 1]
  param y : m range [0, 1]
  region polygon { (0, 0) (1, 0) (1, 1) (0, 1) }
})");
  ASSERT_TRUE(r.ok());
  const auto warnings = check_allocations(r.document);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_EQ(warnings[0].code, "W201");
  EXPECT_EQ(warnings[0].severity, Severity::warning);
  EXPECT_TRUE(check_allocations(test::load_spec("flight_envelope.odd")).empty());
}

TEST(Dsl, MonitorchainReferencesResolve) {
  const ParseResult r = parse_spec(std::string(kSquare) + R"(
monitorchain "m" {
  chain "A" "Missing"
  stream "s.csv"
  stub bilinear
  monitor range action filter
}
)");
  EXPECT_TRUE(has_code(r, "E003"));
}

}  // namespace
}  // namespace oddkit
