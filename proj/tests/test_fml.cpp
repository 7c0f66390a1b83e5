#include <doctest.h>

#include <random>

#include "aifml/fml_xml.hpp"
#include "support/fixtures.hpp"

using namespace aifml;

TEST_CASE("membership shapes") {
  CHECK(membership(Triangular{0, 0.5, 1}, 0.5) == doctest::Approx(1.0));
  CHECK(membership(Triangular{0, 0.5, 1}, 0.25) == doctest::Approx(0.5));
  CHECK(membership(Triangular{0, 0.5, 1}, -0.1) == 0.0);
  CHECK(membership(Triangular{0, 0.5, 1}, 1.1) == 0.0);

  CHECK(membership(Trapezoidal{0, 1, 2, 3}, 1.5) == 1.0);
  CHECK(membership(Trapezoidal{0, 1, 2, 3}, 5.0) == 0.0);
  CHECK(membership(Trapezoidal{0, 1, 2, 3}, 0.5) == doctest::Approx(0.5));
  CHECK(membership(Trapezoidal{0, 1, 2, 3}, 2.5) == doctest::Approx(0.5));

  CHECK(membership(Gaussian{0.5, 0.1}, 0.5) == doctest::Approx(1.0));
  CHECK(membership(Gaussian{0.5, 0.1}, 0.6) == doctest::Approx(std::exp(-0.5)));

  CHECK(membership(Singleton{0.3}, 0.3) == 1.0);
  CHECK(membership(Singleton{0.3}, 0.300001) == 0.0);
}

TEST_CASE("degenerate triangular acts as a spike") {
  const MembershipFunction spike = Triangular{0.4, 0.4, 0.4};
  CHECK(membership(spike, 0.4) == 1.0);
  CHECK(membership(spike, 0.399) == 0.0);
  CHECK(membership(spike, 0.401) == 0.0);
}

TEST_CASE("term complement flips the degree") {
  const FuzzyTerm term{"not_low", true, Triangular{0, 0, 1}};
  CHECK(term_membership(term, 0.0) == doctest::Approx(0.0));
  CHECK(term_membership(term, 0.75) == doctest::Approx(0.75));
}

TEST_CASE("membership stays within the unit interval") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> span(-20.0, 20.0);
  for (int i = 0; i < 2000; ++i) {
    const FmlDocument doc = testsupport::random_valid_document(rng);
    for (const auto& variable : doc.knowledge_base) {
      for (const auto& term : variable.terms) {
        const double x = span(rng);
        const double degree = term_membership(term, x);
        CHECK(degree >= 0.0);
        CHECK(degree <= 1.0);
      }
    }
    if (i >= 50) break;  // 50 documents is plenty; each checks many terms
  }
}

TEST_CASE("membership is Lipschitz-continuous for the continuous shapes") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double eps = 1e-7;

  for (int trial = 0; trial < 200; ++trial) {
    double p[3] = {unit(rng), unit(rng), unit(rng)};
    std::sort(p, p + 3);
    if (p[1] - p[0] < 1e-3 || p[2] - p[1] < 1e-3) continue;  // skip near-degenerate
    const MembershipFunction mf = Triangular{p[0], p[1], p[2]};
    const double lipschitz = std::max(1.0 / (p[1] - p[0]), 1.0 / (p[2] - p[1]));
    const double x = unit(rng);
    CHECK(std::abs(membership(mf, x + eps) - membership(mf, x)) <= lipschitz * eps * 1.000001);
  }

  for (int trial = 0; trial < 200; ++trial) {
    const double sigma = 0.05 + unit(rng);
    const MembershipFunction mf = Gaussian{unit(rng), sigma};
    const double lipschitz = 1.0 / (sigma * std::sqrt(std::exp(1.0)));  // max slope of the bell
    const double x = unit(rng);
    CHECK(std::abs(membership(mf, x + eps) - membership(mf, x)) <= lipschitz * eps * 1.000001);
  }
}

TEST_CASE("validate accepts the shipped fixtures") {
  for (const auto& fixture : testsupport::fixture_manifest()) {
    const FmlDocument doc = testsupport::load_fixture(fixture.file);
    CHECK(validate(doc).empty());
  }
}

TEST_CASE("validate reports broken invariants with the offending element") {
  FmlDocument doc = testsupport::load_fixture("speaking.fml");

  SUBCASE("triangular with b < a") {
    doc.knowledge_base[0].terms[0].mf = Triangular{0.5, 0.1, 0.9};
    const auto violations = validate(doc);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].element == "variable 'score' term 'low'");
    CHECK(violations[0].constraint.find("a <= b <= c") != std::string::npos);
  }
  SUBCASE("rule weight above one") {
    doc.rule_base.rules[0].weight = 1.5;
    const auto violations = validate(doc);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].element == "rule 'r1'");
    CHECK(violations[0].constraint.find("[0,1]") != std::string::npos);
  }
  SUBCASE("inverted domain") {
    doc.knowledge_base[0].domain_left = 2.0;
    CHECK(validate(doc).size() == 1);
  }
  SUBCASE("dangling term reference") {
    doc.rule_base.rules[0].antecedent[0].term = "hot";
    const auto violations = validate(doc);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].constraint.find("hot") != std::string::npos);
  }
  SUBCASE("duplicate variable name") {
    doc.knowledge_base.push_back(doc.knowledge_base[0]);
    CHECK(!validate(doc).empty());
  }
  SUBCASE("gaussian sigma zero") {
    doc.knowledge_base[0].terms[0].mf = Gaussian{0.5, 0.0};
    CHECK(validate(doc).size() == 1);
  }
  SUBCASE("consequent referencing an input variable") {
    doc.rule_base.rules[0].consequent[0] = {"score", "low", false};
    CHECK(!validate(doc).empty());
  }
}

TEST_CASE("parse_fml builds the minimal fixture structure") {
  const FmlDocument doc = testsupport::load_fixture("speaking.fml");
  CHECK(doc.name == "speaking");
  REQUIRE(doc.knowledge_base.size() == 2);
  CHECK(doc.knowledge_base[0].kind == VariableKind::Input);
  CHECK(doc.knowledge_base[0].terms.size() == 2);
  CHECK(doc.knowledge_base[1].kind == VariableKind::Output);
  CHECK(doc.knowledge_base[1].defuzzifier == Defuzzifier::Centroid);
  CHECK(doc.rule_base.rules.size() == 2);
  CHECK(doc.rule_base.and_method == AndMethod::Min);
}

TEST_CASE("parse_fml error classes") {
  const std::string canonical = testsupport::read_file(testsupport::fixture_path("speaking.fml"));

  SUBCASE("not XML at all") {
    try {
      parse_fml("this is not xml");
      FAIL("expected FmlError");
    } catch (const FmlError& error) {
      CHECK(error.kind == FmlError::Kind::MalformedXml);
    }
    try {
      parse_fml("<fuzzySystem name='x'><knowledgeBase>");
      FAIL("expected FmlError");
    } catch (const FmlError& error) {
      CHECK(error.kind == FmlError::Kind::MalformedXml);
    }
  }
  SUBCASE("mismatched end tag") {
    try {
      parse_fml("<fuzzySystem name=\"x\"></other>");
      FAIL("expected FmlError");
    } catch (const FmlError& error) {
      CHECK(error.kind == FmlError::Kind::MalformedXml);
    }
  }
  SUBCASE("unknown element is outside the subset") {
    std::string text = canonical;
    text.replace(text.find("<knowledgeBase>"), 15, "<knowledgeBase><modifier/>");
    try {
      parse_fml(text);
      FAIL("expected FmlError");
    } catch (const FmlError& error) {
      CHECK(error.kind == FmlError::Kind::SchemaViolation);
      CHECK(std::string(error.what()).find("modifier") != std::string::npos);
    }
  }
  SUBCASE("unknown attribute is outside the subset") {
    std::string text = canonical;
    text.replace(text.find("name=\"speaking\""), 15, "name=\"speaking\" scale=\"2\"");
    try {
      parse_fml(text);
      FAIL("expected FmlError");
    } catch (const FmlError& error) {
      CHECK(error.kind == FmlError::Kind::SchemaViolation);
    }
  }
  SUBCASE("dangling term reference is a semantic error") {
    std::string text = canonical;
    text.replace(text.find("<term>low</term>"), 16, "<term>hot</term>");
    try {
      parse_fml(text);
      FAIL("expected FmlError");
    } catch (const FmlError& error) {
      CHECK(error.kind == FmlError::Kind::SemanticError);
      CHECK(std::string(error.what()).find("hot") != std::string::npos);
    }
  }
  SUBCASE("missing required attribute") {
    std::string text = canonical;
    text.replace(text.find(" domainLeft=\"0\""), 15, "");
    try {
      parse_fml(text);
      FAIL("expected FmlError");
    } catch (const FmlError& error) {
      CHECK(error.kind == FmlError::Kind::SchemaViolation);
      CHECK(std::string(error.what()).find("domainLeft") != std::string::npos);
    }
  }
}

TEST_CASE("serialize_fml is deterministic and canonical") {
  const FmlDocument doc = testsupport::load_fixture("speaking.fml");
  const std::string once = serialize_fml(doc);
  const std::string twice = serialize_fml(doc);
  CHECK(once == twice);

  // the committed fixture is the canonical serialization, byte for byte
  CHECK(once == testsupport::read_file(testsupport::fixture_path("speaking.fml")));
}

TEST_CASE("parse and serialize are mutually inverse on random documents") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    const FmlDocument doc = testsupport::random_valid_document(rng);
    REQUIRE(validate(doc).empty());
    const std::string text = serialize_fml(doc);
    const FmlDocument reparsed = parse_fml(text);
    CHECK(reparsed == doc);
    CHECK(serialize_fml(reparsed) == text);  // round-trip fixed point
  }
}

TEST_CASE("validate(doc) empty iff parse(serialize(doc)) succeeds") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 50; ++i) {
    FmlDocument doc = testsupport::random_valid_document(rng);
    CHECK(validate(doc).empty());
    CHECK_NOTHROW(parse_fml(serialize_fml(doc)));

    // break one invariant; serialization still works, parsing must reject
    doc.rule_base.rules[0].weight = 1.0 + 0.5 * static_cast<double>(i % 3 + 1);
    CHECK(!validate(doc).empty());
    CHECK_THROWS_AS(parse_fml(serialize_fml(doc)), FmlError);
  }
}

TEST_CASE("names with reserved characters and non-ASCII text survive the round trip") {
  FmlDocument doc = testsupport::load_fixture("speaking.fml");
  doc.name = "café & <friends>";
  doc.knowledge_base[0].name = "scoré";
  for (auto& rule : doc.rule_base.rules)
    for (auto& clause : rule.antecedent)
      if (clause.variable == "score") clause.variable = "scoré";
  REQUIRE(validate(doc).empty());
  const std::string text = serialize_fml(doc);
  CHECK(text.find("café &amp; &lt;friends&gt;") != std::string::npos);
  CHECK(parse_fml(text) == doc);

  // numeric character references decode to the same UTF-8 bytes
  std::string entity_text = text;
  const auto at = entity_text.find("café");
  entity_text.replace(at, std::string("café").size(), "caf&#233;");
  CHECK(parse_fml(entity_text) == doc);
}

TEST_CASE("negated clauses and complements survive the round trip") {
  FmlDocument doc = testsupport::load_fixture("flood.fml");
  REQUIRE(doc.rule_base.rules[1].antecedent[1].negated);
  const FmlDocument reparsed = parse_fml(serialize_fml(doc));
  CHECK(reparsed == doc);

  doc.knowledge_base[0].terms[0].complement = true;
  CHECK(parse_fml(serialize_fml(doc)) == doc);
}
