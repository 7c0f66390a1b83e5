#include "support/fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "aifml/fml_xml.hpp"

namespace testsupport {

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot read fixture '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

const std::vector<FixtureCase>& fixture_manifest() {
  static const std::vector<FixtureCase> manifest = {
      {"speaking.fml", {{"score", 0.75}}},
      {"speaking_shifted.fml", {{"score", 0.97725}}},
      {"speaking_prod.fml", {{"score", 0.7}, {"confidence", 0.55}}},
      {"flood.fml", {{"rain", 30.0}, {"river", 3.5}}},
      {"travel_gauss.fml", {{"weather", 1.0}}},
      {"preference_mom.fml", {{"hunger", 1.0}}},
      {"confidence_wa.fml", {{"accuracy", 0.75}}},
      {"score_map.fml", {{"confidence", 0.55}}},
  };
  return manifest;
}

aifml::FmlDocument load_fixture(const std::string& name) {
  return aifml::parse_fml(read_file(fixture_path(name)));
}

namespace {

using namespace aifml;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int pick(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

MembershipFunction random_shape(std::mt19937_64& rng, double lo, double hi) {
  const double width = hi - lo;
  switch (pick(rng, 0, 3)) {
    case 0: {
      double p[3] = {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
      std::sort(p, p + 3);
      return Triangular{p[0], p[1], p[2]};
    }
    case 1: {
      double p[4] = {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi),
                     uniform(rng, lo, hi)};
      std::sort(p, p + 4);
      return Trapezoidal{p[0], p[1], p[2], p[3]};
    }
    case 2:
      return Gaussian{uniform(rng, lo, hi), uniform(rng, 0.01 * width, 0.5 * width)};
    default:
      return Singleton{uniform(rng, lo, hi)};
  }
}

FuzzyVariable random_variable(std::mt19937_64& rng, const std::string& name, VariableKind kind) {
  FuzzyVariable variable;
  variable.name = name;
  variable.kind = kind;
  variable.domain_left = uniform(rng, -10.0, 10.0);
  variable.domain_right = variable.domain_left + uniform(rng, 0.1, 20.0);
  if (kind == VariableKind::Output) {
    const int d = pick(rng, 0, 2);
    variable.defuzzifier = d == 0   ? Defuzzifier::Centroid
                           : d == 1 ? Defuzzifier::MeanOfMaxima
                                    : Defuzzifier::WeightedAverage;
  }
  const int term_count = pick(rng, 1, 4);
  for (int t = 0; t < term_count; ++t) {
    FuzzyTerm term;
    term.name = "t" + std::to_string(t);
    term.complement = pick(rng, 0, 4) == 0;
    term.mf = random_shape(rng, variable.domain_left, variable.domain_right);
    variable.terms.push_back(std::move(term));
  }
  return variable;
}

}  // namespace

aifml::FmlDocument random_valid_document(std::mt19937_64& rng) {
  FmlDocument doc;
  doc.name = "doc" + std::to_string(pick(rng, 0, 999999));

  const int input_count = pick(rng, 1, 3);
  const int output_count = pick(rng, 1, 2);
  for (int i = 0; i < input_count; ++i)
    doc.knowledge_base.push_back(
        random_variable(rng, "in" + std::to_string(i), VariableKind::Input));
  for (int i = 0; i < output_count; ++i)
    doc.knowledge_base.push_back(
        random_variable(rng, "out" + std::to_string(i), VariableKind::Output));

  doc.rule_base.and_method = pick(rng, 0, 1) == 0 ? AndMethod::Min : AndMethod::Prod;
  doc.rule_base.activation = pick(rng, 0, 1) == 0 ? ActivationMethod::Min : ActivationMethod::Prod;

  const auto random_clause = [&](int variable_index, bool antecedent_side) {
    const FuzzyVariable& variable = doc.knowledge_base[static_cast<std::size_t>(variable_index)];
    Clause clause;
    clause.variable = variable.name;
    clause.term =
        variable.terms[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(variable.terms.size()) - 1))]
            .name;
    clause.negated = antecedent_side && pick(rng, 0, 3) == 0;
    return clause;
  };

  const int rule_count = pick(rng, 1, 5);
  for (int r = 0; r < rule_count; ++r) {
    Rule rule;
    rule.name = "r" + std::to_string(r);
    rule.connector = pick(rng, 0, 1) == 0 ? Connector::And : Connector::Or;
    rule.weight = uniform(rng, 0.0, 1.0);
    const int ante_count = pick(rng, 1, input_count);
    for (int i = 0; i < ante_count; ++i) rule.antecedent.push_back(random_clause(i, true));
    const int cons_count = pick(rng, 1, output_count);
    for (int i = 0; i < cons_count; ++i)
      rule.consequent.push_back(random_clause(input_count + i, false));
    doc.rule_base.rules.push_back(std::move(rule));
  }
  return doc;
}

std::vector<aifml::SessionLogRow> winter_camp_log() {
  struct TeamPlan {
    const char* team;
    int correct;
    double correct_score;
    int partial;
    double partial_score;
  };
  // Totals reproduce the published per-team averages at three decimals.
  const TeamPlan plans[] = {
      {"T1", 4, 0.7, 4, 0.324},     // avg 0.512
      {"T2", 4, 0.7, 3, 0.364},     // avg 0.556
      {"T3", 5, 0.8, 4, 0.33875},   // avg 0.595
      {"T4", 6, 0.85, 3, 0.223},    // avg 0.641
      {"T5", 1, 0.6, 6, 0.2465},    // avg 0.297
      {"T6", 5, 0.8, 5, 0.226},     // avg 0.513
  };

  std::vector<SessionLogRow> rows;
  std::int64_t timestamp = 0;
  for (const TeamPlan& plan : plans) {
    RAASession session;
    session.student_id = std::string(plan.team) + "s1";
    int sentence = 0;
    const auto feed = [&](double score) {
      Utterance utterance{session.student_id, "sentence" + std::to_string(++sentence), score,
                          timestamp += 1000};
      const RAAOutcome outcome = evaluate(session, utterance);
      SessionLogRow row;
      row.student_id = session.student_id;
      row.team_id = plan.team;
      row.sentence_id = utterance.sentence_id;
      row.fuzzy_score = score;
      row.recognition = outcome.recognition;
      row.message = outcome.message;
      row.pairc_after = outcome.pairc_after;
      row.timestamp_ms = utterance.timestamp_ms;
      rows.push_back(std::move(row));
    };
    for (int i = 0; i < plan.correct; ++i) feed(plan.correct_score);
    for (int i = 0; i < plan.partial; ++i) feed(plan.partial_score);
  }
  return rows;
}

}  // namespace testsupport
