#include "aifml/fml.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace aifml {

double membership(const MembershipFunction& mf, double x) {
  struct Eval {
    double x;
    double operator()(const Triangular& t) const {
      if (x < t.a || x > t.c) return 0.0;
      if (x == t.b) return 1.0;  // covers the degenerate a == b == c spike
      if (x < t.b) return (x - t.a) / (t.b - t.a);
      return (t.c - x) / (t.c - t.b);
    }
    double operator()(const Trapezoidal& t) const {
      if (x < t.a || x > t.d) return 0.0;
      if (x >= t.b && x <= t.c) return 1.0;
      if (x < t.b) return (x - t.a) / (t.b - t.a);
      return (t.d - x) / (t.d - t.c);
    }
    double operator()(const Gaussian& g) const {
      const double z = (x - g.mean) / g.sigma;
      return std::exp(-0.5 * z * z);
    }
    double operator()(const Singleton& s) const { return x == s.value ? 1.0 : 0.0; }
  };
  return std::visit(Eval{x}, mf);
}

double term_membership(const FuzzyTerm& term, double x) {
  const double m = membership(term.mf, x);
  return term.complement ? 1.0 - m : m;
}

const FuzzyTerm* FuzzyVariable::find_term(const std::string& term_name) const {
  for (const auto& t : terms)
    if (t.name == term_name) return &t;
  return nullptr;
}

const FuzzyVariable* FmlDocument::find_variable(const std::string& variable_name) const {
  for (const auto& v : knowledge_base)
    if (v.name == variable_name) return &v;
  return nullptr;
}

namespace {

std::string term_label(const FuzzyVariable& v, const FuzzyTerm& t) {
  return "variable '" + v.name + "' term '" + t.name + "'";
}

void check_shape(const FuzzyVariable& v, const FuzzyTerm& t, std::vector<Violation>& out) {
  struct Check {
    const FuzzyVariable& v;
    const FuzzyTerm& t;
    std::vector<Violation>& out;
    void operator()(const Triangular& s) const {
      if (!(s.a <= s.b && s.b <= s.c))
        out.push_back({term_label(v, t), "triangular parameters must satisfy a <= b <= c"});
    }
    void operator()(const Trapezoidal& s) const {
      if (!(s.a <= s.b && s.b <= s.c && s.c <= s.d))
        out.push_back({term_label(v, t), "trapezoidal parameters must satisfy a <= b <= c <= d"});
    }
    void operator()(const Gaussian& s) const {
      if (!(s.sigma > 0))
        out.push_back({term_label(v, t), "gaussian sigma must be positive"});
    }
    void operator()(const Singleton&) const {}
  };
  std::visit(Check{v, t, out}, t.mf);
}

void check_clauses(const FmlDocument& doc, const Rule& rule, const std::vector<Clause>& clauses,
                   VariableKind expected_kind, const char* side, std::vector<Violation>& out) {
  const std::string label = "rule '" + rule.name + "'";
  if (clauses.empty()) {
    out.push_back({label, std::string(side) + " must have at least one clause"});
    return;
  }
  for (const auto& clause : clauses) {
    const FuzzyVariable* var = doc.find_variable(clause.variable);
    if (var == nullptr) {
      out.push_back({label, std::string(side) + " references unknown variable '" + clause.variable + "'"});
      continue;
    }
    if (var->kind != expected_kind) {
      out.push_back({label, std::string(side) + " clause on '" + clause.variable + "' must reference " +
                                (expected_kind == VariableKind::Input ? "an input" : "an output") +
                                " variable"});
    }
    if (var->find_term(clause.term) == nullptr) {
      out.push_back({label, std::string(side) + " references unknown term '" + clause.term +
                                "' on variable '" + clause.variable + "'"});
    }
  }
}

}  // namespace

std::vector<Violation> validate(const FmlDocument& doc) {
  std::vector<Violation> out;

  std::set<std::string> variable_names;
  std::size_t inputs = 0, outputs = 0;
  for (const auto& v : doc.knowledge_base) {
    const std::string label = "variable '" + v.name + "'";
    if (!variable_names.insert(v.name).second)
      out.push_back({label, "variable name must be unique in the knowledge base"});
    if (!(v.domain_left < v.domain_right))
      out.push_back({label, "domain bounds must satisfy domainLeft < domainRight"});
    if (v.terms.empty())
      out.push_back({label, "variable must declare at least one term"});
    (v.kind == VariableKind::Input ? inputs : outputs)++;

    std::set<std::string> term_names;
    for (const auto& t : v.terms) {
      if (!term_names.insert(t.name).second)
        out.push_back({term_label(v, t), "term name must be unique within its variable"});
      check_shape(v, t, out);
    }
  }
  if (inputs == 0) out.push_back({"knowledge base", "at least one input variable required"});
  if (outputs == 0) out.push_back({"knowledge base", "at least one output variable required"});

  if (doc.rule_base.rules.empty())
    out.push_back({"rule base", "at least one rule required"});
  std::set<std::string> rule_names;
  for (const auto& rule : doc.rule_base.rules) {
    const std::string label = "rule '" + rule.name + "'";
    if (!rule_names.insert(rule.name).second)
      out.push_back({label, "rule name must be unique in the rule base"});
    if (!(rule.weight >= 0.0 && rule.weight <= 1.0))
      out.push_back({label, "rule weight must lie in [0,1]"});
    check_clauses(doc, rule, rule.antecedent, VariableKind::Input, "antecedent", out);
    check_clauses(doc, rule, rule.consequent, VariableKind::Output, "consequent", out);
    for (const auto& clause : rule.consequent)
      if (clause.negated)
        out.push_back({label, "consequent clauses cannot be negated"});
  }
  return out;
}

}  // namespace aifml
