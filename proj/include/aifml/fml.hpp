// fml.hpp : document model for the Mamdani subset of IEEE 1855 FML.
//
// A document is a knowledge base (fuzzy variables with named terms) plus a
// weighted Mamdani rule base. Values are immutable after construction and
// safe to share across threads.

#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace aifml {

// --- membership function shapes ---------------------------------------------

struct Triangular {
  double a = 0, b = 0, c = 0;  // a <= b <= c; a == b == c degenerates to a spike at b
  bool operator==(const Triangular&) const = default;
};

struct Trapezoidal {
  double a = 0, b = 0, c = 0, d = 0;  // a <= b <= c <= d
  bool operator==(const Trapezoidal&) const = default;
};

struct Gaussian {
  double mean = 0, sigma = 1;  // sigma > 0
  bool operator==(const Gaussian&) const = default;
};

struct Singleton {
  double value = 0;
  bool operator==(const Singleton&) const = default;
};

using MembershipFunction = std::variant<Triangular, Trapezoidal, Gaussian, Singleton>;

// Degree of x under the shape, always in [0,1]. x may lie outside the support.
double membership(const MembershipFunction& mf, double x);

struct FuzzyTerm {
  std::string name;
  bool complement = false;  // degree is 1 - shape(x) when set
  MembershipFunction mf;
  bool operator==(const FuzzyTerm&) const = default;
};

// Degree of x under the term, complement applied.
double term_membership(const FuzzyTerm& term, double x);

// --- variables ---------------------------------------------------------------

enum class VariableKind { Input, Output };
enum class Defuzzifier { Centroid, MeanOfMaxima, WeightedAverage };

struct FuzzyVariable {
  std::string name;
  double domain_left = 0;
  double domain_right = 1;
  VariableKind kind = VariableKind::Input;
  std::vector<FuzzyTerm> terms;
  Defuzzifier defuzzifier = Defuzzifier::Centroid;  // meaningful for outputs only

  const FuzzyTerm* find_term(const std::string& term_name) const;
  bool operator==(const FuzzyVariable&) const = default;
};

// --- rules -------------------------------------------------------------------

struct Clause {
  std::string variable;
  std::string term;
  bool negated = false;  // antecedent side only
  bool operator==(const Clause&) const = default;
};

enum class Connector { And, Or };
enum class AndMethod { Min, Prod };
enum class OrMethod { Max };
enum class ActivationMethod { Min, Prod };

struct Rule {
  std::string name;
  std::vector<Clause> antecedent;
  Connector connector = Connector::And;
  std::vector<Clause> consequent;
  double weight = 1.0;  // in [0,1]
  bool operator==(const Rule&) const = default;
};

struct RuleBase {
  AndMethod and_method = AndMethod::Min;
  OrMethod or_method = OrMethod::Max;
  ActivationMethod activation = ActivationMethod::Min;
  std::vector<Rule> rules;
  bool operator==(const RuleBase&) const = default;
};

// --- document ----------------------------------------------------------------

struct FmlDocument {
  std::string name;
  std::vector<FuzzyVariable> knowledge_base;
  RuleBase rule_base;

  const FuzzyVariable* find_variable(const std::string& variable_name) const;
  bool operator==(const FmlDocument&) const = default;
};

// One broken invariant: which element and which constraint.
struct Violation {
  std::string element;     // e.g. "variable 'score' term 'low'"
  std::string constraint;  // e.g. "triangular parameters must be ascending"
};

// Empty list iff every type invariant holds. Violations are data, not errors.
std::vector<Violation> validate(const FmlDocument& doc);

}  // namespace aifml
