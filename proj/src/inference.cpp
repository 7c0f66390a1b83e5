#include "aifml/inference.hpp"

#include <algorithm>
#include <cmath>

namespace aifml {

namespace {

double clamp_to_domain(const FuzzyVariable& variable, double x) {
  return std::clamp(x, variable.domain_left, variable.domain_right);
}

[[noreturn]] void unknown_reference(const std::string& message) {
  throw InferenceError(InferenceError::Kind::UnknownReference, message);
}

double clause_degree(const Clause& clause, const VariableDegrees& degrees) {
  const auto var_it = degrees.find(clause.variable);
  if (var_it == degrees.end())
    unknown_reference("clause references unknown variable '" + clause.variable + "'");
  const auto term_it = var_it->second.find(clause.term);
  if (term_it == var_it->second.end())
    unknown_reference("clause references unknown term '" + clause.term + "' on variable '" +
                      clause.variable + "'");
  const double degree = term_it->second;
  return clause.negated ? 1.0 - degree : degree;
}

}  // namespace

Eigen::ArrayXd sample_term(const FuzzyTerm& term, const Eigen::ArrayXd& grid) {
  return grid.unaryExpr([&term](double x) { return term_membership(term, x); });
}

std::map<std::string, double> fuzzify(const FuzzyVariable& variable, double x) {
  const double clamped = clamp_to_domain(variable, x);
  std::map<std::string, double> degrees;
  for (const auto& term : variable.terms) degrees[term.name] = term_membership(term, clamped);
  return degrees;
}

double evaluate_rule(const Rule& rule, const VariableDegrees& degrees, AndMethod and_method,
                     OrMethod /*or_method*/) {
  double folded = 0.0;
  bool first = true;
  for (const auto& clause : rule.antecedent) {
    const double degree = clause_degree(clause, degrees);
    if (first) {
      folded = degree;
      first = false;
    } else if (rule.connector == Connector::And) {
      folded = and_method == AndMethod::Min ? std::min(folded, degree) : folded * degree;
    } else {
      folded = std::max(folded, degree);  // or-method is max
    }
  }
  return rule.weight * folded;
}

AggregatedFuzzySet aggregate_output(const FmlDocument& doc, const FuzzyVariable& variable,
                                    const std::map<std::string, double>& activations,
                                    int resolution) {
  if (resolution < 3) throw std::invalid_argument("resolution must be at least 3");

  AggregatedFuzzySet set;
  set.variable = variable.name;
  set.domain_left = variable.domain_left;
  set.domain_right = variable.domain_right;
  set.degrees = Eigen::ArrayXd::Zero(resolution);

  const Eigen::ArrayXd grid =
      Eigen::ArrayXd::LinSpaced(resolution, variable.domain_left, variable.domain_right);

  for (const auto& rule : doc.rule_base.rules) {
    const auto activation_it = activations.find(rule.name);
    if (activation_it == activations.end()) continue;
    const double activation = activation_it->second;
    if (activation <= 0.0) continue;

    for (const auto& clause : rule.consequent) {
      if (clause.variable != variable.name) continue;
      const FuzzyTerm* term = variable.find_term(clause.term);
      if (term == nullptr)
        unknown_reference("consequent references unknown term '" + clause.term +
                          "' on variable '" + variable.name + "'");
      if (const auto* singleton = std::get_if<Singleton>(&term->mf);
          singleton != nullptr && !term->complement) {
        set.point_masses.emplace_back(activation, singleton->value);
      }
      Eigen::ArrayXd clipped = sample_term(*term, grid);
      if (doc.rule_base.activation == ActivationMethod::Min)
        clipped = clipped.min(activation);
      else
        clipped *= activation;
      set.degrees = set.degrees.max(clipped);
    }
  }
  return set;
}

double defuzzify(const AggregatedFuzzySet& set, Defuzzifier method) {
  const int n = static_cast<int>(set.degrees.size());
  if (n < 2) throw std::invalid_argument("aggregated set must hold at least two samples");

  if (method == Defuzzifier::WeightedAverage) {
    double weighted = 0.0, total = 0.0;
    for (const auto& [activation, value] : set.point_masses) {
      weighted += activation * value;
      total += activation;
    }
    if (total <= 0.0)
      throw InferenceError(InferenceError::Kind::ZeroMass,
                           "variable '" + set.variable +
                               "': no activated singleton consequents to average");
    return weighted / total;
  }

  const Eigen::ArrayXd grid =
      Eigen::ArrayXd::LinSpaced(n, set.domain_left, set.domain_right);

  if (method == Defuzzifier::Centroid) {
    const double mass = set.degrees.sum();
    if (mass <= 0.0)
      throw InferenceError(InferenceError::Kind::ZeroMass,
                           "variable '" + set.variable + "': aggregated set has zero mass");
    return (grid * set.degrees).sum() / mass;
  }

  // mean of maxima: average every grid point attaining the maximum degree
  const double peak = set.degrees.maxCoeff();
  if (peak <= 0.0)
    throw InferenceError(InferenceError::Kind::ZeroMass,
                         "variable '" + set.variable + "': aggregated set has zero mass");
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < n; ++i) {
    if (set.degrees[i] == peak) {
      sum += grid[i];
      ++count;
    }
  }
  return sum / count;
}

InferenceResult infer(const FmlDocument& doc, const std::map<std::string, double>& inputs,
                      int resolution) {
  if (resolution < 3) throw std::invalid_argument("resolution must be at least 3");

  VariableDegrees degrees;
  for (const auto& variable : doc.knowledge_base) {
    if (variable.kind != VariableKind::Input) continue;
    const auto it = inputs.find(variable.name);
    if (it == inputs.end())
      throw InferenceError(InferenceError::Kind::MissingInput,
                           "no value supplied for input variable '" + variable.name + "'");
    degrees[variable.name] = fuzzify(variable, it->second);
  }

  InferenceResult result;
  double total_activation = 0.0;
  for (const auto& rule : doc.rule_base.rules) {
    const double activation =
        evaluate_rule(rule, degrees, doc.rule_base.and_method, doc.rule_base.or_method);
    result.rule_activations[rule.name] = activation;
    total_activation += activation;
  }
  if (total_activation <= 0.0)
    throw InferenceError(InferenceError::Kind::EmptyActivation,
                         "every rule activation is zero; refusing to fabricate an output");

  for (const auto& variable : doc.knowledge_base) {
    if (variable.kind != VariableKind::Output) continue;
    const AggregatedFuzzySet set =
        aggregate_output(doc, variable, result.rule_activations, resolution);
    result.outputs[variable.name] = defuzzify(set, variable.defuzzifier);
  }
  return result;
}

}  // namespace aifml
