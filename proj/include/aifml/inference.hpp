// inference.hpp : Mamdani inference over FML documents.
//
// Pipeline: fuzzify crisp inputs, fold rule antecedents into activations,
// clip or scale consequent terms, aggregate pointwise max over a uniform
// grid, defuzzify. Pure functions; identical arguments give bit-identical
// results.

#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aifml/fml.hpp"

namespace aifml {

inline constexpr int kDefaultResolution = 1001;

struct InferenceError : std::runtime_error {
  enum class Kind {
    MissingInput,      // an input variable has no supplied value
    EmptyActivation,   // every rule activation is zero
    ZeroMass,          // aggregated set carries no mass to defuzzify
    UnknownReference,  // a clause names a missing variable or term
  };
  Kind kind;
  InferenceError(Kind k, const std::string& message) : std::runtime_error(message), kind(k) {}
};

// Consequent memberships aggregated over a uniform grid spanning the
// variable's domain. point_masses collects (activation, value) pairs from
// singleton consequents for weighted-average defuzzification.
struct AggregatedFuzzySet {
  std::string variable;
  double domain_left = 0;
  double domain_right = 1;
  Eigen::ArrayXd degrees;
  std::vector<std::pair<double, double>> point_masses;
};

struct InferenceResult {
  std::map<std::string, double> outputs;           // output variable -> crisp value
  std::map<std::string, double> rule_activations;  // rule name -> degree in [0,1]
};

// Term membership sampled at each grid point.
Eigen::ArrayXd sample_term(const FuzzyTerm& term, const Eigen::ArrayXd& grid);

// Per-term degrees of the clamped input value. Negation is applied at rule
// evaluation, not here.
std::map<std::string, double> fuzzify(const FuzzyVariable& variable, double x);

using VariableDegrees = std::map<std::string, std::map<std::string, double>>;

// weight x connector-fold of clause degrees; a negated clause contributes
// 1 - degree.
double evaluate_rule(const Rule& rule, const VariableDegrees& degrees, AndMethod and_method,
                     OrMethod or_method);

// Clip (min) or scale (prod) the consequent terms of every activated rule
// targeting `variable` and fold them by pointwise max over `resolution` grid
// points.
AggregatedFuzzySet aggregate_output(const FmlDocument& doc, const FuzzyVariable& variable,
                                    const std::map<std::string, double>& activations,
                                    int resolution);

// centroid: sum(x*mu)/sum(mu); meanOfMaxima: mean of argmax grid points;
// weightedAverage: sum(a*v)/sum(a) over singleton point masses.
double defuzzify(const AggregatedFuzzySet& set, Defuzzifier method);

InferenceResult infer(const FmlDocument& doc, const std::map<std::string, double>& inputs,
                      int resolution = kDefaultResolution);

}  // namespace aifml
