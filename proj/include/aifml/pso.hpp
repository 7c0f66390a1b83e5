// pso.hpp : global-best particle swarm optimization over a bounded parameter
// box, plus the encoding that maps knowledge-base membership functions onto
// the search space and the MSE-driven tuning loop.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aifml/fml.hpp"

namespace aifml {

struct PsoError : std::runtime_error {
  enum class Kind { FitnessNotFinite, UnknownReference, BadData };
  Kind kind;
  PsoError(Kind k, const std::string& message) : std::runtime_error(message), kind(k) {}
};

// Bounded box with an idempotent structural repair applied before clamping.
struct ParameterSpec {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::function<void(Eigen::VectorXd&)> repair;  // may be empty

  int dims() const { return static_cast<int>(lower.size()); }
};

struct PsoOptions {
  int swarm_size = 30;
  int iterations = 200;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  double velocity_clamp = 0.5;  // fraction of (upper - lower)
  std::uint64_t seed = 0;
  // Optional known-good starting point, placed as particle 0.
  std::optional<Eigen::VectorXd> seed_position;
};

struct PsoResult {
  Eigen::VectorXd best_position;
  double best_fitness = 0;
  std::vector<double> history;  // global best after each iteration, non-increasing
};

using FitnessFn = std::function<double(const Eigen::VectorXd&)>;

PsoResult optimize(const ParameterSpec& spec, const FitnessFn& fitness, const PsoOptions& options);

// --- knowledge-base encoding ---------------------------------------------------

struct TermSelector {
  std::string variable;
  std::string term;
};

// Every term of every variable, in declaration order.
std::vector<TermSelector> all_terms(const FmlDocument& doc);

// Concatenates shape parameters of the selected terms in canonical order.
// Bounds equal the owning variable's domain; repair sorts each ordered shape
// group ascending and keeps gaussian sigma positive.
std::pair<Eigen::VectorXd, ParameterSpec> encode_kb(const FmlDocument& doc,
                                                    const std::vector<TermSelector>& tunable);

FmlDocument decode_kb(const FmlDocument& base, const std::vector<TermSelector>& tunable,
                      const Eigen::VectorXd& values);

// --- tuning against labeled data ----------------------------------------------

// One labeled observation: crisp inputs and the desired output of the single
// output variable.
struct TuningSample {
  std::map<std::string, double> inputs;
  double target = 0;
};

// CSV with a header naming the input variables followed by the output
// variable, one sample per row.
std::vector<TuningSample> parse_tuning_csv(std::string_view text, const FmlDocument& doc);

struct TuneResult {
  FmlDocument tuned;
  double initial_mse = 0;
  double final_mse = 0;
  std::vector<double> history;
};

// Minimizes mean squared error of the decoded document over the dataset.
// Samples whose inference fails are scored with a huge penalty instead of
// aborting the run. The base document's own encoding seeds the swarm, so the
// final MSE never exceeds the initial one.
TuneResult tune_kb(const FmlDocument& doc, const std::vector<TuningSample>& dataset,
                   const PsoOptions& options, int resolution = 201);

}  // namespace aifml
