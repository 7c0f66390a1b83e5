#include "aifml/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "aifml/detail/csv.hpp"
#include "aifml/inference.hpp"

namespace aifml {

namespace {

// Penalty for particles whose decoded document cannot be evaluated. Large but
// finite so the optimizer's non-finite guard still catches real defects.
constexpr double kInfeasiblePenalty = 1e30;

double checked_fitness(const FitnessFn& fitness, const Eigen::VectorXd& position) {
  const double value = fitness(position);
  if (!std::isfinite(value)) {
    std::ostringstream message;
    message << "fitness is not finite at position [";
    for (int i = 0; i < position.size(); ++i) message << (i ? ", " : "") << position[i];
    message << "]";
    throw PsoError(PsoError::Kind::FitnessNotFinite, message.str());
  }
  return value;
}

}  // namespace

PsoResult optimize(const ParameterSpec& spec, const FitnessFn& fitness,
                   const PsoOptions& options) {
  const int dims = spec.dims();
  if (dims < 1) throw std::invalid_argument("parameter spec must have at least one dimension");
  if (spec.upper.size() != dims) throw std::invalid_argument("bound sizes differ");
  for (int d = 0; d < dims; ++d)
    if (!(spec.lower[d] < spec.upper[d]))
      throw std::invalid_argument("lower bound must be below upper bound in every dimension");
  if (options.swarm_size < 2) throw std::invalid_argument("swarm size must be at least 2");
  if (options.iterations < 1) throw std::invalid_argument("iterations must be at least 1");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Eigen::VectorXd span = spec.upper - spec.lower;
  const Eigen::VectorXd velocity_max = options.velocity_clamp * span;

  const auto constrain = [&](Eigen::VectorXd& x) {
    if (spec.repair) spec.repair(x);
    x = x.cwiseMax(spec.lower).cwiseMin(spec.upper);
  };

  std::vector<Eigen::VectorXd> positions(options.swarm_size);
  std::vector<Eigen::VectorXd> velocities(options.swarm_size);
  std::vector<Eigen::VectorXd> best_positions(options.swarm_size);
  std::vector<double> best_fitness(options.swarm_size);

  Eigen::VectorXd global_best;
  double global_best_fitness = std::numeric_limits<double>::infinity();

  for (int p = 0; p < options.swarm_size; ++p) {
    Eigen::VectorXd x(dims);
    Eigen::VectorXd v(dims);
    for (int d = 0; d < dims; ++d) {
      x[d] = spec.lower[d] + unit(rng) * span[d];
      v[d] = (2.0 * unit(rng) - 1.0) * velocity_max[d];
    }
    if (p == 0 && options.seed_position.has_value()) {
      if (options.seed_position->size() != dims)
        throw std::invalid_argument("seed position has the wrong dimension");
      x = *options.seed_position;
    }
    constrain(x);
    positions[p] = x;
    velocities[p] = v;
    best_positions[p] = x;
    best_fitness[p] = checked_fitness(fitness, x);
    if (best_fitness[p] < global_best_fitness) {
      global_best_fitness = best_fitness[p];
      global_best = x;
    }
  }

  PsoResult result;
  result.history.reserve(options.iterations);

  // Synchronous update: velocities in one iteration all read the global best
  // frozen at its start, and the global best advances only at the iteration
  // boundary. Fitness evaluations are therefore order-independent and could
  // run in parallel.
  for (int iteration = 0; iteration < options.iterations; ++iteration) {
    const Eigen::VectorXd frozen_best = global_best;
    for (int p = 0; p < options.swarm_size; ++p) {
      Eigen::VectorXd& x = positions[p];
      Eigen::VectorXd& v = velocities[p];
      for (int d = 0; d < dims; ++d) {
        const double r1 = unit(rng);
        const double r2 = unit(rng);
        v[d] = options.inertia * v[d] + options.cognitive * r1 * (best_positions[p][d] - x[d]) +
               options.social * r2 * (frozen_best[d] - x[d]);
        v[d] = std::clamp(v[d], -velocity_max[d], velocity_max[d]);
      }
      x += v;
      constrain(x);
      const double value = checked_fitness(fitness, x);
      if (value < best_fitness[p]) {
        best_fitness[p] = value;
        best_positions[p] = x;
      }
    }
    for (int p = 0; p < options.swarm_size; ++p) {
      if (best_fitness[p] < global_best_fitness) {
        global_best_fitness = best_fitness[p];
        global_best = best_positions[p];
      }
    }
    result.history.push_back(global_best_fitness);
  }

  result.best_position = global_best;
  result.best_fitness = global_best_fitness;
  return result;
}

// --- knowledge-base encoding ---------------------------------------------------

namespace {

struct TermSlot {
  int variable_index = 0;
  int term_index = 0;
  int offset = 0;  // first dimension of this term's parameter group
  int count = 0;
  bool sorted_group = false;  // triangular and trapezoidal params stay ascending
  int sigma_dim = -1;         // gaussian sigma dimension, kept positive
};

int shape_param_count(const MembershipFunction& mf) {
  struct Count {
    int operator()(const Triangular&) const { return 3; }
    int operator()(const Trapezoidal&) const { return 4; }
    int operator()(const Gaussian&) const { return 2; }
    int operator()(const Singleton&) const { return 1; }
  };
  return std::visit(Count{}, mf);
}

std::vector<TermSlot> layout_slots(const FmlDocument& doc,
                                   const std::vector<TermSelector>& tunable) {
  std::vector<TermSlot> slots;
  int offset = 0;
  for (const auto& selector : tunable) {
    TermSlot slot;
    slot.variable_index = -1;
    for (std::size_t v = 0; v < doc.knowledge_base.size(); ++v) {
      if (doc.knowledge_base[v].name != selector.variable) continue;
      slot.variable_index = static_cast<int>(v);
      const auto& terms = doc.knowledge_base[v].terms;
      slot.term_index = -1;
      for (std::size_t t = 0; t < terms.size(); ++t)
        if (terms[t].name == selector.term) slot.term_index = static_cast<int>(t);
      break;
    }
    if (slot.variable_index < 0)
      throw PsoError(PsoError::Kind::UnknownReference,
                     "tunable selection names unknown variable '" + selector.variable + "'");
    if (slot.term_index < 0)
      throw PsoError(PsoError::Kind::UnknownReference,
                     "tunable selection names unknown term '" + selector.term + "' on variable '" +
                         selector.variable + "'");

    const auto& mf = doc.knowledge_base[slot.variable_index].terms[slot.term_index].mf;
    slot.offset = offset;
    slot.count = shape_param_count(mf);
    slot.sorted_group = std::holds_alternative<Triangular>(mf) ||
                        std::holds_alternative<Trapezoidal>(mf);
    if (std::holds_alternative<Gaussian>(mf)) slot.sigma_dim = offset + 1;
    offset += slot.count;
    slots.push_back(slot);
  }
  return slots;
}

void write_params(const MembershipFunction& mf, Eigen::VectorXd& vector, int offset) {
  struct Write {
    Eigen::VectorXd& vector;
    int offset;
    void operator()(const Triangular& s) const {
      vector[offset] = s.a;
      vector[offset + 1] = s.b;
      vector[offset + 2] = s.c;
    }
    void operator()(const Trapezoidal& s) const {
      vector[offset] = s.a;
      vector[offset + 1] = s.b;
      vector[offset + 2] = s.c;
      vector[offset + 3] = s.d;
    }
    void operator()(const Gaussian& s) const {
      vector[offset] = s.mean;
      vector[offset + 1] = s.sigma;
    }
    void operator()(const Singleton& s) const { vector[offset] = s.value; }
  };
  std::visit(Write{vector, offset}, mf);
}

MembershipFunction read_params(const MembershipFunction& base, const Eigen::VectorXd& vector,
                               int offset) {
  struct Read {
    const Eigen::VectorXd& vector;
    int offset;
    MembershipFunction operator()(const Triangular&) const {
      return Triangular{vector[offset], vector[offset + 1], vector[offset + 2]};
    }
    MembershipFunction operator()(const Trapezoidal&) const {
      return Trapezoidal{vector[offset], vector[offset + 1], vector[offset + 2],
                         vector[offset + 3]};
    }
    MembershipFunction operator()(const Gaussian&) const {
      return Gaussian{vector[offset], vector[offset + 1]};
    }
    MembershipFunction operator()(const Singleton&) const { return Singleton{vector[offset]}; }
  };
  return std::visit(Read{vector, offset}, base);
}

}  // namespace

std::vector<TermSelector> all_terms(const FmlDocument& doc) {
  std::vector<TermSelector> selectors;
  for (const auto& variable : doc.knowledge_base)
    for (const auto& term : variable.terms) selectors.push_back({variable.name, term.name});
  return selectors;
}

std::pair<Eigen::VectorXd, ParameterSpec> encode_kb(const FmlDocument& doc,
                                                    const std::vector<TermSelector>& tunable) {
  const std::vector<TermSlot> slots = layout_slots(doc, tunable);
  int dims = 0;
  for (const auto& slot : slots) dims += slot.count;

  Eigen::VectorXd values(dims);
  ParameterSpec spec;
  spec.lower.resize(dims);
  spec.upper.resize(dims);

  std::vector<std::pair<int, int>> sorted_groups;  // (offset, count)
  std::vector<std::pair<int, double>> sigma_dims;  // (dim, epsilon)

  for (const auto& slot : slots) {
    const FuzzyVariable& variable = doc.knowledge_base[slot.variable_index];
    const FuzzyTerm& term = variable.terms[slot.term_index];
    write_params(term.mf, values, slot.offset);
    for (int d = slot.offset; d < slot.offset + slot.count; ++d) {
      // Bounds are the owning variable's domain, widened just enough to keep
      // the document's own parameters feasible as the seed particle.
      spec.lower[d] = std::min(variable.domain_left, values[d]);
      spec.upper[d] = std::max(variable.domain_right, values[d]);
    }
    const double width = variable.domain_right - variable.domain_left;
    if (slot.sorted_group) sorted_groups.emplace_back(slot.offset, slot.count);
    if (slot.sigma_dim >= 0) {
      const double epsilon = std::min(1e-6 * width, values[slot.sigma_dim]);
      sigma_dims.emplace_back(slot.sigma_dim, epsilon);
      spec.lower[slot.sigma_dim] = epsilon;
      spec.upper[slot.sigma_dim] = std::max(width, values[slot.sigma_dim]);
    }
  }

  spec.repair = [sorted_groups, sigma_dims](Eigen::VectorXd& x) {
    for (const auto& [offset, count] : sorted_groups)
      std::sort(x.data() + offset, x.data() + offset + count);
    for (const auto& [dim, epsilon] : sigma_dims) x[dim] = std::max(x[dim], epsilon);
  };
  return {std::move(values), std::move(spec)};
}

FmlDocument decode_kb(const FmlDocument& base, const std::vector<TermSelector>& tunable,
                      const Eigen::VectorXd& values) {
  const std::vector<TermSlot> slots = layout_slots(base, tunable);
  int dims = 0;
  for (const auto& slot : slots) dims += slot.count;
  if (values.size() != dims) throw std::invalid_argument("encoded vector has the wrong dimension");

  FmlDocument doc = base;
  for (const auto& slot : slots) {
    FuzzyTerm& term = doc.knowledge_base[slot.variable_index].terms[slot.term_index];
    term.mf = read_params(term.mf, values, slot.offset);
  }
  return doc;
}

// --- tuning ---------------------------------------------------------------------

namespace {

const FuzzyVariable& single_output(const FmlDocument& doc) {
  const FuzzyVariable* output = nullptr;
  for (const auto& variable : doc.knowledge_base) {
    if (variable.kind != VariableKind::Output) continue;
    if (output != nullptr)
      throw PsoError(PsoError::Kind::BadData, "tuning expects exactly one output variable");
    output = &variable;
  }
  if (output == nullptr)
    throw PsoError(PsoError::Kind::BadData, "document has no output variable");
  return *output;
}

double dataset_mse(const FmlDocument& doc, const std::vector<TuningSample>& dataset,
                   const std::string& output_name, int resolution) {
  double sum = 0;
  for (const auto& sample : dataset) {
    double prediction = 0;
    try {
      prediction = infer(doc, sample.inputs, resolution).outputs.at(output_name);
    } catch (const InferenceError&) {
      return kInfeasiblePenalty;
    }
    const double error = prediction - sample.target;
    sum += error * error;
  }
  return sum / static_cast<double>(dataset.size());
}

}  // namespace

std::vector<TuningSample> parse_tuning_csv(std::string_view text, const FmlDocument& doc) {
  const auto bad_data = [](const std::string& message) -> PsoError {
    return PsoError(PsoError::Kind::BadData, message);
  };
  const std::vector<std::vector<std::string>> records = detail::parse_csv(text);
  if (records.size() < 2) throw bad_data("tuning dataset needs a header and rows");

  const std::vector<std::string>& header = records.front();
  const FuzzyVariable& output = single_output(doc);
  std::vector<std::string> input_names;
  for (std::size_t c = 0; c + 1 < header.size(); ++c) {
    const FuzzyVariable* variable = doc.find_variable(header[c]);
    if (variable == nullptr || variable->kind != VariableKind::Input)
      throw bad_data("tuning column '" + header[c] + "' does not name an input variable");
    input_names.push_back(header[c]);
  }
  if (header.back() != output.name)
    throw bad_data("last tuning column must be the output variable '" + output.name + "'");

  std::vector<TuningSample> dataset;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& fields = records[r];
    if (fields.size() != header.size())
      throw bad_data("tuning row " + std::to_string(r) + " has the wrong arity");
    TuningSample sample;
    for (std::size_t c = 0; c < input_names.size(); ++c) {
      double value = 0;
      const auto [ptr, ec] =
          std::from_chars(fields[c].data(), fields[c].data() + fields[c].size(), value);
      if (ec != std::errc() || ptr != fields[c].data() + fields[c].size())
        throw bad_data("bad number '" + fields[c] + "' in tuning row " + std::to_string(r));
      sample.inputs[input_names[c]] = value;
    }
    double target = 0;
    const std::string& last = fields.back();
    const auto [ptr, ec] = std::from_chars(last.data(), last.data() + last.size(), target);
    if (ec != std::errc() || ptr != last.data() + last.size())
      throw bad_data("bad target '" + last + "' in tuning row " + std::to_string(r));
    sample.target = target;
    dataset.push_back(std::move(sample));
  }
  return dataset;
}

TuneResult tune_kb(const FmlDocument& doc, const std::vector<TuningSample>& dataset,
                   const PsoOptions& options, int resolution) {
  if (dataset.empty()) throw std::invalid_argument("tuning dataset must not be empty");
  {
    const std::vector<Violation> violations = validate(doc);
    if (!violations.empty())
      throw PsoError(PsoError::Kind::BadData, "document is invalid: " +
                                                  violations.front().element + ": " +
                                                  violations.front().constraint);
  }

  const std::string output_name = single_output(doc).name;
  const std::vector<TermSelector> tunable = all_terms(doc);
  auto [initial_values, spec] = encode_kb(doc, tunable);

  const FitnessFn fitness = [&](const Eigen::VectorXd& position) {
    return dataset_mse(decode_kb(doc, tunable, position), dataset, output_name, resolution);
  };

  PsoOptions seeded = options;
  seeded.seed_position = initial_values;

  TuneResult result;
  result.initial_mse = dataset_mse(doc, dataset, output_name, resolution);
  const PsoResult pso = optimize(spec, fitness, seeded);
  result.tuned = decode_kb(doc, tunable, pso.best_position);
  result.final_mse = pso.best_fitness;
  result.history = pso.history;
  return result;
}

}  // namespace aifml
