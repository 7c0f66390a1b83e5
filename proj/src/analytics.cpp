#include "aifml/analytics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "aifml/detail/csv.hpp"

namespace aifml {

bool column_is_scaled(int column) { return column >= 3; }  // x4..x9 and y

namespace {

const char* column_name(int column) {
  static const char* names[] = {"x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "y"};
  return names[column];
}

double column_value(const Dataset& data, Eigen::Index row, int column) {
  return column < kFeatureCount ? data.features(row, column) : data.labels(row);
}

void set_column_value(Dataset& data, Eigen::Index row, int column, double value) {
  if (column < kFeatureCount) data.features(row, column) = value;
  else data.labels(row) = value;
}

}  // namespace

std::pair<Dataset, ScalingSpec> scale_fit_transform(const Dataset& raw) {
  if (raw.size() == 0)
    throw AnalyticsError(AnalyticsError::Kind::BadData, "cannot scale an empty dataset");
  ScalingSpec spec;
  for (int c = 0; c <= kFeatureCount; ++c) {
    if (!column_is_scaled(c)) continue;
    double lo = column_value(raw, 0, c), hi = lo;
    for (Eigen::Index r = 1; r < raw.size(); ++r) {
      lo = std::min(lo, column_value(raw, r, c));
      hi = std::max(hi, column_value(raw, r, c));
    }
    if (!(lo < hi))
      throw AnalyticsError(AnalyticsError::Kind::DegenerateColumn,
                           std::string("column ") + column_name(c) +
                               " is constant; min-max scaling is undefined");
    spec.columns[c] = {lo, hi};
  }
  return {scale_transform(raw, spec), spec};
}

Dataset scale_transform(const Dataset& data, const ScalingSpec& spec) {
  Dataset out = data;
  for (int c = 0; c <= kFeatureCount; ++c) {
    if (!spec.columns[c].has_value()) continue;
    const auto [lo, hi] = *spec.columns[c];
    for (Eigen::Index r = 0; r < out.size(); ++r)
      set_column_value(out, r, c, (column_value(data, r, c) - lo) / (hi - lo));
  }
  out.provenance = Provenance::Scaled;
  return out;
}

Dataset scale_inverse(const Dataset& data, const ScalingSpec& spec) {
  Dataset out = data;
  for (int c = 0; c <= kFeatureCount; ++c) {
    if (!spec.columns[c].has_value()) continue;
    const auto [lo, hi] = *spec.columns[c];
    for (Eigen::Index r = 0; r < out.size(); ++r)
      set_column_value(out, r, c, lo + column_value(data, r, c) * (hi - lo));
  }
  out.provenance = Provenance::Raw;
  return out;
}

std::vector<std::string> scaled_violations(const Dataset& data) {
  std::vector<std::string> out;
  for (Eigen::Index r = 0; r < data.size(); ++r) {
    for (int c = 0; c <= kFeatureCount; ++c) {
      const double v = column_value(data, r, c);
      if (column_is_scaled(c)) {
        if (!(v >= 0.0 && v <= 1.0))
          out.push_back("row " + std::to_string(r) + ": " + column_name(c) +
                        " outside [0,1] after scaling");
      } else if (c == 2 && v != 0.0 && v != 1.0) {
        out.push_back("row " + std::to_string(r) + ": x3 must be 0 or 1");
      }
    }
  }
  return out;
}

SplitResult split(const Dataset& data, double train_fraction, double val_fraction,
                  std::uint64_t seed) {
  if (!(train_fraction > 0.0) || val_fraction < 0.0 ||
      !(train_fraction + val_fraction < 1.0))
    throw std::invalid_argument("split fractions must leave a test remainder");

  const Eigen::Index n = data.size();
  const auto train_size = static_cast<Eigen::Index>(std::floor(n * train_fraction));
  const auto val_size = static_cast<Eigen::Index>(std::floor(n * val_fraction));
  const Eigen::Index test_size = n - train_size - val_size;
  if (train_size == 0 || test_size == 0 || (val_fraction > 0.0 && val_size == 0))
    throw AnalyticsError(AnalyticsError::Kind::EmptySplit,
                         "split would produce an empty partition");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto take = [&](Eigen::Index offset, Eigen::Index count) {
    Dataset part;
    part.provenance = data.provenance;
    part.features.resize(count, kFeatureCount);
    part.labels.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) {
      part.features.row(i) = data.features.row(order[static_cast<std::size_t>(offset + i)]);
      part.labels(i) = data.labels(order[static_cast<std::size_t>(offset + i)]);
    }
    return part;
  };

  return {take(0, train_size), take(train_size, val_size),
          take(train_size + val_size, test_size)};
}

// --- regression model ------------------------------------------------------------

namespace {

Eigen::ArrayXXd apply_activation(const Eigen::ArrayXXd& z, Activation activation) {
  switch (activation) {
    case Activation::ReLU: return z.max(0.0);
    case Activation::Sigmoid: return 1.0 / (1.0 + (-z).exp());
    case Activation::Identity: return z;
  }
  return z;
}

// Derivative expressed through the activation value a = f(z).
Eigen::ArrayXXd activation_derivative(const Eigen::ArrayXXd& a, Activation activation) {
  switch (activation) {
    case Activation::ReLU: return (a > 0.0).cast<double>();
    case Activation::Sigmoid: return a * (1.0 - a);
    case Activation::Identity: return Eigen::ArrayXXd::Ones(a.rows(), a.cols());
  }
  return Eigen::ArrayXXd::Ones(a.rows(), a.cols());
}

void check_network_inputs(const NetworkConfig& config) {
  if (config.layer_sizes.size() < 2)
    throw std::invalid_argument("network needs at least input and output layers");
  if (config.layer_sizes.front() != kFeatureCount)
    throw std::invalid_argument("input layer must have nine units");
  if (config.layer_sizes.back() != 1)
    throw std::invalid_argument("output layer must have one unit");
  for (const int size : config.layer_sizes)
    if (size < 1) throw std::invalid_argument("layer sizes must be positive");
}

struct ForwardPass {
  std::vector<Eigen::MatrixXd> activations;  // activations[0] is the input batch
};

ForwardPass forward(const RegressionModel& model, const Eigen::MatrixXd& features) {
  ForwardPass pass;
  pass.activations.reserve(model.weights.size() + 1);
  pass.activations.push_back(features);
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const bool last = l + 1 == model.weights.size();
    Eigen::MatrixXd z = pass.activations.back() * model.weights[l].transpose();
    z.rowwise() += model.biases[l].transpose();
    pass.activations.push_back(
        apply_activation(z.array(), last ? model.config.output : model.config.hidden).matrix());
  }
  return pass;
}

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Gradient of mean((pred - y)^2) over the batch.
Gradients backward(const RegressionModel& model, const ForwardPass& pass,
                   const Eigen::VectorXd& labels) {
  const Eigen::Index n = labels.size();
  const std::size_t layers = model.weights.size();
  Gradients grads;
  grads.weights.resize(layers);
  grads.biases.resize(layers);

  Eigen::MatrixXd delta =
      (2.0 / static_cast<double>(n)) * (pass.activations.back() - labels).array().matrix();
  delta.array() *= activation_derivative(pass.activations.back().array(), model.config.output);

  for (std::size_t l = layers; l-- > 0;) {
    grads.weights[l] = delta.transpose() * pass.activations[l];
    grads.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = delta * model.weights[l];
      delta.array() *= activation_derivative(pass.activations[l].array(), model.config.hidden);
    }
  }
  return grads;
}

double mse_of(const Eigen::MatrixXd& predictions, const Eigen::VectorXd& labels) {
  return (predictions.col(0) - labels).squaredNorm() / static_cast<double>(labels.size());
}

}  // namespace

RegressionModel RegressionModel::initialize(const NetworkConfig& config, std::uint64_t seed) {
  check_network_inputs(config);
  RegressionModel model;
  model.config = config;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < config.layer_sizes.size(); ++l) {
    const int fan_in = config.layer_sizes[l];
    const int fan_out = config.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return model;
}

Eigen::VectorXd RegressionModel::predict(const Eigen::MatrixXd& features) const {
  return forward(*this, features).activations.back().col(0);
}

Eigen::Index RegressionModel::parameter_count() const {
  Eigen::Index count = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) count += weights[l].size() + biases[l].size();
  return count;
}

std::pair<RegressionModel, TrainReport> train(const NetworkConfig& config, const Dataset& train_set,
                                              const Dataset& val_set, int epochs,
                                              std::uint64_t seed) {
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (train_set.size() == 0) throw std::invalid_argument("training set must not be empty");
  if (train_set.provenance != Provenance::Scaled)
    throw std::invalid_argument("training expects scaled data");

  RegressionModel model = RegressionModel::initialize(config, seed);
  TrainReport report;
  report.epochs = epochs;
  report.seed = seed;
  report.train_size = train_set.size();
  report.val_size = val_set.size();

  const Eigen::Index n = train_set.size();
  const Eigen::Index batch =
      config.batch_size <= 0 ? n : std::min<Eigen::Index>(config.batch_size, n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 shuffle_rng(seed ^ 0x9E3779B97F4A7C15ULL);

  Eigen::MatrixXd batch_features(batch, train_set.features.cols());
  Eigen::VectorXd batch_labels(batch);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (Eigen::Index begin = 0; begin < n; begin += batch) {
      const Eigen::Index count = std::min(batch, n - begin);
      for (Eigen::Index i = 0; i < count; ++i) {
        batch_features.row(i) = train_set.features.row(order[static_cast<std::size_t>(begin + i)]);
        batch_labels(i) = train_set.labels(order[static_cast<std::size_t>(begin + i)]);
      }
      const ForwardPass pass = forward(model, batch_features.topRows(count));
      const Gradients grads = backward(model, pass, batch_labels.head(count));
      for (std::size_t l = 0; l < model.weights.size(); ++l) {
        model.weights[l] -= config.learning_rate * grads.weights[l];
        model.biases[l] -= config.learning_rate * grads.biases[l];
      }
    }

    const double train_loss = evaluate(model, train_set);
    if (!std::isfinite(train_loss))
      throw AnalyticsError(AnalyticsError::Kind::NonFiniteLoss,
                           "training loss diverged at epoch " + std::to_string(epoch + 1));
    report.train_loss.push_back(train_loss);
    if (val_set.size() > 0) report.val_loss.push_back(evaluate(model, val_set));
  }

  report.final_train = report.train_loss.back();
  report.final_val = report.val_loss.empty() ? 0.0 : report.val_loss.back();
  return {std::move(model), std::move(report)};
}

double evaluate(const RegressionModel& model, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("cannot evaluate on an empty dataset");
  return mse_of(forward(model, data.features).activations.back(), data.labels);
}

double gradient_check(const RegressionModel& model, const Dataset& batch, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1e-3))
    throw std::invalid_argument("epsilon must lie in (0, 1e-3]");

  const ForwardPass pass = forward(model, batch.features);
  const Gradients analytic = backward(model, pass, batch.labels);

  RegressionModel probe = model;
  double max_relative = 0.0;

  const auto probe_loss = [&] {
    return mse_of(forward(probe, batch.features).activations.back(), batch.labels);
  };

  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    for (Eigen::Index r = 0; r < model.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < model.weights[l].cols() + 1; ++c) {
        const bool is_bias = c == model.weights[l].cols();
        double& parameter = is_bias ? probe.biases[l](r) : probe.weights[l](r, c);
        const double saved = parameter;
        parameter = saved + epsilon;
        const double up = probe_loss();
        parameter = saved - epsilon;
        const double down = probe_loss();
        parameter = saved;

        const double numeric = (up - down) / (2.0 * epsilon);
        const double exact = is_bias ? analytic.biases[l](r) : analytic.weights[l](r, c);
        const double scale = std::max({std::abs(numeric), std::abs(exact), 1e-8});
        max_relative = std::max(max_relative, std::abs(numeric - exact) / scale);
      }
    }
  }
  return max_relative;
}

// --- epoch sweep ------------------------------------------------------------------

SweepReport epoch_sweep(const Dataset& raw, const std::vector<int>& epoch_list, std::uint64_t seed,
                        const std::string& dataset_name) {
  if (epoch_list.empty()) throw std::invalid_argument("epoch list must not be empty");

  const Dataset scaled =
      raw.provenance == Provenance::Scaled ? raw : scale_fit_transform(raw).first;
  const SplitResult outer = split(scaled, 0.7, 0.0, seed);
  const SplitResult inner = split(outer.train, 0.8, 0.0, seed + 1);
  // inner.test is the 20% validation carve-out of the training side
  const Dataset& train_set = inner.train;
  const Dataset& val_set = inner.test;
  const Dataset& test_set = outer.test;

  SweepReport report;
  report.dataset = dataset_name;
  report.seed = seed;

  const NetworkConfig config;
  for (const int epochs : epoch_list) {
    auto [model, train_report] = train(config, train_set, val_set, epochs, seed);
    SweepRow row;
    row.epochs = epochs;
    row.mse_train = train_report.final_train;
    row.mse_val = train_report.final_val;
    row.mse_test = evaluate(model, test_set);
    report.rows.push_back(row);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].mse_train < report.rows[best].mse_train) best = i;
  report.rows[best].best = true;
  return report;
}

namespace {

std::string json_number(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace

std::string sweep_report_json(const SweepReport& report) {
  std::ostringstream os;
  os << "{\"dataset\":\"" << report.dataset << "\",\"rows\":[";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const SweepRow& row = report.rows[i];
    os << (i ? "," : "") << "{\"epochs\":" << row.epochs
       << ",\"mse_train\":" << json_number(row.mse_train)
       << ",\"mse_val\":" << json_number(row.mse_val)
       << ",\"mse_test\":" << json_number(row.mse_test) << ",\"best\":"
       << (row.best ? "true" : "false") << "}";
  }
  os << "],\"seed\":" << report.seed << "}";
  return os.str();
}

std::string train_report_json(const TrainReport& report, const std::string& dataset_name) {
  std::ostringstream os;
  os << "{\"dataset\":\"" << dataset_name << "\",\"epochs\":" << report.epochs
     << ",\"seed\":" << report.seed << ",\"split\":{\"train\":" << report.train_size
     << ",\"val\":" << report.val_size << ",\"test\":" << report.test_size
     << "},\"mse\":{\"train\":" << json_number(report.final_train)
     << ",\"val\":" << json_number(report.final_val)
     << ",\"test\":" << json_number(report.final_test) << "},\"loss\":{\"train\":[";
  for (std::size_t i = 0; i < report.train_loss.size(); ++i)
    os << (i ? "," : "") << json_number(report.train_loss[i]);
  os << "],\"val\":[";
  for (std::size_t i = 0; i < report.val_loss.size(); ++i)
    os << (i ? "," : "") << json_number(report.val_loss[i]);
  os << "]}}";
  return os.str();
}

// --- records CSV and synthetic data -------------------------------------------------

Dataset parse_records_csv(std::string_view text) {
  const std::vector<std::vector<std::string>> records = detail::parse_csv(text);
  if (records.empty())
    throw AnalyticsError(AnalyticsError::Kind::BadData, "records CSV is empty");
  const std::vector<std::string> expected = {"x1", "x2", "x3", "x4", "x5",
                                             "x6", "x7", "x8", "x9", "y"};
  if (records.front() != expected) {
    std::string got;
    for (const auto& field : records.front()) got += (got.empty() ? "" : ",") + field;
    throw AnalyticsError(AnalyticsError::Kind::BadData,
                         "records header must be x1,...,x9,y; got '" + got + "'");
  }

  Dataset data;
  const auto rows = static_cast<Eigen::Index>(records.size() - 1);
  data.features.resize(rows, kFeatureCount);
  data.labels.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& fields = records[static_cast<std::size_t>(r) + 1];
    if (fields.size() != expected.size())
      throw AnalyticsError(AnalyticsError::Kind::BadData,
                           "record row " + std::to_string(r + 1) + " has the wrong arity");
    for (int c = 0; c <= kFeatureCount; ++c) {
      const std::string& field = fields[static_cast<std::size_t>(c)];
      double value = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || ptr != field.data() + field.size())
        throw AnalyticsError(AnalyticsError::Kind::BadData,
                             "bad number '" + field + "' in column " + column_name(c));
      if (c < kFeatureCount) data.features(r, c) = value;
      else data.labels(r) = value;
    }
  }
  return data;
}

std::string records_csv(const Dataset& data) {
  std::ostringstream os;
  os << "x1,x2,x3,x4,x5,x6,x7,x8,x9,y\n";
  for (Eigen::Index r = 0; r < data.size(); ++r) {
    for (int c = 0; c < kFeatureCount; ++c) os << detail::csv_number(data.features(r, c)) << ',';
    os << detail::csv_number(data.labels(r)) << '\n';
  }
  return os.str();
}

Dataset synthetic_dataset(int count, std::uint64_t seed, double noise) {
  if (count < 2) throw std::invalid_argument("need at least two records");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset data;
  data.features.resize(count, kFeatureCount);
  data.labels.resize(count);
  for (int r = 0; r < count; ++r) {
    const double practice = 1.0 + std::floor(unit(rng) * 40.0);
    const double ratio = unit(rng);
    // combined recognized score: accumulated correct credit plus accumulated
    // partial credit over the practice attempts
    const double correct_accum = practice * ratio * (0.55 + 0.4 * unit(rng));
    const double partial_accum = practice * (1.0 - ratio) * (0.1 + 0.4 * unit(rng));
    const double combined = correct_accum + partial_accum;
    data.features(r, 0) = 1.0;                                  // school code
    data.features(r, 1) = unit(rng) < 0.5 ? 5.0 : 6.0;          // grade
    data.features(r, 2) = unit(rng) < 0.5 ? 0.0 : 1.0;          // gender
    data.features(r, 3) = 40.0 + 60.0 * unit(rng);              // feedback scores
    data.features(r, 4) = 40.0 + 60.0 * unit(rng);
    data.features(r, 5) = 40.0 + 60.0 * unit(rng);
    data.features(r, 6) = practice;
    data.features(r, 7) = ratio;
    data.features(r, 8) = combined;
    const double base = 30.0 + 50.0 * ratio + 0.4 * combined + noise * 10.0 * gauss(rng);
    data.labels(r) = std::clamp(base, 0.0, 100.0);
  }
  return data;
}

Dataset synthetic_affine_dataset(int count, std::uint64_t seed) {
  Dataset data = synthetic_dataset(count, seed, 0.0);
  for (Eigen::Index r = 0; r < data.size(); ++r)
    data.labels(r) = 20.0 + 60.0 * data.features(r, 7);  // exact affine function of x8
  return data;
}

}  // namespace aifml
