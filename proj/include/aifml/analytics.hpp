// analytics.hpp : learning-performance regression pipeline.
//
// Records carry nine features (school code, grade, gender, three feedback
// scores, practice count, correctly-recognized ratio, combined recognized
// score) and a monthly test-score label. Columns x4..x9 and y are min-max
// scaled; x1..x3 pass through. A small feed-forward network is trained by
// full-batch gradient descent on MSE.

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aifml {

inline constexpr int kFeatureCount = 9;

struct AnalyticsError : std::runtime_error {
  enum class Kind { DegenerateColumn, EmptySplit, NonFiniteLoss, BadData };
  Kind kind;
  AnalyticsError(Kind k, const std::string& message) : std::runtime_error(message), kind(k) {}
};

enum class Provenance { Raw, Scaled };

struct Dataset {
  Eigen::MatrixXd features;  // rows x 9, columns x1..x9
  Eigen::VectorXd labels;    // y
  Provenance provenance = Provenance::Raw;

  Eigen::Index size() const { return features.rows(); }
};

// Per-column (min, max) captured at fit time. Index 0..8 map to x1..x9 and
// index 9 to y; pass-through columns have no range.
struct ScalingSpec {
  std::array<std::optional<std::pair<double, double>>, kFeatureCount + 1> columns;
};

// Which columns are min-max scaled (x4..x9 and y).
bool column_is_scaled(int column);

std::pair<Dataset, ScalingSpec> scale_fit_transform(const Dataset& raw);
Dataset scale_transform(const Dataset& data, const ScalingSpec& spec);
Dataset scale_inverse(const Dataset& data, const ScalingSpec& spec);

// Checks the scaled-record invariants (x4..x9, y in [0,1]; x3 in {0,1}).
std::vector<std::string> scaled_violations(const Dataset& data);

struct SplitResult {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Deterministic shuffle by seed; floor allocation with the remainder going
// to test. val_fraction may be zero.
SplitResult split(const Dataset& data, double train_fraction, double val_fraction,
                  std::uint64_t seed);

// --- regression model ----------------------------------------------------------

enum class Activation { ReLU, Sigmoid, Identity };

struct NetworkConfig {
  std::vector<int> layer_sizes = {kFeatureCount, 16, 8, 1};
  Activation hidden = Activation::ReLU;
  Activation output = Activation::Sigmoid;
  double learning_rate = 0.05;
  // Samples per gradient step; zero means full batch. Batches are drawn from
  // a deterministic per-epoch shuffle of the training set.
  int batch_size = 16;
};

struct RegressionModel {
  NetworkConfig config;
  std::vector<Eigen::MatrixXd> weights;  // weights[l] maps layer l to l+1
  std::vector<Eigen::VectorXd> biases;

  static RegressionModel initialize(const NetworkConfig& config, std::uint64_t seed);
  Eigen::VectorXd predict(const Eigen::MatrixXd& features) const;
  Eigen::Index parameter_count() const;
};

struct TrainReport {
  std::vector<double> train_loss;  // recorded after each epoch's update
  std::vector<double> val_loss;
  double final_train = 0;
  double final_val = 0;
  double final_test = 0;  // filled by callers that hold a test set
  int epochs = 0;
  std::uint64_t seed = 0;
  Eigen::Index train_size = 0;
  Eigen::Index val_size = 0;
  Eigen::Index test_size = 0;
};

std::pair<RegressionModel, TrainReport> train(const NetworkConfig& config, const Dataset& train_set,
                                              const Dataset& val_set, int epochs,
                                              std::uint64_t seed);

// Mean over records of (prediction - y)^2.
double evaluate(const RegressionModel& model, const Dataset& data);

// Max relative error between analytic gradients and central finite
// differences over every parameter.
double gradient_check(const RegressionModel& model, const Dataset& batch, double epsilon);

// --- epoch sweep ----------------------------------------------------------------

struct SweepRow {
  int epochs = 0;
  double mse_train = 0;
  double mse_val = 0;
  double mse_test = 0;
  bool best = false;  // minimum training MSE in the table
};

struct SweepReport {
  std::string dataset;
  std::vector<SweepRow> rows;
  std::uint64_t seed = 0;
};

inline const std::vector<int> kDefaultEpochSweep = {100, 200, 300, 400, 500};

// Scales, splits 70/30 with a 20% validation carve-out from the training
// side, then trains one model per epoch setting from identical
// initialization.
SweepReport epoch_sweep(const Dataset& raw, const std::vector<int>& epoch_list, std::uint64_t seed,
                        const std::string& dataset_name = "dataset");

std::string sweep_report_json(const SweepReport& report);
std::string train_report_json(const TrainReport& report, const std::string& dataset_name);

// --- records CSV and synthetic data ---------------------------------------------

// Header exactly x1,x2,x3,x4,x5,x6,x7,x8,x9,y.
Dataset parse_records_csv(std::string_view text);
std::string records_csv(const Dataset& data);

// Draws plausible raw records; y mixes the recognized-score features with
// configurable gaussian noise.
Dataset synthetic_dataset(int count, std::uint64_t seed, double noise);

// Noiseless: y depends on x8 alone through an exact affine map.
Dataset synthetic_affine_dataset(int count, std::uint64_t seed);

}  // namespace aifml
