// aifml : command-line surface for authoring, inference, tuning, simulation,
// analytics and the agent message layer.
//
// Exit codes: 0 success, 1 validation/domain error, 2 usage error, 3 I/O
// error.

#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "aifml/analytics.hpp"
#include "aifml/fml_xml.hpp"
#include "aifml/inference.hpp"
#include "aifml/net/mqtt.hpp"
#include "aifml/net/simulation.hpp"
#include "aifml/pso.hpp"
#include "aifml/raa.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

volatile std::sig_atomic_t g_interrupted = 0;

void on_signal(int) { g_interrupted = 1; }

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write '" + path + "'");
  file << content;
  if (!file.flush()) throw IoError("cannot write '" + path + "'");
}

std::string format3(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3f", value);
  return buffer;
}

std::string format_full(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

// --- command bodies -------------------------------------------------------------

int cmd_fml_validate(const std::string& path) {
  const std::string text = read_file(path);
  aifml::FmlDocument doc;
  try {
    doc = aifml::parse_fml(text);
  } catch (const aifml::FmlError& error) {
    std::cout << error.what() << "\n";
    return kExitDomain;
  }
  const std::vector<aifml::Violation> violations = aifml::validate(doc);
  if (violations.empty()) {
    std::cout << "OK\n";
    return kExitOk;
  }
  for (const auto& violation : violations)
    std::cout << violation.element << ": " << violation.constraint << "\n";
  return kExitDomain;
}

int cmd_fml_infer(const std::string& path, const std::vector<std::string>& raw_inputs,
                  int resolution) {
  std::map<std::string, double> inputs;
  for (const std::string& assignment : raw_inputs) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--input expects name=value, got '" + assignment + "'");
    const std::string name = assignment.substr(0, eq);
    try {
      inputs[name] = std::stod(assignment.substr(eq + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("bad number in --input '" + assignment + "'");
    }
  }
  const aifml::FmlDocument doc = aifml::parse_fml(read_file(path));
  const aifml::InferenceResult result = aifml::infer(doc, inputs, resolution);
  for (const auto& [variable, value] : result.outputs)
    std::cout << variable << " = " << format_full(value) << "\n";
  return kExitOk;
}

int cmd_tune(const std::string& fml_path, const std::string& data_path, int iterations,
             int swarm, std::uint64_t seed, const std::string& out_path, int resolution) {
  const aifml::FmlDocument doc = aifml::parse_fml(read_file(fml_path));
  const std::vector<aifml::TuningSample> dataset =
      aifml::parse_tuning_csv(read_file(data_path), doc);
  aifml::PsoOptions options;
  options.swarm_size = swarm;
  options.iterations = iterations;
  options.seed = seed;
  const aifml::TuneResult result = aifml::tune_kb(doc, dataset, options, resolution);
  write_file(out_path, aifml::serialize_fml(result.tuned));
  std::cout << "initial_mse = " << format_full(result.initial_mse) << "\n";
  std::cout << "final_mse = " << format_full(result.final_mse) << "\n";
  std::cout << "tuned knowledge base written to " << out_path << "\n";
  return kExitOk;
}

int cmd_raa_simulate(int students, int sentences, std::uint64_t seed, const std::string& out_path,
                     const std::string& class_id, const std::string& trace_path) {
  aifml::net::SimulationOptions options;
  options.students = students;
  options.sentences = sentences;
  options.seed = seed;
  options.class_id = class_id;
  const aifml::net::SimulationResult result = aifml::net::run_class_simulation(options);
  write_file(out_path, aifml::session_log_to_string(result.log));
  if (!trace_path.empty()) {
    std::ostringstream trace;
    for (const auto& message : result.trace)
      trace << message.topic << " " << message.payload << "\n";
    write_file(trace_path, trace.str());
  }
  std::cout << "wrote " << result.log.size() << " log rows for " << students << " students\n";
  return kExitOk;
}

int cmd_raa_stats(const std::string& log_path) {
  const std::vector<aifml::SessionLogRow> rows = aifml::parse_session_log(read_file(log_path));
  const aifml::TeamReport report = aifml::team_report(rows);
  std::cout << "team,average_score,correct,partial\n";
  for (const auto& team : report.teams)
    std::cout << team.team_id << "," << format3(team.average_score) << "," << team.correct_count
              << "," << team.partial_count << "\n";
  std::cout << "overall," << format3(report.overall.average_score) << ","
            << report.overall.correct_count << "," << report.overall.partial_count << "\n";
  return kExitOk;
}

int cmd_analytics_train(const std::string& data_path, int epochs, std::uint64_t seed,
                        const std::string& report_path) {
  const aifml::Dataset raw = aifml::parse_records_csv(read_file(data_path));
  const auto [scaled, spec] = aifml::scale_fit_transform(raw);
  const aifml::SplitResult outer = aifml::split(scaled, 0.7, 0.0, seed);
  const aifml::SplitResult inner = aifml::split(outer.train, 0.8, 0.0, seed + 1);

  const aifml::NetworkConfig config;
  auto [model, report] = aifml::train(config, inner.train, inner.test, epochs, seed);
  report.final_test = aifml::evaluate(model, outer.test);
  report.test_size = outer.test.size();

  const std::string json = aifml::train_report_json(report, data_path);
  std::cout << json << "\n";
  if (!report_path.empty()) write_file(report_path, json + "\n");
  return kExitOk;
}

int cmd_analytics_sweep(const std::string& data_path, const std::vector<int>& epochs,
                        std::uint64_t seed, const std::string& report_path) {
  const aifml::Dataset raw = aifml::parse_records_csv(read_file(data_path));
  const aifml::SweepReport report = aifml::epoch_sweep(raw, epochs, seed, data_path);
  const std::string json = aifml::sweep_report_json(report);
  std::cout << json << "\n";
  if (!report_path.empty()) write_file(report_path, json + "\n");
  return kExitOk;
}

int cmd_analytics_synth(const std::string& out_path, int count, std::uint64_t seed, double noise,
                        bool affine) {
  const aifml::Dataset data = affine ? aifml::synthetic_affine_dataset(count, seed)
                                     : aifml::synthetic_dataset(count, seed, noise);
  write_file(out_path, aifml::records_csv(data));
  std::cout << "wrote " << count << " synthetic records to " << out_path << "\n";
  return kExitOk;
}

std::pair<std::string, std::uint16_t> parse_broker(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos)
    throw CLI::ValidationError("--broker expects host:port, got '" + endpoint + "'");
  const std::string host = endpoint.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(endpoint.substr(colon + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("bad port in --broker '" + endpoint + "'");
  }
  if (port < 1 || port > 65535)
    throw CLI::ValidationError("bad port in --broker '" + endpoint + "'");
  return {host, static_cast<std::uint16_t>(port)};
}

int cmd_net(const std::string& role, const std::string& broker, const std::string& class_id) {
  const auto [host, port] = parse_broker(broker);
  aifml::net::mqtt::MqttOptions options;
  options.host = host;
  options.port = port;
  options.client_id = "aifml-" + role + "-" + class_id;
  aifml::net::mqtt::MqttClient client(options);
  client.connect();

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  aifml::net::SessionStore store;
  aifml::net::DeviceLog log;
  std::unique_ptr<aifml::net::RaaService> service;
  std::unique_ptr<aifml::net::DisplaySim> display;
  std::unique_ptr<aifml::net::RobotSim> robot;
  if (role == "serve")
    service = std::make_unique<aifml::net::RaaService>(client, class_id, store);
  else if (role == "display")
    display = std::make_unique<aifml::net::DisplaySim>(client, class_id, log);
  else
    robot = std::make_unique<aifml::net::RobotSim>(client, class_id, log);

  std::cerr << "aifml " << role << " connected to " << broker << ", class " << class_id << "\n";
  std::size_t printed = 0;
  while (!g_interrupted) {
    client.pump(200);
    if (service) service->poll();
    if (display) display->poll();
    if (robot) robot->poll();
    for (; printed < log.lines.size(); ++printed) std::cout << log.lines[printed] << std::endl;
  }
  client.disconnect();
  std::cerr << "shut down cleanly\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AI-FML co-learning engine"};
  app.require_subcommand(1);

  // fml validate / infer
  CLI::App* fml = app.add_subcommand("fml", "knowledge-base files");
  fml->require_subcommand(1);
  std::string fml_path;
  CLI::App* validate_cmd = fml->add_subcommand("validate", "check a knowledge-base file");
  validate_cmd->add_option("path", fml_path, "FML file")->required();

  std::string infer_path;
  std::vector<std::string> infer_inputs;
  int infer_resolution = aifml::kDefaultResolution;
  CLI::App* infer_cmd = fml->add_subcommand("infer", "run fuzzy inference");
  infer_cmd->add_option("path", infer_path, "FML file")->required();
  infer_cmd->add_option("--input", infer_inputs, "input assignment name=value")->required();
  infer_cmd->add_option("--resolution", infer_resolution, "grid points")->check(CLI::Range(3, 100000000));

  // tune
  std::string tune_fml, tune_data, tune_out;
  int tune_iters = 200, tune_swarm = 30, tune_resolution = 201;
  std::uint64_t tune_seed = 0;
  CLI::App* tune_cmd = app.add_subcommand("tune", "optimize membership functions against data");
  tune_cmd->add_option("--fml", tune_fml, "base FML file")->required();
  tune_cmd->add_option("--data", tune_data, "tuning dataset CSV")->required();
  tune_cmd->add_option("--iters", tune_iters, "iterations")->check(CLI::Range(1, 1000000));
  tune_cmd->add_option("--swarm", tune_swarm, "swarm size")->check(CLI::Range(2, 100000));
  tune_cmd->add_option("--seed", tune_seed, "random seed")->required();
  tune_cmd->add_option("--out", tune_out, "tuned FML output path")->required();
  tune_cmd->add_option("--resolution", tune_resolution, "inference grid during tuning")
      ->check(CLI::Range(3, 100000000));

  // raa simulate / stats
  CLI::App* raa = app.add_subcommand("raa", "scoring sessions");
  raa->require_subcommand(1);
  int sim_students = 1, sim_sentences = 1;
  std::uint64_t sim_seed = 0;
  std::string sim_out, sim_class = "c1", sim_trace;
  CLI::App* simulate_cmd = raa->add_subcommand("simulate", "simulate a class over the in-process broker");
  simulate_cmd->add_option("--students", sim_students, "student count")->check(CLI::Range(1, 100000));
  simulate_cmd->add_option("--sentences", sim_sentences, "utterances per student")
      ->check(CLI::Range(1, 100000));
  simulate_cmd->add_option("--seed", sim_seed, "random seed")->required();
  simulate_cmd->add_option("--out", sim_out, "session log CSV path")->required();
  simulate_cmd->add_option("--class", sim_class, "class id");
  simulate_cmd->add_option("--trace", sim_trace, "also write the wire trace here");

  std::string stats_path;
  CLI::App* stats_cmd = raa->add_subcommand("stats", "per-team report from a session log");
  stats_cmd->add_option("log", stats_path, "session log CSV")->required();

  // analytics train / sweep / synth
  CLI::App* analytics = app.add_subcommand("analytics", "learning-performance regression");
  analytics->require_subcommand(1);
  std::string train_data, train_report_path;
  int train_epochs = 300;
  std::uint64_t train_seed = 0;
  CLI::App* train_cmd = analytics->add_subcommand("train", "train the regression model");
  train_cmd->add_option("--data", train_data, "records CSV")->required();
  train_cmd->add_option("--epochs", train_epochs, "epochs")->check(CLI::Range(1, 1000000));
  train_cmd->add_option("--seed", train_seed, "random seed")->required();
  train_cmd->add_option("--report", train_report_path, "also write the JSON report here");

  std::string sweep_data, sweep_report_path;
  std::vector<int> sweep_epochs = aifml::kDefaultEpochSweep;
  std::uint64_t sweep_seed = 0;
  CLI::App* sweep_cmd = analytics->add_subcommand("sweep", "train once per epoch setting");
  sweep_cmd->add_option("--data", sweep_data, "records CSV")->required();
  sweep_cmd->add_option("--epochs", sweep_epochs, "epoch settings");
  sweep_cmd->add_option("--seed", sweep_seed, "random seed")->required();
  sweep_cmd->add_option("--report", sweep_report_path, "also write the JSON report here");

  std::string synth_out;
  int synth_count = 200;
  std::uint64_t synth_seed = 0;
  double synth_noise = 0.1;
  bool synth_affine = false;
  CLI::App* synth_cmd = analytics->add_subcommand("synth", "generate a synthetic records CSV");
  synth_cmd->add_option("--out", synth_out, "output CSV path")->required();
  synth_cmd->add_option("--n", synth_count, "record count")->check(CLI::Range(2, 10000000));
  synth_cmd->add_option("--seed", synth_seed, "random seed")->required();
  synth_cmd->add_option("--noise", synth_noise, "label noise level")->check(CLI::Range(0.0, 10.0));
  synth_cmd->add_flag("--affine", synth_affine, "noiseless label, affine in x8");

  // net serve / device
  CLI::App* net = app.add_subcommand("net", "run a message-layer endpoint");
  net->require_subcommand(1);
  std::string serve_broker, serve_class = "c1";
  CLI::App* serve_cmd = net->add_subcommand("serve", "run the scoring service");
  serve_cmd->add_option("--broker", serve_broker, "broker host:port")->required();
  serve_cmd->add_option("--class", serve_class, "class id");

  std::string device_kind, device_broker, device_class = "c1";
  CLI::App* device_cmd = net->add_subcommand("device", "run a device simulator");
  device_cmd->add_option("kind", device_kind, "robot or display")->required();
  device_cmd->add_option("--broker", device_broker, "broker host:port")->required();
  device_cmd->add_option("--class", device_class, "class id");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (validate_cmd->parsed()) return cmd_fml_validate(fml_path);
    if (infer_cmd->parsed()) return cmd_fml_infer(infer_path, infer_inputs, infer_resolution);
    if (tune_cmd->parsed())
      return cmd_tune(tune_fml, tune_data, tune_iters, tune_swarm, tune_seed, tune_out,
                      tune_resolution);
    if (simulate_cmd->parsed())
      return cmd_raa_simulate(sim_students, sim_sentences, sim_seed, sim_out, sim_class, sim_trace);
    if (stats_cmd->parsed()) return cmd_raa_stats(stats_path);
    if (train_cmd->parsed())
      return cmd_analytics_train(train_data, train_epochs, train_seed, train_report_path);
    if (sweep_cmd->parsed())
      return cmd_analytics_sweep(sweep_data, sweep_epochs, sweep_seed, sweep_report_path);
    if (synth_cmd->parsed())
      return cmd_analytics_synth(synth_out, synth_count, synth_seed, synth_noise, synth_affine);
    if (serve_cmd->parsed()) return cmd_net("serve", serve_broker, serve_class);
    if (device_cmd->parsed()) {
      if (device_kind != "robot" && device_kind != "display")
        throw CLI::ValidationError("device kind must be 'robot' or 'display'");
      return cmd_net(device_kind, device_broker, device_class);
    }
  } catch (const IoError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitIo;
  } catch (const CLI::ValidationError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitUsage;
  } catch (const aifml::net::NetError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return error.kind == aifml::net::NetError::Kind::BrokerDisconnected ? kExitIo : kExitDomain;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
