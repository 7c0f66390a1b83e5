// simulation.hpp : drives a scripted class of simulated students through the
// full message loop on an in-process broker and collects every artifact the
// paper-and-pencil workflow would: session log rows, device logs and the
// wire trace.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aifml/net/broker.hpp"
#include "aifml/net/endpoints.hpp"
#include "aifml/raa.hpp"

namespace aifml::net {

enum class ScoreDistribution { Uniform, Fixed };

struct SimulationOptions {
  int students = 1;
  int sentences = 1;       // utterances per student
  std::uint64_t seed = 0;
  std::string class_id = "c1";
  int teams = 6;           // students are assigned round-robin
  ScoreDistribution distribution = ScoreDistribution::Uniform;
  double fixed_score = 0.9;  // used when distribution == Fixed
};

struct SimulationResult {
  std::vector<SessionLogRow> log;       // one row per utterance, grouped by student
  std::vector<BusMessage> trace;        // every publication in wire order
  std::vector<std::string> display_log;
  std::vector<std::string> robot_log;
};

// Deterministic by seed: same options give bit-identical logs and traces.
SimulationResult run_class_simulation(const SimulationOptions& options);

}  // namespace aifml::net
