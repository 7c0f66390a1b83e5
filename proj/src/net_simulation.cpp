#include "aifml/net/simulation.hpp"

#include <random>
#include <sstream>

namespace aifml::net {

namespace {

std::string student_name(int index) {
  std::ostringstream os;
  os << "s" << (index + 1 < 10 ? "00" : index + 1 < 100 ? "0" : "") << index + 1;
  return os.str();
}

}  // namespace

SimulationResult run_class_simulation(const SimulationOptions& options) {
  if (options.students < 1 || options.sentences < 1)
    throw std::invalid_argument("simulation needs at least one student and one sentence");
  if (options.teams < 1) throw std::invalid_argument("simulation needs at least one team");

  InProcBroker broker;
  SimulationResult result;
  broker.set_tap([&result](const BusMessage& message) { result.trace.push_back(message); });

  SessionStore store;
  DeviceLog display_log, robot_log;
  InProcSession service_session(broker, "raa-service");
  InProcSession display_session(broker, "display");
  InProcSession robot_session(broker, "robot");
  InProcSession producer(broker, "producer");
  RaaService service(service_session, options.class_id, store);
  DisplaySim display(display_session, options.class_id, display_log);
  RobotSim robot(robot_session, options.class_id, robot_log);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::map<std::string, std::string> team_of;
  int sequence = 0;
  for (int s = 0; s < options.students; ++s) {
    const std::string student = student_name(s);
    team_of[student] = "T" + std::to_string(s % options.teams + 1);
    for (int u = 0; u < options.sentences; ++u) {
      const double score = options.distribution == ScoreDistribution::Fixed
                               ? options.fixed_score
                               : unit(rng);
      AgentEvent event;
      event.kind = EventKind::UtteranceScored;
      event.event_id = options.class_id + "-" + student + "-u" + std::to_string(u + 1);
      event.class_id = options.class_id;
      event.student_id = student;
      event.sentence_id = "sentence" + std::to_string(u + 1);
      event.fuzzy_score = score;
      event.timestamp_ms = 1000 * static_cast<std::int64_t>(++sequence);  // logical clock
      producer.publish(topic_for(EventKind::UtteranceScored, options.class_id),
                       encode_event(event));
      // pump until quiescent so per-student ordering reaches every device
      while (service.poll() + display.poll() + robot.poll() > 0) {
      }
    }
  }

  for (const auto& [student, session] : store.sessions()) {
    for (const auto& [utterance, outcome] : session.history) {
      SessionLogRow row;
      row.student_id = student;
      row.team_id = team_of[student];
      row.sentence_id = utterance.sentence_id;
      row.fuzzy_score = utterance.fuzzy_score;
      row.recognition = outcome.recognition;
      row.message = outcome.message;
      row.pairc_after = outcome.pairc_after;
      row.timestamp_ms = utterance.timestamp_ms;
      result.log.push_back(std::move(row));
    }
  }
  result.display_log = display_log.lines;
  result.robot_log = robot_log.lines;
  return result;
}

}  // namespace aifml::net
