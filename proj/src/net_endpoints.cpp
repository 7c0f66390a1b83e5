#include "aifml/net/endpoints.hpp"

#include <iostream>
#include <sstream>

#include "aifml/detail/csv.hpp"

namespace aifml::net {

RAASession& SessionStore::session(const std::string& student_id) {
  const auto it = sessions_.find(student_id);
  if (it != sessions_.end()) return it->second;
  RAASession session;
  session.student_id = student_id;
  return sessions_.emplace(student_id, std::move(session)).first->second;
}

RaaService::RaaService(MessageBus& bus, std::string class_id, SessionStore& store,
                       RaaConfig config)
    : bus_(bus), class_id_(std::move(class_id)), store_(store), config_(config) {
  bus_.subscribe(topic_for(EventKind::UtteranceScored, class_id_));
}

std::size_t RaaService::poll() {
  std::size_t handled = 0;
  while (const std::optional<BusMessage> message = bus_.peek()) {
    try {
      handle(decode_event(message->payload));
    } catch (const NetError& error) {
      std::cerr << "raa-service: skipping bad payload: " << error.what() << "\n";
    }
    bus_.ack();
    ++handled;
  }
  return handled;
}

void RaaService::handle(const AgentEvent& event) {
  if (event.kind != EventKind::UtteranceScored) return;
  if (store_.seen(event.event_id)) return;  // duplicate delivery

  RAASession& session = store_.session(event.student_id);
  const Utterance utterance{event.student_id, event.sentence_id, event.fuzzy_score.value(),
                            event.timestamp_ms};
  const RAAOutcome outcome = evaluate(session, utterance, config_);
  store_.mark_seen(event.event_id);

  AgentEvent result;
  result.kind = EventKind::RaaResult;
  result.event_id = event.event_id + "/result";
  result.class_id = class_id_;
  result.student_id = event.student_id;
  result.sentence_id = event.sentence_id;
  result.fuzzy_score = event.fuzzy_score;
  result.recognition = outcome.recognition;
  result.message = outcome.message;
  result.timestamp_ms = event.timestamp_ms;

  AgentEvent display = result;
  display.kind = EventKind::DisplayUpdate;
  display.event_id = event.event_id + "/display";

  AgentEvent robot;
  robot.kind = EventKind::RobotAction;
  robot.event_id = event.event_id + "/robot";
  robot.class_id = class_id_;
  robot.student_id = event.student_id;
  robot.sentence_id = event.sentence_id;
  robot.action = action_for_message(outcome.message);
  robot.timestamp_ms = event.timestamp_ms;

  bus_.publish(topic_for(EventKind::RaaResult, class_id_), encode_event(result));
  bus_.publish(topic_for(EventKind::DisplayUpdate, class_id_), encode_event(display));
  bus_.publish(topic_for(EventKind::RobotAction, class_id_), encode_event(robot));
}

DisplaySim::DisplaySim(MessageBus& bus, const std::string& class_id, DeviceLog& log)
    : bus_(bus), log_(log) {
  bus_.subscribe(topic_for(EventKind::DisplayUpdate, class_id));
}

std::size_t DisplaySim::poll() {
  std::size_t handled = 0;
  while (const std::optional<BusMessage> message = bus_.peek()) {
    try {
      const AgentEvent event = decode_event(message->payload);
      if (event.kind == EventKind::DisplayUpdate && !log_.seen.count(event.event_id)) {
        log_.seen.insert(event.event_id);
        std::ostringstream line;
        line << "student=" << event.student_id << " sentence=" << event.sentence_id
             << " recognition=" << aifml::to_string(*event.recognition) << " score="
             << detail::csv_number(*event.fuzzy_score) << " message=\"" << *event.message << "\"";
        log_.lines.push_back(line.str());
      }
    } catch (const NetError& error) {
      // a bad payload must not take down the display
      std::cerr << "display: skipping bad payload: " << error.what() << "\n";
    }
    bus_.ack();
    ++handled;
  }
  return handled;
}

RobotSim::RobotSim(MessageBus& bus, const std::string& class_id, DeviceLog& log)
    : bus_(bus), log_(log) {
  bus_.subscribe(topic_for(EventKind::RobotAction, class_id));
}

std::size_t RobotSim::poll() {
  std::size_t handled = 0;
  while (const std::optional<BusMessage> message = bus_.peek()) {
    try {
      const AgentEvent event = decode_event(message->payload);
      if (event.kind == EventKind::RobotAction && !log_.seen.count(event.event_id)) {
        log_.seen.insert(event.event_id);
        std::ostringstream line;
        line << "student=" << event.student_id << " sentence=" << event.sentence_id
             << " action=" << to_string(*event.action);
        log_.lines.push_back(line.str());
      }
    } catch (const NetError& error) {
      std::cerr << "robot: skipping bad payload: " << error.what() << "\n";
    }
    bus_.ack();
    ++handled;
  }
  return handled;
}

}  // namespace aifml::net
