#include "aifml/net/event.hpp"

#include <json.hpp>

namespace aifml::net {

using nlohmann::json;

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::UtteranceScored: return "utterance_scored";
    case EventKind::RaaResult: return "raa_result";
    case EventKind::RobotAction: return "robot_action";
    case EventKind::DisplayUpdate: return "display_update";
  }
  return "utterance_scored";
}

EventKind event_kind_from_string(std::string_view text) {
  if (text == "utterance_scored") return EventKind::UtteranceScored;
  if (text == "raa_result") return EventKind::RaaResult;
  if (text == "robot_action") return EventKind::RobotAction;
  if (text == "display_update") return EventKind::DisplayUpdate;
  throw NetError(NetError::Kind::UnknownKind, "unknown event kind '" + std::string(text) + "'");
}

std::string_view to_string(AgentAction action) {
  switch (action) {
    case AgentAction::SayCongrats: return "say_congrats";
    case AgentAction::SayTryAgain: return "say_try_again";
    case AgentAction::SayCheerUp: return "say_cheer_up";
  }
  return "say_congrats";
}

AgentAction action_from_string(std::string_view text) {
  if (text == "say_congrats") return AgentAction::SayCongrats;
  if (text == "say_try_again") return AgentAction::SayTryAgain;
  if (text == "say_cheer_up") return AgentAction::SayCheerUp;
  throw NetError(NetError::Kind::MalformedPayload,
                 "unknown robot action '" + std::string(text) + "'");
}

AgentAction action_for_message(std::string_view message) {
  if (message == kCongratsMessage) return AgentAction::SayCongrats;
  if (message == kTryAgainMessage) return AgentAction::SayTryAgain;
  if (message == kCheerUpMessage) return AgentAction::SayCheerUp;
  throw NetError(NetError::Kind::MalformedPayload,
                 "no robot action for message '" + std::string(message) + "'");
}

std::string_view message_for_action(AgentAction action) {
  switch (action) {
    case AgentAction::SayCongrats: return kCongratsMessage;
    case AgentAction::SayTryAgain: return kTryAgainMessage;
    case AgentAction::SayCheerUp: return kCheerUpMessage;
  }
  return kCongratsMessage;
}

namespace {

[[noreturn]] void malformed(const std::string& message) {
  throw NetError(NetError::Kind::MalformedPayload, "malformed payload: " + message);
}

void require_score(const AgentEvent& event) {
  if (!event.fuzzy_score.has_value()) malformed("missing required field 'fuzzy_score'");
}

void require_result_fields(const AgentEvent& event) {
  require_score(event);
  if (!event.recognition.has_value()) malformed("missing required field 'recognition'");
  if (!event.message.has_value()) malformed("missing required field 'message'");
}

void check_event(const AgentEvent& event) {
  if (event.event_id.empty()) malformed("missing required field 'event_id'");
  if (event.class_id.empty()) malformed("missing required field 'class_id'");
  if (event.student_id.empty()) malformed("missing required field 'student_id'");
  if (event.sentence_id.empty()) malformed("missing required field 'sentence_id'");
  if (event.fuzzy_score.has_value() && !(*event.fuzzy_score >= 0.0 && *event.fuzzy_score <= 1.0))
    malformed("fuzzy_score must lie in [0,1]");
  switch (event.kind) {
    case EventKind::UtteranceScored:
      require_score(event);
      break;
    case EventKind::RaaResult:
    case EventKind::DisplayUpdate:
      require_result_fields(event);
      break;
    case EventKind::RobotAction:
      if (!event.action.has_value()) malformed("missing required field 'action'");
      break;
  }
}

}  // namespace

std::string encode_event(const AgentEvent& event) {
  check_event(event);
  json payload;
  payload["event_id"] = event.event_id;
  payload["kind"] = std::string(to_string(event.kind));
  payload["class_id"] = event.class_id;
  payload["student_id"] = event.student_id;
  payload["sentence_id"] = event.sentence_id;
  if (event.fuzzy_score.has_value()) payload["fuzzy_score"] = *event.fuzzy_score;
  if (event.recognition.has_value())
    payload["recognition"] = std::string(aifml::to_string(*event.recognition));
  if (event.message.has_value()) payload["message"] = *event.message;
  if (event.action.has_value()) payload["action"] = std::string(to_string(*event.action));
  payload["timestamp_ms"] = event.timestamp_ms;
  return payload.dump();
}

AgentEvent decode_event(std::string_view payload) {
  json parsed;
  try {
    parsed = json::parse(payload);
  } catch (const json::parse_error& error) {
    malformed(error.what());
  }
  if (!parsed.is_object()) malformed("payload must be a JSON object");

  const auto get_string = [&](const char* key) -> std::string {
    const auto it = parsed.find(key);
    if (it == parsed.end() || !it->is_string())
      malformed(std::string("missing required field '") + key + "'");
    return it->get<std::string>();
  };

  AgentEvent event;
  event.kind = event_kind_from_string(get_string("kind"));
  event.event_id = get_string("event_id");
  event.class_id = get_string("class_id");
  event.student_id = get_string("student_id");
  event.sentence_id = get_string("sentence_id");

  if (const auto it = parsed.find("fuzzy_score"); it != parsed.end()) {
    if (!it->is_number()) malformed("fuzzy_score must be a number");
    event.fuzzy_score = it->get<double>();
  }
  if (const auto it = parsed.find("recognition"); it != parsed.end()) {
    if (!it->is_string()) malformed("recognition must be a string");
    try {
      event.recognition = recognition_from_string(it->get<std::string>());
    } catch (const RaaError& error) {
      malformed(error.what());
    }
  }
  if (const auto it = parsed.find("message"); it != parsed.end()) {
    if (!it->is_string()) malformed("message must be a string");
    event.message = it->get<std::string>();
  }
  if (const auto it = parsed.find("action"); it != parsed.end()) {
    if (!it->is_string()) malformed("action must be a string");
    event.action = action_from_string(it->get<std::string>());
  }
  if (const auto it = parsed.find("timestamp_ms"); it != parsed.end()) {
    if (!it->is_number_integer()) malformed("timestamp_ms must be an integer");
    event.timestamp_ms = it->get<std::int64_t>();
  } else {
    malformed("missing required field 'timestamp_ms'");
  }

  check_event(event);
  return event;
}

std::string topic_for(EventKind kind, const std::string& class_id) {
  switch (kind) {
    case EventKind::UtteranceScored: return "aifml/" + class_id + "/utterance";
    case EventKind::RaaResult: return "aifml/" + class_id + "/raa/result";
    case EventKind::DisplayUpdate: return "aifml/" + class_id + "/display";
    case EventKind::RobotAction: return "aifml/" + class_id + "/robot/action";
  }
  return "aifml/" + class_id + "/utterance";
}

}  // namespace aifml::net
