// event.hpp : wire events of the agent message layer.
//
// Payloads are UTF-8 JSON. Field names on the wire: event_id, kind,
// class_id, student_id, sentence_id, fuzzy_score, recognition, message,
// action, timestamp_ms. Unknown fields in incoming payloads are ignored;
// missing required fields are rejected.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "aifml/raa.hpp"

namespace aifml::net {

struct NetError : std::runtime_error {
  enum class Kind { MalformedPayload, UnknownKind, BrokerDisconnected };
  Kind kind;
  NetError(Kind k, const std::string& message) : std::runtime_error(message), kind(k) {}
};

enum class EventKind { UtteranceScored, RaaResult, RobotAction, DisplayUpdate };

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view text);

enum class AgentAction { SayCongrats, SayTryAgain, SayCheerUp };

std::string_view to_string(AgentAction action);
AgentAction action_from_string(std::string_view text);

// One-to-one mapping between agent messages and robot actions.
AgentAction action_for_message(std::string_view message);
std::string_view message_for_action(AgentAction action);

struct AgentEvent {
  std::string event_id;  // idempotency key
  EventKind kind = EventKind::UtteranceScored;
  std::string class_id;
  std::string student_id;
  std::string sentence_id;
  std::optional<double> fuzzy_score;          // utterance_scored, raa_result, display_update
  std::optional<Recognition> recognition;     // raa_result, display_update
  std::optional<std::string> message;         // raa_result, display_update
  std::optional<AgentAction> action;          // robot_action
  std::int64_t timestamp_ms = 0;

  bool operator==(const AgentEvent&) const = default;
};

std::string encode_event(const AgentEvent& event);
AgentEvent decode_event(std::string_view payload);

// aifml/{class_id}/utterance, .../raa/result, .../display, .../robot/action
std::string topic_for(EventKind kind, const std::string& class_id);

}  // namespace aifml::net
