// endpoints.hpp : the service and device endpoints of the agent message
// layer. Each endpoint is a single-threaded loop over its inbox; all
// handlers dedupe by event_id so at-least-once delivery has exactly-once
// effect.

#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "aifml/net/broker.hpp"
#include "aifml/net/event.hpp"
#include "aifml/raa.hpp"

namespace aifml::net {

// Durable state of the RAA service: per-student sessions plus the set of
// already-processed utterance event ids. Outlives service restarts.
class SessionStore {
 public:
  RAASession& session(const std::string& student_id);
  const std::map<std::string, RAASession>& sessions() const { return sessions_; }

  bool seen(const std::string& event_id) const { return seen_.count(event_id) > 0; }
  void mark_seen(const std::string& event_id) { seen_.insert(event_id); }

 private:
  std::map<std::string, RAASession> sessions_;
  std::set<std::string> seen_;
};

// Consumes utterance_scored events; for each new event_id runs the scoring
// transition and publishes one raa_result, one display_update and one
// robot_action, all sharing the triggering event_id plus a kind suffix.
class RaaService {
 public:
  RaaService(MessageBus& bus, std::string class_id, SessionStore& store, RaaConfig config = {});

  // Processes every pending event; returns how many were handled (duplicates
  // and malformed payloads count as handled but cause no publishes).
  std::size_t poll();

 private:
  void handle(const AgentEvent& event);

  MessageBus& bus_;
  std::string class_id_;
  SessionStore& store_;
  RaaConfig config_;
};

// Append-only observation log shared by the device simulators, so a device
// restart does not lose or repeat lines.
struct DeviceLog {
  std::vector<std::string> lines;
  std::set<std::string> seen;
};

// The "LCD": records recognition, message and score of each display update.
class DisplaySim {
 public:
  DisplaySim(MessageBus& bus, const std::string& class_id, DeviceLog& log);
  std::size_t poll();

 private:
  MessageBus& bus_;
  DeviceLog& log_;
};

// Records the spoken action of each robot_action event.
class RobotSim {
 public:
  RobotSim(MessageBus& bus, const std::string& class_id, DeviceLog& log);
  std::size_t poll();

 private:
  MessageBus& bus_;
  DeviceLog& log_;
};

}  // namespace aifml::net
