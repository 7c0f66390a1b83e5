// broker.hpp : publish/subscribe transport with at-least-once delivery.
//
// MessageBus is what an endpoint sees: publish, subscribe, and a
// peek/ack inbox. A message stays queued until acked, so an endpoint that
// dies mid-handling is redelivered the same message after restart —
// handlers must be idempotent per event_id.
//
// InProcBroker hosts any number of clients in one process with persistent
// per-client queues and optional duplicate-delivery injection for tests.

#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace aifml::net {

struct BusMessage {
  std::string topic;
  std::string payload;
  bool operator==(const BusMessage&) const = default;
};

class MessageBus {
 public:
  virtual ~MessageBus() = default;
  virtual void publish(const std::string& topic, const std::string& payload) = 0;
  virtual void subscribe(const std::string& topic) = 0;
  // Next undelivered inbound message, without removing it.
  virtual std::optional<BusMessage> peek() = 0;
  // Acknowledges the message last returned by peek, removing it.
  virtual void ack() = 0;
};

class InProcBroker {
 public:
  // How many copies of a publication to enqueue for a subscriber (default 1).
  // Lets tests script duplicate deliveries.
  using DeliverySchedule = std::function<int(const BusMessage&, const std::string& client_id)>;

  void set_delivery_schedule(DeliverySchedule schedule) { schedule_ = std::move(schedule); }

  // Observes every publication in order, before fan-out.
  using Tap = std::function<void(const BusMessage&)>;
  void set_tap(Tap tap) { tap_ = std::move(tap); }

  void publish(const std::string& topic, const std::string& payload);
  void subscribe(const std::string& client_id, const std::string& topic);

  std::optional<BusMessage> peek(const std::string& client_id);
  void ack(const std::string& client_id);

  std::size_t pending(const std::string& client_id) const;
  bool quiescent() const;

 private:
  std::map<std::string, std::vector<std::string>> subscribers_;  // topic -> client ids
  std::map<std::string, std::deque<BusMessage>> queues_;         // client id -> inbox
  DeliverySchedule schedule_;
  Tap tap_;
};

// One client's view of an InProcBroker. The queue belongs to the broker and
// survives the session object, like an MQTT persistent session.
class InProcSession : public MessageBus {
 public:
  InProcSession(InProcBroker& broker, std::string client_id)
      : broker_(broker), client_id_(std::move(client_id)) {}

  void publish(const std::string& topic, const std::string& payload) override {
    broker_.publish(topic, payload);
  }
  void subscribe(const std::string& topic) override { broker_.subscribe(client_id_, topic); }
  std::optional<BusMessage> peek() override { return broker_.peek(client_id_); }
  void ack() override { broker_.ack(client_id_); }

  const std::string& client_id() const { return client_id_; }

 private:
  InProcBroker& broker_;
  std::string client_id_;
};

}  // namespace aifml::net
