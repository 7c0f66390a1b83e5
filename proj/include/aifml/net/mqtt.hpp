// mqtt.hpp : minimal MQTT 3.1.1 client, QoS 1, no retained messages.
//
// The packet codec is pure and unit-tested; MqttClient adds a blocking
// TCP session with reconnect-and-resend, exposing the MessageBus interface
// so endpoints run unchanged against a real broker.

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aifml/net/broker.hpp"
#include "aifml/net/event.hpp"

namespace aifml::net::mqtt {

enum class PacketType : std::uint8_t {
  Connect = 1,
  Connack = 2,
  Publish = 3,
  Puback = 4,
  Subscribe = 8,
  Suback = 9,
  Pingreq = 12,
  Pingresp = 13,
  Disconnect = 14,
};

struct Packet {
  PacketType type{};
  std::uint8_t flags = 0;       // lower nibble of the fixed header
  std::vector<std::uint8_t> body;  // variable header + payload
};

// Fixed header with the remaining-length varint, then the body.
std::vector<std::uint8_t> encode_packet(const Packet& packet);

// Decodes one packet from the front of `data`; returns it plus the number of
// bytes consumed, or nullopt if more bytes are needed. Throws NetError on a
// malformed header.
std::optional<std::pair<Packet, std::size_t>> decode_packet(const std::uint8_t* data,
                                                            std::size_t size);

Packet make_connect(const std::string& client_id, std::uint16_t keepalive_s, bool clean_session);
Packet make_publish(const std::string& topic, const std::string& payload,
                    std::uint16_t packet_id, bool duplicate);
Packet make_puback(std::uint16_t packet_id);
Packet make_subscribe(const std::string& topic, std::uint16_t packet_id);
Packet make_pingreq();
Packet make_disconnect();

struct PublishView {
  std::string topic;
  std::string payload;
  std::uint16_t packet_id = 0;  // zero for QoS 0
  std::uint8_t qos = 0;
};

PublishView parse_publish(const Packet& packet);
std::uint16_t parse_packet_id(const Packet& packet);  // puback / suback

// --- blocking TCP client --------------------------------------------------------

struct MqttOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 1883;
  std::string client_id;
  std::uint16_t keepalive_s = 30;
  int connect_attempts = 5;      // with exponential backoff
  int io_timeout_ms = 1000;
};

class MqttClient : public MessageBus {
 public:
  explicit MqttClient(MqttOptions options);
  ~MqttClient() override;

  MqttClient(const MqttClient&) = delete;
  MqttClient& operator=(const MqttClient&) = delete;

  // Connects (or throws NetError::BrokerDisconnected after the retries).
  void connect();
  void disconnect();

  void publish(const std::string& topic, const std::string& payload) override;
  void subscribe(const std::string& topic) override;
  std::optional<BusMessage> peek() override;
  void ack() override;

  // Reads from the socket for up to timeout_ms, dispatching acks and queueing
  // inbound publishes. Returns false on timeout with nothing received.
  bool pump(int timeout_ms);

 private:
  void send_packet(const Packet& packet);
  void handle_packet(const Packet& packet);
  void reconnect();

  MqttOptions options_;
  int fd_ = -1;
  std::uint16_t next_packet_id_ = 1;
  std::vector<std::uint8_t> inbound_;
  std::deque<std::pair<BusMessage, std::uint16_t>> delivery_queue_;  // message + packet id
  std::map<std::uint16_t, Packet> unacked_publishes_;
  std::vector<std::string> subscriptions_;
};

}  // namespace aifml::net::mqtt
