#include "aifml/net/mqtt.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <thread>

namespace aifml::net::mqtt {

namespace {

[[noreturn]] void protocol_error(const std::string& message) {
  throw NetError(NetError::Kind::MalformedPayload, "mqtt: " + message);
}

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t value) {
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value & 0xFF));
}

void append_string(std::vector<std::uint8_t>& out, const std::string& value) {
  if (value.size() > 0xFFFF) protocol_error("string too long");
  append_u16(out, static_cast<std::uint16_t>(value.size()));
  out.insert(out.end(), value.begin(), value.end());
}

std::uint16_t read_u16(const std::vector<std::uint8_t>& body, std::size_t& pos) {
  if (pos + 2 > body.size()) protocol_error("truncated packet");
  const std::uint16_t value =
      static_cast<std::uint16_t>(body[pos] << 8) | static_cast<std::uint16_t>(body[pos + 1]);
  pos += 2;
  return value;
}

std::string read_string(const std::vector<std::uint8_t>& body, std::size_t& pos) {
  const std::uint16_t length = read_u16(body, pos);
  if (pos + length > body.size()) protocol_error("truncated string");
  std::string value(body.begin() + static_cast<std::ptrdiff_t>(pos),
                    body.begin() + static_cast<std::ptrdiff_t>(pos + length));
  pos += length;
  return value;
}

}  // namespace

std::vector<std::uint8_t> encode_packet(const Packet& packet) {
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>(static_cast<std::uint8_t>(packet.type) << 4 |
                                          (packet.flags & 0x0F)));
  std::size_t remaining = packet.body.size();
  if (remaining > 268435455) protocol_error("packet too large");
  do {  // remaining-length varint, 7 bits per byte
    std::uint8_t byte = remaining % 128;
    remaining /= 128;
    if (remaining > 0) byte |= 0x80;
    out.push_back(byte);
  } while (remaining > 0);
  out.insert(out.end(), packet.body.begin(), packet.body.end());
  return out;
}

std::optional<std::pair<Packet, std::size_t>> decode_packet(const std::uint8_t* data,
                                                            std::size_t size) {
  if (size < 2) return std::nullopt;
  Packet packet;
  const std::uint8_t type_byte = data[0] >> 4;
  if (type_byte < 1 || type_byte > 14) protocol_error("unknown packet type");
  packet.type = static_cast<PacketType>(type_byte);
  packet.flags = data[0] & 0x0F;

  std::size_t remaining = 0;
  std::size_t multiplier = 1;
  std::size_t pos = 1;
  for (;;) {
    if (pos >= size) return std::nullopt;
    const std::uint8_t byte = data[pos++];
    remaining += static_cast<std::size_t>(byte & 0x7F) * multiplier;
    if ((byte & 0x80) == 0) break;
    multiplier *= 128;
    if (multiplier > 128 * 128 * 128) protocol_error("remaining length varint too long");
  }
  if (pos + remaining > size) return std::nullopt;
  packet.body.assign(data + pos, data + pos + remaining);
  return std::make_pair(std::move(packet), pos + remaining);
}

Packet make_connect(const std::string& client_id, std::uint16_t keepalive_s, bool clean_session) {
  Packet packet;
  packet.type = PacketType::Connect;
  append_string(packet.body, "MQTT");
  packet.body.push_back(4);  // protocol level 3.1.1
  packet.body.push_back(clean_session ? 0x02 : 0x00);
  append_u16(packet.body, keepalive_s);
  append_string(packet.body, client_id);
  return packet;
}

Packet make_publish(const std::string& topic, const std::string& payload,
                    std::uint16_t packet_id, bool duplicate) {
  Packet packet;
  packet.type = PacketType::Publish;
  packet.flags = static_cast<std::uint8_t>(0x02 | (duplicate ? 0x08 : 0x00));  // QoS 1
  append_string(packet.body, topic);
  append_u16(packet.body, packet_id);
  packet.body.insert(packet.body.end(), payload.begin(), payload.end());
  return packet;
}

Packet make_puback(std::uint16_t packet_id) {
  Packet packet;
  packet.type = PacketType::Puback;
  append_u16(packet.body, packet_id);
  return packet;
}

Packet make_subscribe(const std::string& topic, std::uint16_t packet_id) {
  Packet packet;
  packet.type = PacketType::Subscribe;
  packet.flags = 0x02;  // mandated reserved bits
  append_u16(packet.body, packet_id);
  append_string(packet.body, topic);
  packet.body.push_back(1);  // requested QoS
  return packet;
}

Packet make_pingreq() { return Packet{PacketType::Pingreq, 0, {}}; }

Packet make_disconnect() { return Packet{PacketType::Disconnect, 0, {}}; }

PublishView parse_publish(const Packet& packet) {
  if (packet.type != PacketType::Publish) protocol_error("not a publish packet");
  PublishView view;
  view.qos = (packet.flags >> 1) & 0x03;
  if (view.qos > 2) protocol_error("invalid QoS");
  std::size_t pos = 0;
  view.topic = read_string(packet.body, pos);
  if (view.qos > 0) view.packet_id = read_u16(packet.body, pos);
  view.payload.assign(packet.body.begin() + static_cast<std::ptrdiff_t>(pos), packet.body.end());
  return view;
}

std::uint16_t parse_packet_id(const Packet& packet) {
  std::size_t pos = 0;
  return read_u16(packet.body, pos);
}

// --- blocking TCP client --------------------------------------------------------

MqttClient::MqttClient(MqttOptions options) : options_(std::move(options)) {}

MqttClient::~MqttClient() {
  if (fd_ >= 0) {
    try {
      disconnect();
    } catch (...) {
    }
  }
}

void MqttClient::connect() {
  int backoff_ms = 250;
  for (int attempt = 1;; ++attempt) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* results = nullptr;
    const std::string port = std::to_string(options_.port);
    if (getaddrinfo(options_.host.c_str(), port.c_str(), &hints, &results) == 0) {
      for (addrinfo* entry = results; entry != nullptr; entry = entry->ai_next) {
        const int fd = ::socket(entry->ai_family, entry->ai_socktype, entry->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, entry->ai_addr, entry->ai_addrlen) == 0) {
          fd_ = fd;
          break;
        }
        ::close(fd);
      }
      freeaddrinfo(results);
    }
    if (fd_ >= 0) break;
    if (attempt >= options_.connect_attempts)
      throw NetError(NetError::Kind::BrokerDisconnected,
                     "broker " + options_.host + ":" + port + " unreachable after " +
                         std::to_string(attempt) + " attempts");
    std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
    backoff_ms = std::min(backoff_ms * 2, 4000);
  }

  send_packet(make_connect(options_.client_id, options_.keepalive_s, false));
  // wait for CONNACK
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  while (std::chrono::steady_clock::now() < deadline) {
    if (pump(options_.io_timeout_ms)) {
      // CONNACK is consumed by handle_packet; a live socket is good enough here
      break;
    }
  }

  for (const std::string& topic : subscriptions_)
    send_packet(make_subscribe(topic, next_packet_id_++));
  for (auto& [packet_id, packet] : unacked_publishes_) {
    packet.flags |= 0x08;  // DUP on resend
    send_packet(packet);
  }
}

void MqttClient::disconnect() {
  if (fd_ < 0) return;
  send_packet(make_disconnect());
  ::close(fd_);
  fd_ = -1;
}

void MqttClient::reconnect() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  inbound_.clear();
  connect();
}

void MqttClient::send_packet(const Packet& packet) {
  if (fd_ < 0) throw NetError(NetError::Kind::BrokerDisconnected, "not connected");
  const std::vector<std::uint8_t> bytes = encode_packet(packet);
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) {
      reconnect();
      return;
    }
    sent += static_cast<std::size_t>(n);
  }
}

void MqttClient::publish(const std::string& topic, const std::string& payload) {
  const std::uint16_t packet_id = next_packet_id_++;
  if (next_packet_id_ == 0) next_packet_id_ = 1;
  const Packet packet = make_publish(topic, payload, packet_id, false);
  unacked_publishes_[packet_id] = packet;
  send_packet(packet);
}

void MqttClient::subscribe(const std::string& topic) {
  subscriptions_.push_back(topic);
  if (fd_ >= 0) send_packet(make_subscribe(topic, next_packet_id_++));
}

std::optional<BusMessage> MqttClient::peek() {
  if (delivery_queue_.empty()) pump(options_.io_timeout_ms);
  if (delivery_queue_.empty()) return std::nullopt;
  return delivery_queue_.front().first;
}

void MqttClient::ack() {
  if (delivery_queue_.empty()) return;
  const std::uint16_t packet_id = delivery_queue_.front().second;
  delivery_queue_.pop_front();
  if (packet_id != 0) send_packet(make_puback(packet_id));
}

bool MqttClient::pump(int timeout_ms) {
  if (fd_ < 0) throw NetError(NetError::Kind::BrokerDisconnected, "not connected");
  pollfd pfd{fd_, POLLIN, 0};
  const int ready = ::poll(&pfd, 1, timeout_ms);
  if (ready <= 0) return false;

  std::uint8_t buffer[4096];
  const ssize_t n = ::recv(fd_, buffer, sizeof(buffer), 0);
  if (n <= 0) {
    reconnect();
    return false;
  }
  inbound_.insert(inbound_.end(), buffer, buffer + n);

  bool dispatched = false;
  for (;;) {
    const auto decoded = decode_packet(inbound_.data(), inbound_.size());
    if (!decoded.has_value()) break;
    handle_packet(decoded->first);
    inbound_.erase(inbound_.begin(),
                   inbound_.begin() + static_cast<std::ptrdiff_t>(decoded->second));
    dispatched = true;
  }
  return dispatched;
}

void MqttClient::handle_packet(const Packet& packet) {
  switch (packet.type) {
    case PacketType::Publish: {
      const PublishView view = parse_publish(packet);
      delivery_queue_.push_back({BusMessage{view.topic, view.payload}, view.packet_id});
      if (view.qos == 0) {
        // nothing to ack on the wire; keep the zero id so ack() skips PUBACK
      }
      break;
    }
    case PacketType::Puback:
      unacked_publishes_.erase(parse_packet_id(packet));
      break;
    case PacketType::Pingresp:
    case PacketType::Connack:
    case PacketType::Suback:
      break;
    default:
      break;
  }
}

}  // namespace aifml::net::mqtt
