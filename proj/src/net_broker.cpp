#include "aifml/net/broker.hpp"

#include <algorithm>

namespace aifml::net {

void InProcBroker::publish(const std::string& topic, const std::string& payload) {
  const BusMessage message{topic, payload};
  if (tap_) tap_(message);
  const auto it = subscribers_.find(topic);
  if (it == subscribers_.end()) return;
  for (const std::string& client_id : it->second) {
    const int copies = schedule_ ? schedule_(message, client_id) : 1;
    for (int i = 0; i < copies; ++i) queues_[client_id].push_back(message);
  }
}

void InProcBroker::subscribe(const std::string& client_id, const std::string& topic) {
  auto& clients = subscribers_[topic];
  if (std::find(clients.begin(), clients.end(), client_id) == clients.end())
    clients.push_back(client_id);
  queues_.try_emplace(client_id);  // queue persists across re-subscription
}

std::optional<BusMessage> InProcBroker::peek(const std::string& client_id) {
  const auto it = queues_.find(client_id);
  if (it == queues_.end() || it->second.empty()) return std::nullopt;
  return it->second.front();
}

void InProcBroker::ack(const std::string& client_id) {
  const auto it = queues_.find(client_id);
  if (it != queues_.end() && !it->second.empty()) it->second.pop_front();
}

std::size_t InProcBroker::pending(const std::string& client_id) const {
  const auto it = queues_.find(client_id);
  return it == queues_.end() ? 0 : it->second.size();
}

bool InProcBroker::quiescent() const {
  for (const auto& [client_id, queue] : queues_)
    if (!queue.empty()) return false;
  return true;
}

}  // namespace aifml::net
