/*
 * Copyright 2026 The fedgbt Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FEDGBT_BUS_H_
#define FEDGBT_BUS_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <utility>

#include "fedgbt/crypto_suite.h"
#include "fedgbt/wire.h"

namespace fedgbt {

struct TrafficStats {
  uint64_t messages_sent = 0;
  uint64_t bytes_sent = 0;
  uint64_t messages_received = 0;
  uint64_t bytes_received = 0;
};

// Single-process, in-order message bus. Messages are delivered FIFO in send
// order; handlers may send while being delivered. Anything to or from a
// disconnected participant is discarded and counted, so
// sent == delivered + discarded once the queue drains.
class MessageBus {
 public:
  using Handler = std::function<void(const Envelope&)>;
  using Observer = std::function<void(const Envelope&)>;
  using Tamper = std::function<void(Envelope&)>;

  MessageBus();
  ~MessageBus();
  MessageBus(const MessageBus&) = delete;
  MessageBus& operator=(const MessageBus&) = delete;

  void Register(const ParticipantId& id, Handler handler);
  bool registered(const ParticipantId& id) const { return handlers_.contains(id); }

  void Send(Envelope envelope);
  // Delivers until the queue is empty; returns the number delivered.
  size_t DeliverAll();

  void Disconnect(const ParticipantId& id);
  bool connected(const ParticipantId& id) const { return !disconnected_.contains(id); }

  // Called for every accepted send, before delivery.
  void SetObserver(Observer observer) { observer_ = std::move(observer); }
  // Test hook: may modify envelopes in transit (after hashing).
  void SetTamper(Tamper tamper) { tamper_ = std::move(tamper); }

  uint64_t sent() const { return sent_; }
  uint64_t delivered() const { return delivered_; }
  uint64_t discarded() const { return discarded_; }
  size_t pending() const { return queue_.size(); }
  const std::map<ParticipantId, TrafficStats>& traffic() const { return traffic_; }
  TrafficStats traffic(const ParticipantId& id) const;

  // SHA-256 over every accepted envelope in send order.
  std::array<uint8_t, 32> TranscriptHash() const;

 private:
  std::map<ParticipantId, Handler> handlers_;
  std::set<ParticipantId> disconnected_;
  std::map<std::pair<ParticipantId, ParticipantId>, uint64_t> sequence_;
  std::deque<Envelope> queue_;
  std::map<ParticipantId, TrafficStats> traffic_;
  Observer observer_;
  Tamper tamper_;
  Sha256Hasher* transcript_;
  uint64_t sent_ = 0;
  uint64_t delivered_ = 0;
  uint64_t discarded_ = 0;
};

}  // namespace fedgbt

#endif  // FEDGBT_BUS_H_
