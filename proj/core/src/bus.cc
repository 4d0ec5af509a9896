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

#include "fedgbt/bus.h"

#include "fedgbt/error.h"

namespace fedgbt {

MessageBus::MessageBus() : transcript_(new Sha256Hasher) {}

MessageBus::~MessageBus() { delete transcript_; }

void MessageBus::Register(const ParticipantId& id, Handler handler) {
  handlers_[id] = std::move(handler);
  disconnected_.erase(id);
}

void MessageBus::Send(Envelope envelope) {
  ++sent_;
  if (!connected(envelope.sender)) {
    ++discarded_;
    return;
  }
  envelope.sequence = ++sequence_[{envelope.sender, envelope.receiver}];
  transcript_->Update(envelope.Serialize());
  auto& stats = traffic_[envelope.sender];
  ++stats.messages_sent;
  stats.bytes_sent += envelope.WireSize();
  if (observer_) observer_(envelope);
  if (tamper_) tamper_(envelope);
  queue_.push_back(std::move(envelope));
}

size_t MessageBus::DeliverAll() {
  size_t count = 0;
  while (!queue_.empty()) {
    Envelope envelope = std::move(queue_.front());
    queue_.pop_front();
    auto it = handlers_.find(envelope.receiver);
    if (it == handlers_.end()) {
      throw Error(ErrorCode::kRuntime,
                  "no participant registered as " + envelope.receiver.ToString());
    }
    if (!connected(envelope.receiver)) {
      ++discarded_;
      continue;
    }
    auto& stats = traffic_[envelope.receiver];
    ++stats.messages_received;
    stats.bytes_received += envelope.WireSize();
    ++delivered_;
    ++count;
    it->second(envelope);
  }
  return count;
}

void MessageBus::Disconnect(const ParticipantId& id) { disconnected_.insert(id); }

TrafficStats MessageBus::traffic(const ParticipantId& id) const {
  auto it = traffic_.find(id);
  return it == traffic_.end() ? TrafficStats{} : it->second;
}

std::array<uint8_t, 32> MessageBus::TranscriptHash() const {
  return transcript_->Peek();
}

}  // namespace fedgbt
