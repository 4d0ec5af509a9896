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

#ifndef FEDGBT_WIRE_H_
#define FEDGBT_WIRE_H_

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedgbt/crypto_suite.h"
#include "fedgbt/finite_field.h"

namespace fedgbt {

inline constexpr uint16_t kWireVersion = 1;

enum class Role : uint8_t { kUser = 1, kEdge = 2, kCentral = 3 };

// Users are numbered within their domain starting at 1; that number is also
// their Shamir holder index. Edge j is {kEdge, j, j}; central is {kCentral, 0, 0}.
struct ParticipantId {
  Role role = Role::kUser;
  uint32_t domain = 0;
  uint32_t index = 0;

  static ParticipantId User(uint32_t domain, uint32_t index) {
    return {Role::kUser, domain, index};
  }
  static ParticipantId Edge(uint32_t domain) { return {Role::kEdge, domain, domain}; }
  static ParticipantId Central() { return {Role::kCentral, 0, 0}; }

  std::string ToString() const;
  friend auto operator<=>(const ParticipantId&, const ParticipantId&) = default;
};

// Stable numeric tags; the hundreds digit names the protocol step.
enum class MessageKind : uint16_t {
  kPublishParams = 100,
  kCandidateList = 101,
  kRoundCommit = 102,
  kRosterAnnounce = 200,
  kKeyAdvertise = 201,
  kRosterKeys = 203,
  kMaskKeyShare = 300,
  kRosterFreeze = 301,
  kLevelRequest = 400,
  kSelfMaskShare = 402,
  kMaskedUpload = 403,
  kRecoveryRequest = 404,
  kRecoveryShare = 405,
  kDomainAggregate = 406,
  kSplitDecision = 407,
  kThresholdShare = 500,
  kFeatureShare = 501,
  kBlindingShare = 502,
  kReshare = 503,
  kReducedShare = 504,
  kResultShare = 505,
  kComparisonShare = 506,
  kTreePublish = 507,
};

std::string_view MessageKindName(MessageKind kind);

// What a payload carries. The outer class describes the bytes on the wire;
// the inner class describes the plaintext under a ciphertext (equal to the
// outer class for unencrypted payloads).
enum class PayloadClass : uint8_t {
  kControl = 1,
  kPublicKey = 2,
  kSignature = 3,
  kCiphertext = 4,
  kShare = 5,
  kMaskedValue = 6,
  kDomainAggregate = 7,
  kCandidateList = 8,
  kLeafWeights = 9,
  kRawGradient = 10,
  kRawThreshold = 11,
};

std::string_view PayloadClassName(PayloadClass c);

struct Envelope {
  ParticipantId sender;
  ParticipantId receiver;
  MessageKind kind = MessageKind::kPublishParams;
  PayloadClass payload_class = PayloadClass::kControl;
  PayloadClass inner_class = PayloadClass::kControl;
  uint64_t round = 0;
  uint64_t sequence = 0;  // per (sender, receiver), assigned by the bus
  Bytes payload;

  // Canonical byte form: header fields big-endian, then the payload.
  Bytes Serialize() const;
  size_t WireSize() const;
};

// Context bound into every AEAD ciphertext.
Bytes CipherContext(const ParticipantId& sender, const ParticipantId& receiver,
                    uint64_t round, MessageKind kind);

class ByteWriter {
 public:
  void U8(uint8_t v) { out_.push_back(v); }
  void U16(uint16_t v);
  void U32(uint32_t v);
  void U64(uint64_t v);
  void F64(double v);
  void Raw(std::span<const uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
  void Blob(std::span<const uint8_t> bytes);
  void Str(std::string_view s);
  void Field(FieldElement e) { U64(e.value); }
  void FieldVector(std::span<const FieldElement> v);
  void Id(const ParticipantId& id);

  const Bytes& bytes() const { return out_; }
  Bytes Take() { return std::move(out_); }

 private:
  Bytes out_;
};

// Throws kFormat on truncated input.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> in) : in_(in) {}

  uint8_t U8();
  uint16_t U16();
  uint32_t U32();
  uint64_t U64();
  double F64();
  Bytes Blob();
  std::string Str();
  FieldElement Field() { return {U64()}; }
  std::vector<FieldElement> FieldVector();
  ParticipantId Id();
  bool done() const { return pos_ == in_.size(); }

 private:
  void Need(size_t n) const;

  std::span<const uint8_t> in_;
  size_t pos_ = 0;
};

}  // namespace fedgbt

#endif  // FEDGBT_WIRE_H_
