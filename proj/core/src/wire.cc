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

#include "fedgbt/wire.h"

#include <bit>
#include <cstring>

#include "fedgbt/error.h"

namespace fedgbt {

std::string ParticipantId::ToString() const {
  switch (role) {
    case Role::kUser:
      return "user(" + std::to_string(domain) + "," + std::to_string(index) + ")";
    case Role::kEdge:
      return "edge(" + std::to_string(domain) + ")";
    case Role::kCentral:
      return "central";
  }
  return "unknown";
}

std::string_view MessageKindName(MessageKind kind) {
  switch (kind) {
    case MessageKind::kPublishParams: return "PublishParams";
    case MessageKind::kCandidateList: return "CandidateList";
    case MessageKind::kRoundCommit: return "RoundCommit";
    case MessageKind::kRosterAnnounce: return "RosterAnnounce";
    case MessageKind::kKeyAdvertise: return "KeyAdvertise";
    case MessageKind::kRosterKeys: return "RosterKeys";
    case MessageKind::kMaskKeyShare: return "MaskKeyShare";
    case MessageKind::kRosterFreeze: return "RosterFreeze";
    case MessageKind::kLevelRequest: return "LevelRequest";
    case MessageKind::kSelfMaskShare: return "SelfMaskShare";
    case MessageKind::kMaskedUpload: return "MaskedUpload";
    case MessageKind::kRecoveryRequest: return "RecoveryRequest";
    case MessageKind::kRecoveryShare: return "RecoveryShare";
    case MessageKind::kDomainAggregate: return "DomainAggregate";
    case MessageKind::kSplitDecision: return "SplitDecision";
    case MessageKind::kThresholdShare: return "ThresholdShare";
    case MessageKind::kFeatureShare: return "FeatureShare";
    case MessageKind::kBlindingShare: return "BlindingShare";
    case MessageKind::kReshare: return "Reshare";
    case MessageKind::kReducedShare: return "ReducedShare";
    case MessageKind::kResultShare: return "ResultShare";
    case MessageKind::kComparisonShare: return "ComparisonShare";
    case MessageKind::kTreePublish: return "TreePublish";
  }
  return "Unknown";
}

std::string_view PayloadClassName(PayloadClass c) {
  switch (c) {
    case PayloadClass::kControl: return "control";
    case PayloadClass::kPublicKey: return "public-key";
    case PayloadClass::kSignature: return "signature";
    case PayloadClass::kCiphertext: return "ciphertext";
    case PayloadClass::kShare: return "share";
    case PayloadClass::kMaskedValue: return "masked-value";
    case PayloadClass::kDomainAggregate: return "domain-aggregate";
    case PayloadClass::kCandidateList: return "candidate-list";
    case PayloadClass::kLeafWeights: return "leaf-weights";
    case PayloadClass::kRawGradient: return "raw-gradient";
    case PayloadClass::kRawThreshold: return "raw-threshold";
  }
  return "unknown";
}

namespace {

constexpr size_t kHeaderSize = 2 + 2 * 9 + 2 + 1 + 1 + 8 + 8 + 4;

}  // namespace

Bytes Envelope::Serialize() const {
  ByteWriter w;
  w.U16(kWireVersion);
  w.Id(sender);
  w.Id(receiver);
  w.U16(static_cast<uint16_t>(kind));
  w.U8(static_cast<uint8_t>(payload_class));
  w.U8(static_cast<uint8_t>(inner_class));
  w.U64(round);
  w.U64(sequence);
  w.Blob(payload);
  return w.Take();
}

size_t Envelope::WireSize() const { return kHeaderSize + payload.size(); }

Bytes CipherContext(const ParticipantId& sender, const ParticipantId& receiver,
                    uint64_t round, MessageKind kind) {
  ByteWriter w;
  w.Id(sender);
  w.Id(receiver);
  w.U64(round);
  w.U16(static_cast<uint16_t>(kind));
  return w.Take();
}

void ByteWriter::U16(uint16_t v) {
  U8(static_cast<uint8_t>(v >> 8));
  U8(static_cast<uint8_t>(v));
}

void ByteWriter::U32(uint32_t v) {
  for (int i = 3; i >= 0; --i) U8(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::U64(uint64_t v) {
  for (int i = 7; i >= 0; --i) U8(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::F64(double v) { U64(std::bit_cast<uint64_t>(v)); }

void ByteWriter::Blob(std::span<const uint8_t> bytes) {
  U32(static_cast<uint32_t>(bytes.size()));
  Raw(bytes);
}

void ByteWriter::Str(std::string_view s) {
  Blob(std::span(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
}

void ByteWriter::FieldVector(std::span<const FieldElement> v) {
  U32(static_cast<uint32_t>(v.size()));
  out_.reserve(out_.size() + 8 * v.size());
  for (auto e : v) U64(e.value);
}

void ByteWriter::Id(const ParticipantId& id) {
  U8(static_cast<uint8_t>(id.role));
  U32(id.domain);
  U32(id.index);
}

void ByteReader::Need(size_t n) const {
  if (in_.size() - pos_ < n) throw Error(ErrorCode::kFormat, "truncated payload");
}

uint8_t ByteReader::U8() {
  Need(1);
  return in_[pos_++];
}

uint16_t ByteReader::U16() {
  Need(2);
  uint16_t v = static_cast<uint16_t>((in_[pos_] << 8) | in_[pos_ + 1]);
  pos_ += 2;
  return v;
}

uint32_t ByteReader::U32() {
  Need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

uint64_t ByteReader::U64() {
  Need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

double ByteReader::F64() { return std::bit_cast<double>(U64()); }

Bytes ByteReader::Blob() {
  uint32_t n = U32();
  Need(n);
  Bytes out(in_.begin() + pos_, in_.begin() + pos_ + n);
  pos_ += n;
  return out;
}

std::string ByteReader::Str() {
  Bytes b = Blob();
  return std::string(b.begin(), b.end());
}

std::vector<FieldElement> ByteReader::FieldVector() {
  uint32_t n = U32();
  Need(static_cast<size_t>(n) * 8);
  std::vector<FieldElement> out(n);
  for (auto& e : out) e.value = U64();
  return out;
}

ParticipantId ByteReader::Id() {
  ParticipantId id;
  uint8_t role = U8();
  if (role < 1 || role > 3) throw Error(ErrorCode::kFormat, "bad role tag");
  id.role = static_cast<Role>(role);
  id.domain = U32();
  id.index = U32();
  return id;
}

}  // namespace fedgbt
