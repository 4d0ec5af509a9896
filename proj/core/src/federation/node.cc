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

#include <cmath>

#include "federation/nodes.h"
#include "fedgbt/error.h"

namespace fedgbt {

uint32_t DefaultUserThreshold(uint32_t roster_size) {
  if (roster_size == 0) return 0;
  return std::min(roster_size / 2 + roster_size % 2 + 1, roster_size);
}

uint32_t DefaultEdgeThreshold(uint32_t edges) { return edges / 2 + edges % 2; }

std::string DropoutCaseName(DropoutCase c) {
  switch (c) {
    case DropoutCase::kBeforeUpload: return "before_upload";
    case DropoutCase::kDuringSecFind: return "during_secfind";
    case DropoutCase::kDuringSecPred: return "during_secpred";
  }
  return "unknown";
}

namespace internal {
namespace {

uint64_t IdIndex(const ParticipantId& id) {
  return (static_cast<uint64_t>(id.role) << 56) | (static_cast<uint64_t>(id.domain) << 28) |
         id.index;
}

}  // namespace

Context::Context(const FederationConfig& config, CandidateSchema schema, uint32_t feature_count,
                 uint32_t class_count, const CostModel& cost)
    : config(config),
      field(config.field_modulus),
      codec(field, config.fractional_bits),
      scheme(field),
      params(KeySetup(config.security_parameter)),
      schema(std::move(schema)),
      feature_count(feature_count),
      class_count(class_count),
      outputs(OutputCount(config.loss, static_cast<int>(class_count))),
      edge_threshold(config.edge_threshold != 0 ? config.edge_threshold
                                                : DefaultEdgeThreshold(config.edges)),
      cost(cost) {}

void WriteTree(ByteWriter& w, const PublicTree& tree) {
  w.U32(tree.key.round);
  w.U32(tree.key.output);
  w.U32(static_cast<uint32_t>(tree.nodes.size()));
  for (const auto& n : tree.nodes) {
    w.U8(n.leaf ? 1 : 0);
    w.U32(n.feature);
    w.U32(static_cast<uint32_t>(n.left));
    w.U32(static_cast<uint32_t>(n.right));
    w.U32(static_cast<uint32_t>(n.depth));
    w.F64(n.weight);
  }
}

PublicTree ReadTree(ByteReader& r) {
  PublicTree tree;
  tree.key.round = r.U32();
  tree.key.output = r.U32();
  const uint32_t count = r.U32();
  for (uint32_t i = 0; i < count; ++i) {
    CartNode n;
    n.leaf = r.U8() != 0;
    n.feature = r.U32();
    n.left = static_cast<int32_t>(r.U32());
    n.right = static_cast<int32_t>(r.U32());
    n.depth = static_cast<int32_t>(r.U32());
    n.weight = r.F64();
    if (!n.leaf && (n.left <= 0 || n.right <= 0 || static_cast<uint32_t>(n.left) >= count ||
                    static_cast<uint32_t>(n.right) >= count)) {
      throw Error(ErrorCode::kFormat, "tree child index out of range");
    }
    tree.nodes.push_back(n);
  }
  return tree;
}

Bytes AdvertMessage(const ParticipantId& user, uint64_t epoch, std::span<const uint8_t> mask_pub,
                    std::span<const uint8_t> ek_pub) {
  ByteWriter w;
  w.Str("advertise");
  w.Id(user);
  w.U64(epoch);
  w.Blob(mask_pub);
  w.Blob(ek_pub);
  return w.Take();
}

std::vector<uint32_t> ReadIndices(ByteReader& r) {
  std::vector<uint32_t> out(r.U32());
  for (auto& v : out) v = r.U32();
  return out;
}

void WriteIndices(ByteWriter& w, std::span<const uint32_t> indices) {
  w.U32(static_cast<uint32_t>(indices.size()));
  for (uint32_t v : indices) w.U32(v);
}

Node::Node(Context& ctx, ParticipantId id)
    : ctx_(ctx), id_(id), rng_(Rng::Derive(ctx.config.seed, "participant", IdIndex(id))),
      meter_(&ctx.cost) {
  ctx_.bus.Register(id_, [this](const Envelope& e) { Receive(e); });
}

void Node::Receive(const Envelope& envelope) {
  Charge(Primitive::kMessage, 1);
  Charge(Primitive::kMessageByte, static_cast<double>(envelope.WireSize()));
  try {
    Handle(envelope);
  } catch (const Error& e) {
    // Unauthenticated or malformed traffic is dropped; the protocol treats
    // the sender as silent for this message.
    if (e.code() != ErrorCode::kAuthentication && e.code() != ErrorCode::kFormat &&
        e.code() != ErrorCode::kKey) {
      throw;
    }
    ++ctx_.auth_failures;
    ctx_.log.push_back(id_.ToString() + " rejected " +
                       std::string(MessageKindName(envelope.kind)) + " from " +
                       envelope.sender.ToString() + ": " + e.what());
  }
}

void Node::Send(const ParticipantId& to, MessageKind kind, PayloadClass outer,
                PayloadClass inner, Bytes payload, uint64_t round) {
  Envelope e;
  e.sender = id_;
  e.receiver = to;
  e.kind = kind;
  e.payload_class = outer;
  e.inner_class = inner;
  e.round = round;
  e.payload = std::move(payload);
  Charge(Primitive::kMessage, 1);
  Charge(Primitive::kMessageByte, static_cast<double>(e.WireSize()));
  ctx_.bus.Send(std::move(e));
}

Bytes Node::Seal(const SharedKey& key, std::span<const uint8_t> plain, const ParticipantId& to,
                 uint64_t round, MessageKind kind) {
  Charge(Primitive::kAeadCall, 1);
  Charge(Primitive::kAeadByte, static_cast<double>(plain.size()));
  return AeadEncrypt(key, plain, CipherContext(id_, to, round, kind), rng_).Serialize();
}

Bytes Node::Open(const SharedKey& key, std::span<const uint8_t> sealed, const ParticipantId& from,
                 uint64_t round, MessageKind kind) {
  Ciphertext c = Ciphertext::Parse(sealed);
  Charge(Primitive::kAeadCall, 1);
  Charge(Primitive::kAeadByte, static_cast<double>(c.body.size()));
  return AeadDecrypt(key, c, CipherContext(from, id_, round, kind));
}

SharedKey Node::Agree(const KeyPair& mine, std::span<const uint8_t> their_public) {
  Charge(Primitive::kKeyAgree, 1);
  return KeyAgree(ctx_.params, mine.private_key, their_public);
}

void Node::ChargeSharing(size_t secrets, size_t holders, uint32_t t) {
  Charge(Primitive::kShareTerm, static_cast<double>(secrets) * holders * t);
}

}  // namespace internal
}  // namespace fedgbt
