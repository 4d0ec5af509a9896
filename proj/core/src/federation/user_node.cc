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

#include <algorithm>
#include <numeric>

#include "federation/nodes.h"
#include "fedgbt/error.h"

namespace fedgbt::internal {
namespace {

std::vector<uint32_t> EdgeRoster(uint32_t edges) {
  std::vector<uint32_t> roster(edges);
  std::iota(roster.begin(), roster.end(), 1u);
  return roster;
}

std::string LevelTag(const TreeKey& key, uint32_t level) {
  return "r" + std::to_string(key.round) + "c" + std::to_string(key.output) + "d" +
         std::to_string(level);
}

Bytes LimbBytes(std::span<const Share> shares) {
  ByteWriter w;
  std::vector<FieldElement> limbs;
  for (const auto& s : shares) limbs.push_back(s.value);
  w.FieldVector(limbs);
  return w.Take();
}

std::vector<Share> ReadLimbs(ByteReader& r, uint32_t holder) {
  std::vector<Share> out;
  for (const auto& v : r.FieldVector()) out.push_back({holder, v});
  return out;
}

}  // namespace

UserNode::UserNode(Context& ctx, ParticipantId id, Dataset data, KeyPair sign_key)
    : Node(ctx, id),
      data_(std::move(data)),
      x_(data_),
      sign_key_(std::move(sign_key)),
      edge_(ParticipantId::Edge(id.domain)),
      margins_(data_.size(), std::vector<double>(ctx.outputs, 0.0)),
      pending_(margins_) {}

void UserNode::GenerateEncryptionKey() {
  Charge(Primitive::kKeyGen, 1);
  ek_ = KeyGen(ctx_.params, KeyPurpose::kEncrypt, rng_);
}

void UserNode::ForgeSignatures() { sign_key_ = KeyGen(ctx_.params, KeyPurpose::kSign, rng_); }

void UserNode::Handle(const Envelope& env) {
  switch (env.kind) {
    case MessageKind::kPublishParams: {
      ByteReader r(env.payload);
      r.U32();
      const uint64_t modulus = r.U64();
      const uint32_t frac = r.U32();
      if (modulus != ctx_.field.modulus() ||
          static_cast<int>(frac) != ctx_.codec.fractional_bits()) {
        throw Error(ErrorCode::kConfiguration, "published parameters disagree with local setup");
      }
      return;
    }
    case MessageKind::kCandidateList: {
      ByteReader r(env.payload);
      if (r.U32() != ctx_.schema.feature_count()) {
        throw Error(ErrorCode::kConfiguration, "candidate list has the wrong feature count");
      }
      return;
    }
    case MessageKind::kRosterAnnounce: return OnRosterAnnounce(env);
    case MessageKind::kRosterKeys: return OnRosterKeys(env);
    case MessageKind::kMaskKeyShare: return OnMaskKeyShare(env);
    case MessageKind::kRosterFreeze: return OnRosterFreeze(env);
    case MessageKind::kLevelRequest: return OnLevelRequest(env);
    case MessageKind::kSelfMaskShare: return OnSelfMaskShare(env);
    case MessageKind::kRecoveryRequest: return OnRecoveryRequest(env);
    case MessageKind::kSplitDecision: return OnSplitDecision(env);
    case MessageKind::kTreePublish: return OnTreePublish(env);
    case MessageKind::kComparisonShare: return OnComparisonShare(env);
    case MessageKind::kRoundCommit: return OnRoundCommit(env);
    default:
      throw Error(ErrorCode::kRuntime, "user cannot handle " +
                                           std::string(MessageKindName(env.kind)));
  }
}

void UserNode::OnRosterAnnounce(const Envelope& env) {
  ByteReader r(env.payload);
  epoch_ = r.U64();
  auto selected = ReadIndices(r);
  in_round_ = std::find(selected.begin(), selected.end(), id_.index) != selected.end();
  threshold_ = 0;
  peer_mask_pub_.clear();
  peer_ek_pub_.clear();
  frozen_.clear();
  keyring_ = MaskKeyring{};
  level_values_.clear();
  level_seed_shares_.clear();
  if (!in_round_) return;

  keyring_.owner = id_.index;
  Charge(Primitive::kKeyGen, 1);
  keyring_.mask_key = KeyGen(ctx_.params, KeyPurpose::kMask, rng_);
  Charge(Primitive::kSign, 1);
  Bytes sig = Sign(sign_key_, AdvertMessage(id_, epoch_, keyring_.mask_key.public_key,
                                             ek_.public_key));
  ByteWriter w;
  w.Blob(keyring_.mask_key.public_key);
  w.Blob(ek_.public_key);
  w.Blob(sig);
  Send(edge_, MessageKind::kKeyAdvertise, PayloadClass::kPublicKey, PayloadClass::kPublicKey,
       w.Take(), epoch_);
}

void UserNode::OnRosterKeys(const Envelope& env) {
  if (!in_round_) return;
  ByteReader r(env.payload);
  if (r.U64() != epoch_) return;
  threshold_ = r.U32();
  const uint32_t count = r.U32();
  std::vector<uint32_t> roster;
  bool ok = true;
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t index = r.U32();
    Bytes mask_pub = r.Blob();
    Bytes ek_pub = r.Blob();
    Bytes sig = r.Blob();
    const ParticipantId peer = ParticipantId::User(id_.domain, index);
    if (index == id_.index) {
      ok = ok && mask_pub == keyring_.mask_key.public_key && ek_pub == ek_.public_key;
    } else {
      Charge(Primitive::kVerify, 1);
      auto vk = ctx_.verify_keys.find(peer);
      ok = ok && vk != ctx_.verify_keys.end() &&
           Verify(vk->second, AdvertMessage(peer, epoch_, mask_pub, ek_pub), sig);
    }
    peer_mask_pub_[index] = std::move(mask_pub);
    peer_ek_pub_[index] = std::move(ek_pub);
    roster.push_back(index);
  }
  if (!ok) {
    ++ctx_.auth_failures;
    ctx_.log.push_back(id_.ToString() + " rejected the roster key list and leaves the round");
    in_round_ = false;
    return;
  }

  Charge(Primitive::kKeyAgree, static_cast<double>(roster.size() - 1));
  keyring_.AgreeWithPeers(ctx_.params, peer_mask_pub_);
  keyring_.mask_key_shares_out =
      ShareBytes(ctx_.scheme, keyring_.mask_key.private_key, threshold_, roster, rng_);
  ChargeSharing(keyring_.mask_key_shares_out.begin()->second.size(), roster.size(), threshold_);
  for (const auto& [holder, shares] : keyring_.mask_key_shares_out) {
    if (holder == id_.index) {
      keyring_.mask_key_shares_held[holder] = shares;
      continue;
    }
    const ParticipantId to = ParticipantId::User(id_.domain, holder);
    ByteWriter w;
    w.U32(holder);
    w.U32(id_.index);
    w.Blob(Seal(PeerEncryptionKey(holder), LimbBytes(shares), to, epoch_,
                MessageKind::kMaskKeyShare));
    Send(edge_, MessageKind::kMaskKeyShare, PayloadClass::kCiphertext, PayloadClass::kShare,
         w.Take(), epoch_);
  }
}

SharedKey UserNode::PeerEncryptionKey(uint32_t peer) {
  const Bytes& pub = peer_ek_pub_.at(peer);
  auto it = ek_cache_pub_.find(peer);
  if (it == ek_cache_pub_.end() || it->second != pub) {
    ek_cache_[peer] = Agree(ek_, pub);
    ek_cache_pub_[peer] = pub;
  }
  return ek_cache_.at(peer);
}

void UserNode::OnMaskKeyShare(const Envelope& env) {
  if (!in_round_) return;
  ByteReader r(env.payload);
  const uint32_t dest = r.U32();
  const uint32_t origin = r.U32();
  Bytes sealed = r.Blob();
  if (dest != id_.index || !peer_ek_pub_.contains(origin)) return;
  Bytes plain = Open(PeerEncryptionKey(origin), sealed, ParticipantId::User(id_.domain, origin),
                     epoch_, MessageKind::kMaskKeyShare);
  ByteReader pr(plain);
  keyring_.mask_key_shares_held[origin] = ReadLimbs(pr, id_.index);
}

void UserNode::OnRosterFreeze(const Envelope& env) {
  if (!in_round_) return;
  ByteReader r(env.payload);
  if (r.U64() != epoch_) return;
  const bool aborted = r.U8() != 0;
  frozen_ = ReadIndices(r);
  if (aborted || std::find(frozen_.begin(), frozen_.end(), id_.index) == frozen_.end()) {
    in_round_ = false;
    return;
  }
  std::set<uint32_t> keep(frozen_.begin(), frozen_.end());
  std::erase_if(keyring_.pairwise_keys, [&](const auto& kv) { return !keep.contains(kv.first); });
  std::erase_if(keyring_.mask_key_shares_held,
                [&](const auto& kv) { return !keep.contains(kv.first); });
}

void UserNode::ComputeGradients() {
  gradients_.assign(ctx_.outputs, std::vector<GradientPair>(data_.size()));
  for (size_t i = 0; i < data_.size(); ++i) {
    auto g = LossGradients(ctx_.config.loss, margins_[i], data_.instances[i].label);
    for (int c = 0; c < ctx_.outputs; ++c) gradients_[c][i] = g[c];
  }
  Charge(Primitive::kFieldOp, static_cast<double>(data_.size()) * ctx_.outputs * 4);
  gradient_epoch_ = epoch_;
}

void UserNode::OnLevelRequest(const Envelope& env) {
  if (!in_round_) return;
  ByteReader r(env.payload);
  if (r.U64() != epoch_) return;
  TreeKey key;
  key.round = r.U32();
  key.output = r.U32();
  const uint32_t level = r.U32();
  auto features = ReadIndices(r);
  std::vector<int32_t> frontier(r.U32());
  for (auto& n : frontier) n = static_cast<int32_t>(r.U32());

  if (level == 0 || key != tree_) {
    tree_ = key;
    node_of_.assign(data_.size(), 0);
  }
  if (gradient_epoch_ != epoch_) ComputeGradients();
  const auto& grads = gradients_.at(key.output);

  const size_t slots = CandidateSlotCount(ctx_.schema, features);
  level_values_.clear();
  level_values_.reserve(frontier.size() * (3 + 3 * slots));
  std::vector<std::array<int64_t, 3>> slot_sums(slots);
  for (int32_t node : frontier) {
    std::vector<size_t> rows;
    std::vector<std::array<int64_t, 3>> stats;
    std::array<int64_t, 3> total{};
    for (size_t i = 0; i < data_.size(); ++i) {
      if (node_of_[i] != node) continue;
      std::array<int64_t, 3> s = {ctx_.codec.ToFixed(grads[i].g), ctx_.codec.ToFixed(grads[i].h),
                                  1};
      for (int k = 0; k < 3; ++k) total[k] += s[k];
      rows.push_back(i);
      stats.push_back(s);
    }
    AccumulateLeftSums<int64_t>(ctx_.schema, features, x_, rows, stats, slot_sums);
    Charge(Primitive::kFieldOp, static_cast<double>(rows.size() * features.size() + 3 * slots));
    for (int k = 0; k < 3; ++k) level_values_.push_back(ctx_.field.FromSigned(total[k]));
    for (const auto& s : slot_sums) {
      for (int k = 0; k < 3; ++k) level_values_.push_back(ctx_.field.FromSigned(s[k]));
    }
  }

  level_tag_ = LevelTag(key, level);
  rng_.FillBytes(level_seed_);
  level_seed_shares_.clear();
  auto shares = ShareBytes(ctx_.scheme, level_seed_, threshold_, frozen_, rng_);
  ChargeSharing(shares.begin()->second.size(), frozen_.size(), threshold_);
  for (const auto& [holder, limbs] : shares) {
    if (holder == id_.index) {
      level_seed_shares_[holder] = limbs;
      continue;
    }
    const ParticipantId to = ParticipantId::User(id_.domain, holder);
    ByteWriter w;
    w.U32(holder);
    w.U32(id_.index);
    w.Str(level_tag_);
    w.Blob(Seal(PeerEncryptionKey(holder), LimbBytes(limbs), to, epoch_,
                MessageKind::kSelfMaskShare));
    Send(edge_, MessageKind::kSelfMaskShare, PayloadClass::kCiphertext, PayloadClass::kShare,
         w.Take(), epoch_);
  }
}

void UserNode::OnSelfMaskShare(const Envelope& env) {
  if (!in_round_) return;
  ByteReader r(env.payload);
  const uint32_t dest = r.U32();
  const uint32_t origin = r.U32();
  const std::string tag = r.Str();
  Bytes sealed = r.Blob();
  if (dest != id_.index || tag != level_tag_ || !peer_ek_pub_.contains(origin)) return;
  Bytes plain = Open(PeerEncryptionKey(origin), sealed, ParticipantId::User(id_.domain, origin),
                     epoch_, MessageKind::kSelfMaskShare);
  ByteReader pr(plain);
  level_seed_shares_[origin] = ReadLimbs(pr, id_.index);
}

void UserNode::UploadLevel() {
  if (!in_round_ || level_values_.empty()) return;
  auto masked = SecMaskVector(ctx_.field, id_.index, level_values_, level_seed_,
                              keyring_.pairwise_keys, frozen_, epoch_, level_tag_);
  Charge(Primitive::kPrgWord, static_cast<double>(level_values_.size()) * frozen_.size());
  Charge(Primitive::kFieldOp, static_cast<double>(level_values_.size()) * frozen_.size());
  ByteWriter w;
  w.Str(level_tag_);
  w.FieldVector(masked);
  Send(edge_, MessageKind::kMaskedUpload, PayloadClass::kMaskedValue, PayloadClass::kMaskedValue,
       w.Take(), epoch_);
  level_values_.clear();
}

void UserNode::OnRecoveryRequest(const Envelope& env) {
  if (!in_round_) return;
  ByteReader r(env.payload);
  const std::string tag = r.Str();
  auto survivors = ReadIndices(r);
  auto dropped = ReadIndices(r);
  if (tag != level_tag_) return;
  std::set<uint32_t> frozen(frozen_.begin(), frozen_.end());
  std::set<uint32_t> seen;
  for (uint32_t v : survivors) {
    if (!frozen.contains(v) || !seen.insert(v).second) return;
  }
  for (uint32_t v : dropped) {
    // Never reveal both the seed and the mask key of one user.
    if (!frozen.contains(v) || !seen.insert(v).second) return;
  }
  if (std::find(survivors.begin(), survivors.end(), id_.index) == survivors.end()) return;

  ByteWriter w;
  w.Str(tag);
  std::vector<std::pair<uint32_t, const std::vector<Share>*>> seeds;
  for (uint32_t v : survivors) {
    auto it = level_seed_shares_.find(v);
    if (it != level_seed_shares_.end()) seeds.emplace_back(v, &it->second);
  }
  w.U32(static_cast<uint32_t>(seeds.size()));
  for (const auto& [origin, shares] : seeds) {
    w.U32(origin);
    w.Raw(LimbBytes(*shares));
  }
  std::vector<std::pair<uint32_t, const std::vector<Share>*>> keys;
  for (uint32_t v : dropped) {
    auto it = keyring_.mask_key_shares_held.find(v);
    if (it != keyring_.mask_key_shares_held.end()) keys.emplace_back(v, &it->second);
  }
  w.U32(static_cast<uint32_t>(keys.size()));
  for (const auto& [origin, shares] : keys) {
    w.U32(origin);
    w.Raw(LimbBytes(*shares));
  }
  Send(edge_, MessageKind::kRecoveryShare, PayloadClass::kShare, PayloadClass::kShare, w.Take(),
       epoch_);

  // Dropped peers are gone for the rest of the round; their pairwise keys
  // are known to the edge from now on and must not mask anything else.
  frozen_ = survivors;
  std::sort(frozen_.begin(), frozen_.end());
  for (uint32_t v : dropped) {
    keyring_.pairwise_keys.erase(v);
    keyring_.mask_key_shares_held.erase(v);
  }
  level_seed_shares_.clear();
}

void UserNode::ShareFeatures(uint64_t batch_id, const std::vector<uint32_t>& slot_features,
                             Batch& batch, uint64_t round) {
  std::vector<FieldElement> values;
  values.reserve(batch.items.size());
  for (const auto& item : batch.items) {
    values.push_back(ctx_.codec.Encode(x_.at(item.instance, slot_features.at(item.slot))));
  }
  const auto roster = EdgeRoster(ctx_.config.edges);
  auto shares = ctx_.scheme.SplitBatch(values, ctx_.edge_threshold, roster, rng_);
  ChargeSharing(values.size(), roster.size(), ctx_.edge_threshold);
  for (size_t e = 0; e < roster.size(); ++e) {
    ByteWriter w;
    w.U64(batch_id);
    w.U32(static_cast<uint32_t>(batch.items.size()));
    for (size_t k = 0; k < batch.items.size(); ++k) {
      w.U32(batch.items[k].slot);
      w.Field(shares[e][k]);
    }
    Send(ParticipantId::Edge(roster[e]), MessageKind::kFeatureShare, PayloadClass::kShare,
         PayloadClass::kShare, w.Take(), round);
  }
}

void UserNode::OnSplitDecision(const Envelope& env) {
  if (!in_round_) return;
  ByteReader r(env.payload);
  const uint64_t batch_id = r.U64();
  Batch batch;
  std::vector<uint32_t> slot_features;
  const uint32_t count = r.U32();
  for (uint32_t k = 0; k < count; ++k) {
    Split s;
    s.node = static_cast<int32_t>(r.U32());
    slot_features.push_back(r.U32());
    s.left = static_cast<int32_t>(r.U32());
    batch.splits.push_back(s);
  }
  for (uint32_t i = 0; i < data_.size(); ++i) {
    for (uint32_t k = 0; k < count; ++k) {
      if (node_of_[i] == batch.splits[k].node) batch.items.push_back({k, i});
    }
  }
  if (batch.items.empty()) return;
  ShareFeatures(batch_id, slot_features, batch, env.round);
  batches_[batch_id] = std::move(batch);
}

void UserNode::OnTreePublish(const Envelope& env) {
  ByteReader r(env.payload);
  const uint64_t batch_id = r.U64();
  Batch batch;
  batch.predict = true;
  batch.commit_directly = r.U8() != 0;
  const uint32_t tree_count = r.U32();
  for (uint32_t t = 0; t < tree_count; ++t) batch.trees.push_back(ReadTree(r));

  if (!batch.commit_directly && pending_epoch_ != env.round) {
    for (auto& p : pending_) std::fill(p.begin(), p.end(), 0.0);
    pending_epoch_ = env.round;
  }
  std::vector<uint32_t> slot_features;
  for (const auto& tree : batch.trees) {
    for (const auto& n : tree.nodes) {
      if (!n.leaf) slot_features.push_back(n.feature);
    }
  }
  const uint32_t slots = static_cast<uint32_t>(slot_features.size());
  for (uint32_t i = 0; i < data_.size(); ++i) {
    for (uint32_t k = 0; k < slots; ++k) batch.items.push_back({k, i});
  }
  if (batch.items.empty()) {
    FinishBatch(batch, {});
    return;
  }
  ShareFeatures(batch_id, slot_features, batch, env.round);
  batches_[batch_id] = std::move(batch);
}

void UserNode::OnComparisonShare(const Envelope& env) {
  ByteReader r(env.payload);
  const uint64_t batch_id = r.U64();
  auto it = batches_.find(batch_id);
  if (it == batches_.end()) return;
  Batch& batch = it->second;
  auto shares = r.FieldVector();
  if (shares.size() != batch.items.size()) {
    throw Error(ErrorCode::kFormat, "comparison shares do not match the batch");
  }
  batch.shares[env.sender.domain] = std::move(shares);
  const uint32_t t = ctx_.edge_threshold;
  if (batch.shares.size() < t) return;

  std::vector<uint32_t> points;
  for (const auto& [edge, s] : batch.shares) {
    points.push_back(edge);
    if (points.size() == t) break;
  }
  auto basis = ctx_.scheme.LagrangeAtZero(points);
  Charge(Primitive::kLagrangeTerm, static_cast<double>(batch.items.size()) * t + t * t);
  std::vector<uint8_t> bits(batch.items.size());
  for (size_t k = 0; k < bits.size(); ++k) {
    FieldElement v{0};
    for (size_t j = 0; j < t; ++j) {
      v = ctx_.field.Add(v, ctx_.field.Mul(basis[j], batch.shares.at(points[j])[k]));
    }
    if (v.value > 1) {
      throw Error(ErrorCode::kAggregationConsistency, "comparison result is not a bit");
    }
    bits[k] = static_cast<uint8_t>(v.value);
  }
  Batch done = std::move(batch);
  batches_.erase(it);
  FinishBatch(done, bits);
}

void UserNode::FinishBatch(Batch& batch, std::span<const uint8_t> bits) {
  if (!batch.predict) {
    for (size_t k = 0; k < batch.items.size(); ++k) {
      const Split& s = batch.splits[batch.items[k].slot];
      node_of_[batch.items[k].instance] = bits[k] ? s.left + 1 : s.left;
    }
    return;
  }
  size_t slots = 0;
  std::vector<std::vector<int32_t>> slot_of;
  for (const auto& tree : batch.trees) {
    std::vector<int32_t> ids(tree.nodes.size(), -1);
    for (size_t n = 0; n < tree.nodes.size(); ++n) {
      if (!tree.nodes[n].leaf) ids[n] = static_cast<int32_t>(slots++);
    }
    slot_of.push_back(std::move(ids));
  }
  const double eta = ctx_.config.boost.eta;
  auto& target = batch.commit_directly ? margins_ : pending_;
  for (size_t i = 0; i < data_.size(); ++i) {
    for (size_t t = 0; t < batch.trees.size(); ++t) {
      const auto& nodes = batch.trees[t].nodes;
      int32_t n = 0;
      while (!nodes[n].leaf) {
        const bool right = bits[i * slots + slot_of[t][n]] != 0;
        n = right ? nodes[n].right : nodes[n].left;
      }
      target[i][batch.trees[t].key.output] += eta * nodes[n].weight;
    }
  }
}

void UserNode::OnRoundCommit(const Envelope& env) {
  ByteReader r(env.payload);
  const uint64_t epoch = r.U64();
  in_round_ = false;
  if (pending_epoch_ != epoch) return;
  for (size_t i = 0; i < margins_.size(); ++i) {
    for (int c = 0; c < ctx_.outputs; ++c) margins_[i][c] += pending_[i][c];
    std::fill(pending_[i].begin(), pending_[i].end(), 0.0);
  }
  pending_epoch_ = 0;
}

}  // namespace fedgbt::internal
