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
#include <cmath>

#include "federation/nodes.h"
#include "fedgbt/error.h"

namespace fedgbt::internal {
namespace {

constexpr size_t kSeedBytes = 32;

}  // namespace

EdgeNode::EdgeNode(Context& ctx, uint32_t domain)
    : Node(ctx, ParticipantId::Edge(domain)), domain_(domain) {}

void EdgeNode::GenerateEncryptionKey() {
  Charge(Primitive::kKeyGen, 1);
  ek_ = KeyGen(ctx_.params, KeyPurpose::kEncrypt, rng_);
}

SharedKey EdgeNode::CentralKey() {
  if (!central_key_) central_key_ = Agree(ek_, central_ek_public_);
  return *central_key_;
}

DomainRosterView EdgeNode::roster() const {
  DomainRosterView view;
  view.domain = domain_;
  view.threshold = threshold_;
  view.selected = selected_;
  view.frozen = frozen_;
  view.aborted = !active_;
  return view;
}

std::vector<uint32_t> EdgeNode::missing_uploads() const { return dropped_; }

void EdgeNode::ForwardToUsers(MessageKind kind, PayloadClass cls, const Bytes& payload,
                              const std::vector<uint32_t>& targets) {
  for (uint32_t index : targets) {
    Send(ParticipantId::User(domain_, index), kind, cls, cls, payload, epoch_);
  }
}

void EdgeNode::Handle(const Envelope& env) {
  switch (env.kind) {
    case MessageKind::kKeyAdvertise: return OnKeyAdvertise(env);
    case MessageKind::kMaskKeyShare:
    case MessageKind::kSelfMaskShare: return OnUserRouted(env);
    case MessageKind::kMaskedUpload: return OnMaskedUpload(env);
    case MessageKind::kRecoveryShare: return OnRecoveryShare(env);
    case MessageKind::kFeatureShare: return OnFeatureShare(env);
    case MessageKind::kBlindingShare:
    case MessageKind::kReshare:
    case MessageKind::kReducedShare:
    case MessageKind::kResultShare: return OnEdgeShare(env);
    case MessageKind::kPublishParams:
    case MessageKind::kCandidateList:
    case MessageKind::kRoundCommit:
    case MessageKind::kLevelRequest:
    case MessageKind::kSplitDecision:
    case MessageKind::kThresholdShare:
    case MessageKind::kTreePublish: return OnCentral(env);
    default:
      throw Error(ErrorCode::kRuntime, "edge cannot handle " +
                                           std::string(MessageKindName(env.kind)));
  }
}

void EdgeNode::BeginSelection(uint64_t epoch) {
  epoch_ = epoch;
  adverts_.clear();
  members_.clear();
  excluded_.clear();
  forwarded_.clear();
  frozen_.clear();
  survivors_.clear();
  dropped_.clear();
  threshold_ = 0;

  std::vector<uint32_t> candidates(domain_users_.begin(), domain_users_.end());
  if (ctx_.config.policy == SelectionPolicy::kUptime && !candidates.empty()) {
    auto uptime = [&](uint32_t index) {
      auto it = ctx_.uptime.find(ParticipantId::User(domain_, index));
      return it == ctx_.uptime.end() ? 0.0 : it->second;
    };
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](uint32_t a, uint32_t b) { return uptime(a) > uptime(b); });
    size_t keep = static_cast<size_t>(
        std::ceil(ctx_.config.select_fraction * static_cast<double>(candidates.size())));
    keep = std::clamp<size_t>(keep, 1, candidates.size());
    candidates.resize(keep);
    std::sort(candidates.begin(), candidates.end());
  }
  selected_ = candidates;
  active_ = !selected_.empty();

  ByteWriter w;
  w.U64(epoch_);
  WriteIndices(w, selected_);
  ForwardToUsers(MessageKind::kRosterAnnounce, PayloadClass::kControl, w.bytes(),
                 std::vector<uint32_t>(domain_users_.begin(), domain_users_.end()));
}

void EdgeNode::OnKeyAdvertise(const Envelope& env) {
  const uint32_t index = env.sender.index;
  if (env.sender.domain != domain_ ||
      std::find(selected_.begin(), selected_.end(), index) == selected_.end()) {
    return;
  }
  ByteReader r(env.payload);
  Advert ad;
  ad.mask_pub = r.Blob();
  ad.ek_pub = r.Blob();
  ad.signature = r.Blob();
  Charge(Primitive::kVerify, 1);
  auto vk = ctx_.verify_keys.find(env.sender);
  if (vk == ctx_.verify_keys.end() ||
      !Verify(vk->second, AdvertMessage(env.sender, epoch_, ad.mask_pub, ad.ek_pub),
              ad.signature)) {
    ++ctx_.auth_failures;
    excluded_.push_back(index);
    ctx_.log.push_back(id_.ToString() + " excluded " + env.sender.ToString() +
                       ": key advertisement signature does not verify");
    return;
  }
  adverts_[index] = std::move(ad);
}

void EdgeNode::SendRosterKeys() {
  if (!active_) return;
  members_.clear();
  for (const auto& [index, ad] : adverts_) members_.push_back(index);
  if (members_.empty()) {
    active_ = false;
    ctx_.log.push_back(id_.ToString() + " has no verified users this round");
    return;
  }
  const uint32_t n = static_cast<uint32_t>(members_.size());
  threshold_ = ctx_.config.user_threshold != 0 ? std::min(ctx_.config.user_threshold, n)
                                              : DefaultUserThreshold(n);
  ByteWriter w;
  w.U64(epoch_);
  w.U32(threshold_);
  w.U32(n);
  for (uint32_t index : members_) {
    const Advert& ad = adverts_.at(index);
    w.U32(index);
    w.Blob(ad.mask_pub);
    w.Blob(ad.ek_pub);
    w.Blob(ad.signature);
  }
  ForwardToUsers(MessageKind::kRosterKeys, PayloadClass::kPublicKey, w.bytes(), members_);
}

void EdgeNode::OnUserRouted(const Envelope& env) {
  ByteReader r(env.payload);
  const uint32_t dest = r.U32();
  const uint32_t origin = r.U32();
  if (env.sender.domain != domain_ || origin != env.sender.index || dest == origin) {
    throw Error(ErrorCode::kFormat, "routed share with a forged origin");
  }
  const auto& roster = env.kind == MessageKind::kMaskKeyShare ? members_ : frozen_;
  if (std::find(roster.begin(), roster.end(), dest) == roster.end()) return;
  if (env.kind == MessageKind::kMaskKeyShare) ++forwarded_[origin];
  Send(ParticipantId::User(domain_, dest), env.kind, env.payload_class, env.inner_class,
       env.payload, env.round);
}

void EdgeNode::FreezeRoster() {
  if (members_.empty()) return;
  frozen_.clear();
  for (uint32_t m : members_) {
    if (forwarded_[m] + 1 >= members_.size()) frozen_.push_back(m);
  }
  bool aborted = !active_ || frozen_.size() < threshold_;
  if (aborted && active_) {
    ctx_.log.push_back(id_.ToString() + " aborts: " + std::to_string(frozen_.size()) +
                       " users completed key sharing, threshold " +
                       std::to_string(threshold_));
    active_ = false;
  }
  for (uint32_t m : members_) {
    if (std::find(frozen_.begin(), frozen_.end(), m) == frozen_.end()) {
      ctx_.log.push_back(id_.ToString() + " left " + ParticipantId::User(domain_, m).ToString() +
                         " out of the frozen roster");
    }
  }
  ByteWriter w;
  w.U64(epoch_);
  w.U8(aborted ? 1 : 0);
  WriteIndices(w, frozen_);
  ForwardToUsers(MessageKind::kRosterFreeze, PayloadClass::kControl, w.bytes(), members_);
}

void EdgeNode::OnMaskedUpload(const Envelope& env) {
  if (!active_ || env.sender.domain != domain_) return;
  ByteReader r(env.payload);
  const std::string tag = r.Str();
  auto values = r.FieldVector();
  const uint32_t index = env.sender.index;
  if (tag != level_tag_ || values.size() != level_width_ ||
      std::find(frozen_.begin(), frozen_.end(), index) == frozen_.end()) {
    throw Error(ErrorCode::kFormat, "masked upload does not match the current level");
  }
  uploads_[index] = std::move(values);
}

void EdgeNode::BeginAggregation() {
  if (!active_) return;
  survivors_.clear();
  dropped_.clear();
  for (uint32_t m : frozen_) (uploads_.contains(m) ? survivors_ : dropped_).push_back(m);
  seed_shares_.clear();
  key_shares_.clear();
  responders_ = 0;
  for (uint32_t d : dropped_) {
    ctx_.log.push_back(id_.ToString() + " recovers the masks of " +
                       ParticipantId::User(domain_, d).ToString() + " at " + level_tag_);
  }
  if (survivors_.size() < threshold_) {
    ctx_.log.push_back(id_.ToString() + " aborts at " + level_tag_ + ": " +
                       std::to_string(survivors_.size()) + " uploads, threshold " +
                       std::to_string(threshold_));
    active_ = false;
    ByteWriter inner;
    inner.U8(1);
    inner.Str(level_tag_);
    inner.FieldVector({});
    ByteWriter w;
    w.Blob(Seal(CentralKey(), inner.bytes(), ParticipantId::Central(), epoch_,
                MessageKind::kDomainAggregate));
    Send(ParticipantId::Central(), MessageKind::kDomainAggregate, PayloadClass::kCiphertext,
         PayloadClass::kDomainAggregate, w.Take(), epoch_);
    return;
  }
  ByteWriter w;
  w.Str(level_tag_);
  WriteIndices(w, survivors_);
  WriteIndices(w, dropped_);
  ForwardToUsers(MessageKind::kRecoveryRequest, PayloadClass::kControl, w.bytes(), survivors_);
}

void EdgeNode::OnRecoveryShare(const Envelope& env) {
  if (!active_ || env.sender.domain != domain_) return;
  const uint32_t holder = env.sender.index;
  if (std::find(survivors_.begin(), survivors_.end(), holder) == survivors_.end()) return;
  ByteReader r(env.payload);
  if (r.Str() != level_tag_) return;
  auto read_group = [&](auto& into) {
    const uint32_t count = r.U32();
    for (uint32_t i = 0; i < count; ++i) {
      const uint32_t origin = r.U32();
      std::vector<Share> limbs;
      for (const auto& v : r.FieldVector()) limbs.push_back({holder, v});
      into[origin][holder] = std::move(limbs);
    }
  };
  read_group(seed_shares_);
  read_group(key_shares_);
  ++responders_;
}

void EdgeNode::FinishAggregation() {
  if (!active_) return;
  std::vector<FieldElement> aggregate;
  bool aborted = false;
  try {
    std::map<uint32_t, Seed> seeds;
    std::map<uint32_t, std::vector<FieldElement>> masked;
    for (uint32_t s : survivors_) {
      Bytes seed = RecoverBytes(ctx_.scheme, seed_shares_[s], threshold_, kSeedBytes);
      std::copy(seed.begin(), seed.end(), seeds[s].begin());
      masked[s] = uploads_.at(s);
    }
    const double limbs = static_cast<double>(BytesToLimbs(ctx_.field, Bytes(kSeedBytes)).size());
    const double t = threshold_;
    Charge(Primitive::kLagrangeTerm,
           (survivors_.size() + dropped_.size()) * (limbs * t + t * t));
    aggregate = UnmaskDomainAggregateVector(ctx_.field, masked, seeds);
    Charge(Primitive::kPrgWord, static_cast<double>(level_width_) * survivors_.size());
    Charge(Primitive::kFieldOp, 2.0 * level_width_ * survivors_.size());
    if (!dropped_.empty()) {
      std::map<uint32_t, Bytes> publics;
      for (uint32_t s : survivors_) publics[s] = adverts_.at(s).mask_pub;
      for (uint32_t d : dropped_) {
        auto correction = RecoverDropoutPairwiseVector(ctx_.params, ctx_.scheme, d,
                                                       key_shares_[d], threshold_, publics,
                                                       epoch_, level_tag_, level_width_);
        Charge(Primitive::kKeyAgree, static_cast<double>(survivors_.size()));
        Charge(Primitive::kPrgWord, static_cast<double>(level_width_) * survivors_.size());
        for (size_t i = 0; i < level_width_; ++i) {
          aggregate[i] = ctx_.field.Add(aggregate[i], correction[i]);
        }
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kThreshold) throw;
    ctx_.log.push_back(id_.ToString() + " aborts at " + level_tag_ + ": " + e.what());
    aborted = true;
    aggregate.clear();
    active_ = false;
  }
  frozen_ = survivors_;

  ByteWriter inner;
  inner.U8(aborted ? 1 : 0);
  inner.Str(level_tag_);
  inner.FieldVector(aggregate);
  ByteWriter w;
  w.Blob(Seal(CentralKey(), inner.bytes(), ParticipantId::Central(), epoch_,
              MessageKind::kDomainAggregate));
  Send(ParticipantId::Central(), MessageKind::kDomainAggregate, PayloadClass::kCiphertext,
       PayloadClass::kDomainAggregate, w.Take(), epoch_);
}

void EdgeNode::OnCentral(const Envelope& env) {
  if (env.sender.role != Role::kCentral) {
    throw Error(ErrorCode::kFormat, "control message from a non-central sender");
  }
  const std::vector<uint32_t> everyone(domain_users_.begin(), domain_users_.end());
  switch (env.kind) {
    case MessageKind::kPublishParams:
    case MessageKind::kCandidateList:
    case MessageKind::kRoundCommit:
      for (uint32_t index : everyone) {
        Send(ParticipantId::User(domain_, index), env.kind, env.payload_class, env.inner_class,
             env.payload, env.round);
      }
      return;
    case MessageKind::kLevelRequest: {
      if (!active_) return;
      ByteReader r(env.payload);
      r.U64();
      TreeKey key;
      key.round = r.U32();
      key.output = r.U32();
      const uint32_t level = r.U32();
      auto features = ReadIndices(r);
      const uint32_t frontier = r.U32();
      level_width_ = frontier * (3 + 3 * CandidateSlotCount(ctx_.schema, features));
      level_tag_ = "r" + std::to_string(key.round) + "c" + std::to_string(key.output) + "d" +
                   std::to_string(level);
      uploads_.clear();
      ForwardToUsers(env.kind, env.payload_class, env.payload, frozen_);
      return;
    }
    case MessageKind::kSplitDecision:
      if (!active_) return;
      ForwardToUsers(env.kind, env.payload_class, env.payload, frozen_);
      return;
    case MessageKind::kThresholdShare: {
      ByteReader r(env.payload);
      const uint64_t batch_id = r.U64();
      batches_[batch_id].thresholds = r.FieldVector();
      return;
    }
    case MessageKind::kTreePublish: {
      ByteReader r(env.payload);
      r.U64();
      r.U8();
      const uint32_t trees = r.U32();
      for (uint32_t t = 0; t < trees; ++t) ReadTree(r);
      const uint32_t domains = r.U32();
      for (uint32_t d = 0; d < domains; ++d) {
        const uint32_t domain = r.U32();
        auto targets = ReadIndices(r);
        if (domain == domain_) {
          for (uint32_t index : targets) {
            Send(ParticipantId::User(domain_, index), env.kind, env.payload_class,
                 env.inner_class, env.payload, env.round);
          }
        }
      }
      return;
    }
    default:
      return;
  }
}

void EdgeNode::OnFeatureShare(const Envelope& env) {
  if (env.sender.role != Role::kUser) {
    throw Error(ErrorCode::kFormat, "feature shares must come from users");
  }
  ByteReader r(env.payload);
  const uint64_t batch_id = r.U64();
  auto& items = batches_[batch_id].features[env.sender];
  items.resize(r.U32());
  for (auto& [slot, share] : items) {
    slot = r.U32();
    share = r.Field();
  }
}

void EdgeNode::StartComparisons(uint64_t batch_id) {
  auto it = batches_.find(batch_id);
  if (it == batches_.end()) return;
  CmpBatch& b = it->second;
  for (const auto& [user, items] : b.features) {
    for (const auto& [slot, share] : items) {
      if (slot >= b.thresholds.size()) {
        throw Error(ErrorCode::kFormat, "feature share for an unknown comparison slot");
      }
      b.left.push_back(b.thresholds[slot]);
      b.right.push_back(share);
    }
    b.layout.emplace_back(user, items.size());
  }
  b.features.clear();
  if (b.left.empty()) {
    batches_.erase(it);
    return;
  }
  const uint32_t t = ctx_.edge_threshold;
  b.party = std::make_unique<SecCmpParty>(ctx_.codec, domain_, ctx_.config.edges, t,
                                          b.left.size());
  auto blinding = b.party->BlindingShares(rng_);
  ChargeSharing(b.left.size(), PartiesRequired(t), t);
  for (auto& [holder, shares] : blinding) {
    DeliverToParty(batch_id, MessageKind::kBlindingShare, holder, std::move(shares));
  }
  Advance(batch_id);
}

void EdgeNode::DeliverToParty(uint64_t batch_id, MessageKind kind, uint32_t to,
                              std::vector<FieldElement> shares) {
  if (to == domain_) {
    Accept(batch_id, kind, domain_, std::move(shares));
    return;
  }
  ByteWriter w;
  w.U64(batch_id);
  w.FieldVector(shares);
  Send(ParticipantId::Edge(to), kind, PayloadClass::kShare, PayloadClass::kShare, w.Take(),
       epoch_);
}

void EdgeNode::OnEdgeShare(const Envelope& env) {
  if (env.sender.role != Role::kEdge) {
    throw Error(ErrorCode::kFormat, "comparison traffic must come from edges");
  }
  ByteReader r(env.payload);
  const uint64_t batch_id = r.U64();
  Accept(batch_id, env.kind, env.sender.domain, r.FieldVector());
}

void EdgeNode::Accept(uint64_t batch_id, MessageKind kind, uint32_t from,
                      std::vector<FieldElement> shares) {
  auto it = batches_.find(batch_id);
  if (it == batches_.end() || !it->second.party) {
    throw Error(ErrorCode::kRuntime, "comparison message for a batch that has not started");
  }
  CmpBatch& b = it->second;
  const double n = static_cast<double>(shares.size());
  switch (kind) {
    case MessageKind::kBlindingShare:
      Charge(Primitive::kFieldOp, n);
      b.party->AcceptBlinding(from, std::move(shares));
      break;
    case MessageKind::kReshare:
      Charge(Primitive::kLagrangeTerm, n);
      b.party->AcceptReshare(from, std::move(shares));
      break;
    case MessageKind::kReducedShare:
      b.party->AcceptReduced(from, std::move(shares));
      break;
    case MessageKind::kResultShare:
      if (from != SecCmpParty::kCombiner || shares.size() != b.left.size()) {
        throw Error(ErrorCode::kAggregationConsistency, "unexpected comparison result");
      }
      b.result = std::move(shares);
      break;
    default:
      throw Error(ErrorCode::kRuntime, "not a comparison message");
  }
  Advance(batch_id);
}

void EdgeNode::Advance(uint64_t batch_id) {
  auto it = batches_.find(batch_id);
  if (it == batches_.end() || !it->second.party) return;
  CmpBatch& b = it->second;
  SecCmpParty& p = *b.party;
  const uint32_t t = p.threshold();
  const double n = static_cast<double>(b.left.size());

  if (p.in_reduction_set() && !b.reshared && p.HasAllBlinding()) {
    b.reshared = true;
    auto reshares = p.ProductReshares(b.left, b.right, rng_);
    Charge(Primitive::kFieldOp, 2 * n);
    ChargeSharing(b.left.size(), t, t);
    for (auto& [holder, shares] : reshares) {
      DeliverToParty(batch_id, MessageKind::kReshare, holder, std::move(shares));
    }
    return Advance(batch_id);
  }
  if (p.in_opening_set() && !b.reduced_sent && p.HasAllReshares()) {
    b.reduced_sent = true;
    DeliverToParty(batch_id, MessageKind::kReducedShare, SecCmpParty::kCombiner,
                   p.ReducedShares());
    return Advance(batch_id);
  }
  if (p.is_combiner() && !b.results_sent && p.HasEnoughReduced()) {
    b.results_sent = true;
    auto results = p.ResultShares(rng_);
    Charge(Primitive::kLagrangeTerm, n * t + static_cast<double>(t) * t);
    ChargeSharing(b.left.size(), ctx_.config.edges, t);
    for (auto& [holder, shares] : results) {
      DeliverToParty(batch_id, MessageKind::kResultShare, holder, std::move(shares));
    }
    return Advance(batch_id);
  }
  if (b.result && !b.answered) {
    b.answered = true;
    size_t offset = 0;
    for (const auto& [user, count] : b.layout) {
      std::vector<FieldElement> slice(b.result->begin() + offset,
                                      b.result->begin() + offset + count);
      offset += count;
      ByteWriter w;
      w.U64(batch_id);
      w.FieldVector(slice);
      Send(user, MessageKind::kComparisonShare, PayloadClass::kShare, PayloadClass::kShare,
           w.Take(), epoch_);
    }
    batches_.erase(it);
  }
}

}  // namespace fedgbt::internal
