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

#include <numeric>

#include "federation/nodes.h"
#include "fedgbt/error.h"

namespace fedgbt::internal {

CentralNode::CentralNode(Context& ctx) : Node(ctx, ParticipantId::Central()) {
  model_.loss = ctx.config.loss;
  model_.class_count = static_cast<int>(ctx.class_count);
  model_.eta = ctx.config.boost.eta;
}

void CentralNode::GenerateEncryptionKey() {
  Charge(Primitive::kKeyGen, 1);
  ek_ = KeyGen(ctx_.params, KeyPurpose::kEncrypt, rng_);
}

SharedKey CentralNode::EdgeKey(uint32_t domain) {
  auto it = edge_keys_.find(domain);
  if (it != edge_keys_.end()) return it->second;
  SharedKey key = Agree(ek_, edge_ek_public_.at(domain));
  edge_keys_[domain] = key;
  return key;
}

void CentralNode::PublishParams(const std::vector<uint32_t>& domains) {
  const auto& c = ctx_.config;
  ByteWriter w;
  w.U32(static_cast<uint32_t>(c.security_parameter));
  w.U64(ctx_.field.modulus());
  w.U32(static_cast<uint32_t>(ctx_.codec.fractional_bits()));
  w.U32(c.edges);
  w.U32(ctx_.edge_threshold);
  w.F64(c.boost.eta);
  w.F64(c.boost.gamma);
  w.F64(c.boost.lambda);
  w.U32(static_cast<uint32_t>(c.boost.max_depth));
  w.U32(static_cast<uint32_t>(c.boost.rounds));
  w.U64(c.boost.feature_subsample);
  w.F64(c.boost.min_instances);
  w.U8(static_cast<uint8_t>(c.loss));
  w.U32(ctx_.class_count);
  for (uint32_t d : domains) {
    Send(ParticipantId::Edge(d), MessageKind::kPublishParams, PayloadClass::kControl,
         PayloadClass::kControl, w.bytes(), epoch_);
  }
}

void CentralNode::PublishCandidates(const std::vector<uint32_t>& domains) {
  ByteWriter w;
  w.U32(static_cast<uint32_t>(ctx_.schema.feature_count()));
  for (const auto& cands : ctx_.schema.thresholds) {
    w.U32(static_cast<uint32_t>(cands.size()));
    for (double v : cands) w.F64(v);
  }
  for (uint32_t d : domains) {
    Send(ParticipantId::Edge(d), MessageKind::kCandidateList, PayloadClass::kCandidateList,
         PayloadClass::kCandidateList, w.bytes(), epoch_);
  }
}

void CentralNode::Handle(const Envelope& env) {
  if (env.kind != MessageKind::kDomainAggregate || env.sender.role != Role::kEdge) {
    throw Error(ErrorCode::kRuntime, "central cannot handle " +
                                         std::string(MessageKindName(env.kind)) + " from " +
                                         env.sender.ToString());
  }
  ByteReader r(env.payload);
  Bytes plain = Open(EdgeKey(env.sender.domain), r.Blob(), env.sender, env.round, env.kind);
  ByteReader pr(plain);
  const bool aborted = pr.U8() != 0;
  pr.Str();
  auto values = pr.FieldVector();
  if (aborted) {
    aggregates_[env.sender.domain] = std::nullopt;
  } else {
    aggregates_[env.sender.domain] = std::move(values);
  }
}

void CentralNode::BeginTree(int round, int output, std::vector<uint32_t> features) {
  tree_ = Cart();
  tree_.set_output(output);
  tree_key_ = {static_cast<uint32_t>(round), static_cast<uint32_t>(output)};
  features_ = std::move(features);
  frontier_ = {Frontier{0, {}}};
  level_ = 0;
}

void CentralNode::RequestLevel(const std::vector<uint32_t>& domains) {
  aggregates_.clear();
  ByteWriter w;
  w.U64(epoch_);
  w.U32(tree_key_.round);
  w.U32(tree_key_.output);
  w.U32(static_cast<uint32_t>(level_));
  WriteIndices(w, features_);
  w.U32(static_cast<uint32_t>(frontier_.size()));
  for (const auto& f : frontier_) w.U32(static_cast<uint32_t>(f.node));
  for (uint32_t d : domains) {
    Send(ParticipantId::Edge(d), MessageKind::kLevelRequest, PayloadClass::kControl,
         PayloadClass::kControl, w.bytes(), epoch_);
  }
}

std::optional<uint64_t> CentralNode::FinishLevel(const std::vector<uint32_t>& domains) {
  const size_t slots = CandidateSlotCount(ctx_.schema, features_);
  const size_t per_node = 3 + 3 * slots;
  const size_t width = frontier_.size() * per_node;
  std::vector<FieldElement> sum(width);
  size_t contributing = 0;
  for (uint32_t d : domains) {
    auto it = aggregates_.find(d);
    if (it == aggregates_.end() || !it->second) continue;
    if (it->second->size() != width) {
      throw Error(ErrorCode::kAggregationConsistency,
                  "domain aggregate from edge " + std::to_string(d) + " has the wrong width");
    }
    for (size_t i = 0; i < width; ++i) sum[i] = ctx_.field.Add(sum[i], (*it->second)[i]);
    ++contributing;
  }
  if (contributing == 0) return std::nullopt;
  Charge(Primitive::kFieldOp, static_cast<double>(width) * contributing);

  auto decode = [&](size_t at) {
    return NodeStats{ctx_.codec.Decode(sum[at]), ctx_.codec.Decode(sum[at + 1]),
                     static_cast<double>(ctx_.field.ToSigned(sum[at + 2]))};
  };
  const SplitRules rules = ctx_.config.boost.rules();
  std::vector<Frontier> next;
  std::vector<NodeStats> left(slots);
  struct Decision {
    int32_t node;
    uint32_t feature;
    int32_t left;
    double threshold;
  };
  std::vector<Decision> decisions;
  for (size_t k = 0; k < frontier_.size(); ++k) {
    const size_t base = k * per_node;
    const NodeStats parent = decode(base);
    for (size_t s = 0; s < slots; ++s) left[s] = decode(base + 3 + 3 * s);
    Charge(Primitive::kFieldOp, 6.0 * slots);
    SplitChoice choice = FindBestSplit(parent, {features_, &ctx_.schema, left}, rules);
    const int32_t node = frontier_[k].node;
    if (!choice.valid) {
      tree_.SetWeight(node, LeafWeight(parent.g, parent.h, rules.lambda));
      continue;
    }
    const int32_t l = tree_.Split(node, choice.feature, choice.threshold);
    decisions.push_back({node, choice.feature, l, choice.threshold});
    next.push_back({l, choice.left});
    next.push_back({l + 1, choice.right});
  }
  frontier_ = std::move(next);
  ++level_;
  if (frontier_.empty()) return 0;
  if (level_ >= ctx_.config.boost.max_depth) {
    for (const auto& f : frontier_) {
      tree_.SetWeight(f.node, LeafWeight(f.stats.g, f.stats.h, rules.lambda));
    }
    frontier_.clear();
    return 0;
  }

  const uint64_t batch_id = ctx_.next_batch++;
  ByteWriter w;
  w.U64(batch_id);
  w.U32(static_cast<uint32_t>(decisions.size()));
  std::vector<double> thresholds;
  for (const auto& d : decisions) {
    w.U32(static_cast<uint32_t>(d.node));
    w.U32(d.feature);
    w.U32(static_cast<uint32_t>(d.left));
    thresholds.push_back(d.threshold);
  }
  for (uint32_t d : domains) {
    Send(ParticipantId::Edge(d), MessageKind::kSplitDecision, PayloadClass::kControl,
         PayloadClass::kControl, w.bytes(), epoch_);
  }
  ShareThresholds(batch_id, thresholds);
  return batch_id;
}

Cart CentralNode::FinishTree() {
  for (const auto& f : frontier_) {
    tree_.SetWeight(f.node, LeafWeight(f.stats.g, f.stats.h, ctx_.config.boost.lambda));
  }
  frontier_.clear();
  return tree_;
}

void CentralNode::ShareThresholds(uint64_t batch_id, const std::vector<double>& thresholds) {
  std::vector<FieldElement> encoded;
  encoded.reserve(thresholds.size());
  for (double v : thresholds) encoded.push_back(ctx_.codec.Encode(v));
  std::vector<uint32_t> roster(ctx_.config.edges);
  std::iota(roster.begin(), roster.end(), 1u);
  auto shares = ctx_.scheme.SplitBatch(encoded, ctx_.edge_threshold, roster, rng_);
  ChargeSharing(encoded.size(), roster.size(), ctx_.edge_threshold);
  for (size_t e = 0; e < roster.size(); ++e) {
    ByteWriter w;
    w.U64(batch_id);
    w.FieldVector(shares[e]);
    Send(ParticipantId::Edge(roster[e]), MessageKind::kThresholdShare, PayloadClass::kShare,
         PayloadClass::kShare, w.Take(), epoch_);
  }
}

PublicTree CentralNode::MakePublic(const Cart& tree, TreeKey key) {
  PublicTree out;
  out.key = key;
  out.nodes = tree.nodes();
  for (auto& n : out.nodes) n.threshold = 0.0;
  return out;
}

uint64_t CentralNode::StartPrediction(const std::vector<int>& tree_indices,
                                      const std::map<uint32_t, std::vector<uint32_t>>& targets,
                                      bool commit_directly) {
  const uint64_t batch_id = ctx_.next_batch++;
  ByteWriter w;
  w.U64(batch_id);
  w.U8(commit_directly ? 1 : 0);
  w.U32(static_cast<uint32_t>(tree_indices.size()));
  std::vector<double> thresholds;
  for (int i : tree_indices) {
    const Cart& tree = model_.trees.at(i);
    WriteTree(w, MakePublic(tree, {static_cast<uint32_t>(i),
                                   static_cast<uint32_t>(tree.output())}));
    for (int32_t n : tree.InternalNodes()) thresholds.push_back(tree.node(n).threshold);
  }
  w.U32(static_cast<uint32_t>(targets.size()));
  for (const auto& [domain, indices] : targets) {
    w.U32(domain);
    WriteIndices(w, indices);
  }
  for (const auto& [domain, indices] : targets) {
    Send(ParticipantId::Edge(domain), MessageKind::kTreePublish, PayloadClass::kLeafWeights,
         PayloadClass::kLeafWeights, w.bytes(), epoch_);
  }
  if (!thresholds.empty()) ShareThresholds(batch_id, thresholds);
  return batch_id;
}

void CentralNode::Commit(const std::vector<uint32_t>& domains, uint64_t epoch) {
  ByteWriter w;
  w.U64(epoch);
  for (uint32_t d : domains) {
    Send(ParticipantId::Edge(d), MessageKind::kRoundCommit, PayloadClass::kControl,
         PayloadClass::kControl, w.bytes(), epoch);
  }
}

}  // namespace fedgbt::internal
