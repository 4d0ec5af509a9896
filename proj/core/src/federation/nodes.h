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

#ifndef FEDGBT_SRC_FEDERATION_NODES_H_
#define FEDGBT_SRC_FEDERATION_NODES_H_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedgbt/bus.h"
#include "fedgbt/cost_model.h"
#include "fedgbt/crypto_suite.h"
#include "fedgbt/federation.h"
#include "fedgbt/finite_field.h"
#include "fedgbt/masking.h"
#include "fedgbt/random.h"
#include "fedgbt/seccmp.h"
#include "fedgbt/wire.h"

namespace fedgbt::internal {

struct Context {
  Context(const FederationConfig& config, CandidateSchema schema, uint32_t feature_count,
          uint32_t class_count, const CostModel& cost);

  FederationConfig config;
  PrimeField field;
  FixedPointCodec codec;
  ShamirScheme scheme;
  PublicParams params;
  CandidateSchema schema;
  uint32_t feature_count;
  uint32_t class_count;
  int outputs;
  uint32_t edge_threshold;
  CostModel cost;
  MessageBus bus;
  Stage stage = Stage::kSetup;
  // Verification keys handed out by the trusted key issuer.
  std::map<ParticipantId, Bytes> verify_keys;
  std::map<ParticipantId, double> uptime;
  std::vector<std::string> log;
  uint64_t next_batch = 1;
  uint64_t auth_failures = 0;
};

// Identifies a tree by the round it was built in and its output.
struct TreeKey {
  uint32_t round = 0;
  uint32_t output = 0;
  friend auto operator<=>(const TreeKey&, const TreeKey&) = default;
};

// Public part of a tree: topology, split features and leaf weights.
struct PublicTree {
  TreeKey key;
  std::vector<CartNode> nodes;  // thresholds zeroed
};

void WriteTree(ByteWriter& w, const PublicTree& tree);
PublicTree ReadTree(ByteReader& r);

// Bytes a user signs when advertising its round keys.
Bytes AdvertMessage(const ParticipantId& user, uint64_t epoch, std::span<const uint8_t> mask_pub,
                    std::span<const uint8_t> ek_pub);

std::vector<uint32_t> ReadIndices(ByteReader& r);
void WriteIndices(ByteWriter& w, std::span<const uint32_t> indices);

class Node {
 public:
  Node(Context& ctx, ParticipantId id);
  virtual ~Node() = default;

  const ParticipantId& id() const { return id_; }
  const CostMeter& meter() const { return meter_; }
  void Receive(const Envelope& envelope);

 protected:
  virtual void Handle(const Envelope& envelope) = 0;

  void Send(const ParticipantId& to, MessageKind kind, PayloadClass outer, PayloadClass inner,
            Bytes payload, uint64_t round);
  void Charge(Primitive p, double units) { meter_.Charge(ctx_.stage, p, units); }
  Bytes Seal(const SharedKey& key, std::span<const uint8_t> plain, const ParticipantId& to,
             uint64_t round, MessageKind kind);
  // Throws kAuthentication on failure.
  Bytes Open(const SharedKey& key, std::span<const uint8_t> sealed, const ParticipantId& from,
             uint64_t round, MessageKind kind);
  SharedKey Agree(const KeyPair& mine, std::span<const uint8_t> their_public);
  // Charges for a batch sharing of `secrets` values to `holders` at threshold t.
  void ChargeSharing(size_t secrets, size_t holders, uint32_t t);

  Context& ctx_;
  ParticipantId id_;
  Rng rng_;
  CostMeter meter_;
};

class UserNode : public Node {
 public:
  UserNode(Context& ctx, ParticipantId id, Dataset data, KeyPair sign_key);

  void GenerateEncryptionKey();
  void ForgeSignatures();
  // Sends the masked level vector with the self-mask shares it holds.
  void UploadLevel();

  const Dataset& data() const { return data_; }
  const std::vector<std::vector<double>>& margins() const { return margins_; }
  bool caught_up() const { return caught_up_; }
  void set_caught_up() { caught_up_ = true; }
  size_t held_shares() const { return keyring_.mask_key_shares_held.size(); }
  bool in_round() const { return in_round_; }

 protected:
  void Handle(const Envelope& envelope) override;

 private:
  struct Item {
    uint32_t slot;
    uint32_t instance;
  };
  struct Split {
    int32_t node;
    int32_t left;
  };
  struct Batch {
    bool predict = false;
    bool commit_directly = false;
    std::vector<Item> items;
    std::vector<Split> splits;      // routing batches
    std::vector<PublicTree> trees;  // prediction batches
    std::map<uint32_t, std::vector<FieldElement>> shares;  // edge -> shares aligned to items
  };

  void OnRosterAnnounce(const Envelope& env);
  void OnRosterKeys(const Envelope& env);
  void OnMaskKeyShare(const Envelope& env);
  void OnRosterFreeze(const Envelope& env);
  void OnLevelRequest(const Envelope& env);
  void OnSelfMaskShare(const Envelope& env);
  void OnRecoveryRequest(const Envelope& env);
  void OnSplitDecision(const Envelope& env);
  void OnTreePublish(const Envelope& env);
  void OnComparisonShare(const Envelope& env);
  void OnRoundCommit(const Envelope& env);
  // Shares the feature value of every item to all edges.
  void ShareFeatures(uint64_t batch_id, const std::vector<uint32_t>& slot_features,
                     Batch& batch, uint64_t round);
  void FinishBatch(Batch& batch, std::span<const uint8_t> bits);
  SharedKey PeerEncryptionKey(uint32_t peer);
  void ComputeGradients();

  Dataset data_;
  DenseMatrix x_;
  KeyPair sign_key_;
  KeyPair ek_;
  ParticipantId edge_;
  std::vector<std::vector<double>> margins_;
  std::vector<std::vector<double>> pending_;
  uint64_t pending_epoch_ = 0;
  bool caught_up_ = false;

  // Round state.
  uint64_t epoch_ = 0;
  bool in_round_ = false;
  uint32_t threshold_ = 0;
  std::map<uint32_t, Bytes> peer_mask_pub_;
  std::map<uint32_t, Bytes> peer_ek_pub_;
  std::map<uint32_t, SharedKey> ek_cache_;
  std::map<uint32_t, Bytes> ek_cache_pub_;
  std::vector<uint32_t> frozen_;
  MaskKeyring keyring_;
  std::vector<std::vector<GradientPair>> gradients_;  // [output][instance]
  uint64_t gradient_epoch_ = 0;

  // Tree under construction.
  TreeKey tree_;
  std::vector<int32_t> node_of_;  // per instance
  std::vector<FieldElement> level_values_;
  Seed level_seed_{};
  std::string level_tag_;
  std::map<uint32_t, std::vector<Share>> level_seed_shares_;  // origin -> limbs

  std::map<uint64_t, Batch> batches_;
};

class EdgeNode : public Node {
 public:
  EdgeNode(Context& ctx, uint32_t domain);

  void AddUser(uint32_t index) { domain_users_.insert(index); }
  void RemoveUser(uint32_t index) { domain_users_.erase(index); }
  const std::set<uint32_t>& domain_users() const { return domain_users_; }

  void GenerateEncryptionKey();
  const KeyPair& ek() const { return ek_; }
  void SetCentralKey(Bytes central_ek_public) { central_ek_public_ = std::move(central_ek_public); }

  void BeginSelection(uint64_t epoch);
  void SendRosterKeys();
  void FreezeRoster();
  void BeginAggregation();
  void FinishAggregation();
  void StartComparisons(uint64_t batch_id);
  void ForwardToUsers(MessageKind kind, PayloadClass cls, const Bytes& payload,
                      const std::vector<uint32_t>& targets);

  bool active() const { return active_; }
  DomainRosterView roster() const;
  std::vector<uint32_t> excluded() const { return excluded_; }
  std::vector<uint32_t> missing_uploads() const;

 protected:
  void Handle(const Envelope& envelope) override;

 private:
  struct Advert {
    Bytes mask_pub;
    Bytes ek_pub;
    Bytes signature;
  };
  struct CmpBatch {
    std::vector<FieldElement> thresholds;
    std::map<ParticipantId, std::vector<std::pair<uint32_t, FieldElement>>> features;
    std::vector<std::pair<ParticipantId, size_t>> layout;
    std::vector<FieldElement> left;
    std::vector<FieldElement> right;
    std::unique_ptr<SecCmpParty> party;
    bool reshared = false;
    bool reduced_sent = false;
    bool results_sent = false;
    std::optional<std::vector<FieldElement>> result;
    bool answered = false;
  };

  void OnKeyAdvertise(const Envelope& env);
  void OnUserRouted(const Envelope& env);
  void OnMaskedUpload(const Envelope& env);
  void OnRecoveryShare(const Envelope& env);
  void OnCentral(const Envelope& env);
  void OnFeatureShare(const Envelope& env);
  void OnEdgeShare(const Envelope& env);
  void Advance(uint64_t batch_id);
  void DeliverToParty(uint64_t batch_id, MessageKind kind, uint32_t to,
                      std::vector<FieldElement> shares);
  void Accept(uint64_t batch_id, MessageKind kind, uint32_t from, std::vector<FieldElement> shares);
  SharedKey CentralKey();

  uint32_t domain_;
  KeyPair ek_;
  Bytes central_ek_public_;
  std::optional<SharedKey> central_key_;
  std::set<uint32_t> domain_users_;

  uint64_t epoch_ = 0;
  bool active_ = false;
  uint32_t threshold_ = 0;
  std::vector<uint32_t> selected_;
  std::map<uint32_t, Advert> adverts_;
  std::vector<uint32_t> members_;
  std::vector<uint32_t> excluded_;
  std::map<uint32_t, size_t> forwarded_;
  std::vector<uint32_t> frozen_;

  std::string level_tag_;
  size_t level_width_ = 0;
  std::map<uint32_t, std::vector<FieldElement>> uploads_;
  // origin -> holder -> limb shares, for survivors' seeds and dropped keys.
  std::map<uint32_t, std::map<uint32_t, std::vector<Share>>> seed_shares_;
  std::map<uint32_t, std::map<uint32_t, std::vector<Share>>> key_shares_;
  std::vector<uint32_t> survivors_;
  std::vector<uint32_t> dropped_;
  size_t responders_ = 0;

  std::map<uint64_t, CmpBatch> batches_;
};

class CentralNode : public Node {
 public:
  CentralNode(Context& ctx);

  void GenerateEncryptionKey();
  const KeyPair& ek() const { return ek_; }
  void SetEdgeKey(uint32_t domain, Bytes ek_public) { edge_ek_public_[domain] = std::move(ek_public); }
  void PublishParams(const std::vector<uint32_t>& domains);
  void PublishCandidates(const std::vector<uint32_t>& domains);

  Model& model() { return model_; }
  const Model& model() const { return model_; }

  // Tree building, one level at a time.
  void BeginTree(int round, int output, std::vector<uint32_t> features);
  bool tree_open() const { return !frontier_.empty() && level_ < ctx_.config.boost.max_depth; }
  void RequestLevel(const std::vector<uint32_t>& domains);
  // Consumes the domain aggregates; returns the routing batch id if the new
  // children need instance routing before the next level, 0 otherwise.
  // Returns nullopt when every domain aborted.
  std::optional<uint64_t> FinishLevel(const std::vector<uint32_t>& domains);
  Cart FinishTree();
  int level() const { return level_; }

  // Starts a prediction batch over the given model trees for the targets.
  uint64_t StartPrediction(const std::vector<int>& tree_indices,
                           const std::map<uint32_t, std::vector<uint32_t>>& targets,
                           bool commit_directly);
  void Commit(const std::vector<uint32_t>& domains, uint64_t epoch);

  void set_epoch(uint64_t epoch) { epoch_ = epoch; }

 protected:
  void Handle(const Envelope& envelope) override;

 private:
  struct Frontier {
    int32_t node;
    NodeStats stats;
  };
  SharedKey EdgeKey(uint32_t domain);
  // Shares encoded thresholds with every edge at the edge threshold.
  void ShareThresholds(uint64_t batch_id, const std::vector<double>& thresholds);
  static PublicTree MakePublic(const Cart& tree, TreeKey key);

  KeyPair ek_;
  std::map<uint32_t, Bytes> edge_ek_public_;
  std::map<uint32_t, SharedKey> edge_keys_;
  Model model_;
  uint64_t epoch_ = 0;

  Cart tree_;
  TreeKey tree_key_;
  std::vector<uint32_t> features_;
  std::vector<Frontier> frontier_;
  int level_ = 0;
  std::map<uint32_t, std::optional<std::vector<FieldElement>>> aggregates_;
};

}  // namespace fedgbt::internal

#endif  // FEDGBT_SRC_FEDERATION_NODES_H_
