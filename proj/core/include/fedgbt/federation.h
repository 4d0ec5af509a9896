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

#ifndef FEDGBT_FEDERATION_H_
#define FEDGBT_FEDERATION_H_

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fedgbt/bus.h"
#include "fedgbt/cart.h"
#include "fedgbt/cost_model.h"
#include "fedgbt/crypto_suite.h"
#include "fedgbt/dataset.h"
#include "fedgbt/finite_field.h"
#include "fedgbt/loss.h"
#include "fedgbt/plaintext_trainer.h"
#include "fedgbt/split.h"
#include "fedgbt/wire.h"

namespace fedgbt {

enum class SelectionPolicy { kAll, kUptime };

struct FederationConfig {
  uint32_t edges = 10;
  // 0 selects the defaults: min(ceil(n_j/2)+1, n_j) per domain and
  // ceil(edges/2) among edges.
  uint32_t user_threshold = 0;
  uint32_t edge_threshold = 0;
  BoostParams boost;
  LossKind loss = LossKind::kLogistic;
  int security_parameter = 256;
  uint64_t field_modulus = PrimeField::kDefaultModulus;
  int fractional_bits = FixedPointCodec::kDefaultFractionalBits;
  SelectionPolicy policy = SelectionPolicy::kAll;
  double select_fraction = 1.0;  // share of a domain kept by kUptime
  uint64_t seed = 1;
};

uint32_t DefaultUserThreshold(uint32_t roster_size);
uint32_t DefaultEdgeThreshold(uint32_t edges);

enum class DropoutCase { kBeforeUpload, kDuringSecFind, kDuringSecPred };
std::string DropoutCaseName(DropoutCase c);

struct RoundOutcome {
  bool completed = false;
  std::vector<ParticipantId> dropped;
  std::vector<uint32_t> aborted_domains;
  std::vector<ParticipantId> excluded;  // failed signature checks
};

struct DomainRosterView {
  uint32_t domain = 0;
  uint32_t threshold = 0;
  std::vector<uint32_t> selected;
  std::vector<uint32_t> frozen;
  bool aborted = false;
};

namespace internal {
struct Context;
class UserNode;
class EdgeNode;
class CentralNode;
}  // namespace internal

// Drives the user, edge and central state machines through the message bus.
// One instance is one run: participants, keys and the model persist across
// rounds.
class Federation {
 public:
  Federation(const FederationConfig& config, CandidateSchema schema, uint32_t feature_count,
             uint32_t class_count, const CostModel& cost);
  ~Federation();
  Federation(const Federation&) = delete;
  Federation& operator=(const Federation&) = delete;

  // Registers a user in domain 1..edges with its local data. Users added
  // after training started are caught up on the current model before their
  // first selection.
  ParticipantId AddUser(uint32_t domain, Dataset data, double uptime = 1.0);
  // Permanently removes a user (it never rejoins).
  void RemoveUser(const ParticipantId& user);

  // Key material and public parameters; publishes model parameters and the
  // candidate schema. kConfiguration on empty domains or bad thresholds.
  void SetupRun();

  // One boosting round: selection, key shares, one tree per output, SecPred
  // and commit. Dropouts are injected at their protocol step. If every domain
  // aborts, nothing is committed and completed is false.
  RoundOutcome TrainRound(int round, const std::map<ParticipantId, DropoutCase>& dropouts);

  // The individual protocol steps, in the order TrainRound runs them.
  void SelectUsers(uint64_t epoch);
  void CollectKeyShares();
  Cart BuildTree(int round, int output);
  void SecPred(const std::vector<int>& tree_indices, const std::vector<ParticipantId>& targets,
               bool commit_directly);
  void HandleDropout(DropoutCase c, const ParticipantId& user);

  const Model& model() const;
  MessageBus& bus();
  const FederationConfig& config() const { return config_; }
  uint32_t edge_threshold() const;
  const PublicParams& public_params() const;

  std::vector<ParticipantId> users() const;
  std::vector<ParticipantId> live_users() const;
  std::vector<DomainRosterView> rosters() const;
  // Predictions held user-side, one vector of outputs per local instance.
  const std::vector<std::vector<double>>& UserMargins(const ParticipantId& user) const;
  size_t UserHeldShares(const ParticipantId& user) const;
  const CostMeter& meter(const ParticipantId& id) const;
  std::vector<std::string> log() const;
  uint64_t auth_failures() const;

  // Test hooks.
  void ForgeSignature(const ParticipantId& user);

 private:
  void RunPhase();
  void CatchUpNewUsers();
  void InjectDropouts(DropoutCase c);
  std::vector<uint32_t> ActiveDomains() const;
  std::vector<uint32_t> AllDomains() const;
  internal::UserNode& user(const ParticipantId& id);
  const internal::UserNode& user(const ParticipantId& id) const;

  FederationConfig config_;
  std::unique_ptr<internal::Context> ctx_;
  std::map<ParticipantId, std::unique_ptr<internal::UserNode>> users_;
  std::vector<std::unique_ptr<internal::EdgeNode>> edges_;
  std::unique_ptr<internal::CentralNode> central_;
  bool setup_done_ = false;
  uint64_t epoch_ = 0;
  std::map<uint32_t, uint32_t> next_index_;
  std::set<ParticipantId> removed_;
  std::map<ParticipantId, DropoutCase> pending_dropouts_;
  RoundOutcome* outcome_ = nullptr;
};

}  // namespace fedgbt

#endif  // FEDGBT_FEDERATION_H_
