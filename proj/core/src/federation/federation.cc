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

#include "fedgbt/federation.h"

#include "federation/nodes.h"
#include "fedgbt/error.h"

namespace fedgbt {
namespace {

constexpr int kMaxAttempts = 3;

uint64_t KeyIssuerIndex(const ParticipantId& id) {
  return (static_cast<uint64_t>(id.domain) << 32) | id.index;
}

}  // namespace

Federation::Federation(const FederationConfig& config, CandidateSchema schema,
                       uint32_t feature_count, uint32_t class_count, const CostModel& cost)
    : config_(config) {
  config_.boost.Validate();
  if (config_.edges == 0) throw Error(ErrorCode::kConfiguration, "at least one edge is required");
  if (schema.feature_count() != feature_count) {
    throw Error(ErrorCode::kConfiguration, "candidate schema does not match the feature count");
  }
  if (!(config_.select_fraction > 0 && config_.select_fraction <= 1)) {
    throw Error(ErrorCode::kConfiguration, "select_fraction must be in (0, 1]");
  }
  ctx_ = std::make_unique<internal::Context>(config_, std::move(schema), feature_count,
                                             class_count, cost);
  const uint32_t t = ctx_->edge_threshold;
  if (t == 0 || PartiesRequired(t) > config_.edges) {
    throw Error(ErrorCode::kThreshold, "edge threshold " + std::to_string(t) + " needs " +
                                           std::to_string(2 * t - 1) + " edges, have " +
                                           std::to_string(config_.edges));
  }
  central_ = std::make_unique<internal::CentralNode>(*ctx_);
  for (uint32_t d = 1; d <= config_.edges; ++d) {
    edges_.push_back(std::make_unique<internal::EdgeNode>(*ctx_, d));
  }
}

Federation::~Federation() = default;

ParticipantId Federation::AddUser(uint32_t domain, Dataset data, double uptime) {
  if (domain == 0 || domain > config_.edges) {
    throw Error(ErrorCode::kConfiguration, "domain " + std::to_string(domain) + " out of range");
  }
  if (data.feature_count > ctx_->feature_count) {
    throw Error(ErrorCode::kConfiguration, "user data has more features than the schema");
  }
  const ParticipantId id = ParticipantId::User(domain, ++next_index_[domain]);
  Rng issuer = Rng::Derive(config_.seed, "key-issuer", KeyIssuerIndex(id));
  KeyPair sign_key = KeyGen(ctx_->params, KeyPurpose::kSign, issuer);
  ctx_->verify_keys[id] = sign_key.public_key;
  ctx_->uptime[id] = uptime;
  auto node = std::make_unique<internal::UserNode>(*ctx_, id, std::move(data), std::move(sign_key));
  node->GenerateEncryptionKey();
  if (!setup_done_ || central_->model().trees.empty()) node->set_caught_up();
  users_[id] = std::move(node);
  edges_[domain - 1]->AddUser(id.index);
  return id;
}

void Federation::RemoveUser(const ParticipantId& id) {
  user(id);
  if (!removed_.insert(id).second) return;
  ctx_->bus.Disconnect(id);
  edges_[id.domain - 1]->RemoveUser(id.index);
}

void Federation::SetupRun() {
  for (const auto& edge : edges_) {
    if (edge->domain_users().empty()) {
      throw Error(ErrorCode::kConfiguration,
                  "domain " + std::to_string(edge->id().domain) + " has no users");
    }
  }
  ctx_->stage = Stage::kSetup;
  central_->GenerateEncryptionKey();
  for (auto& edge : edges_) {
    edge->GenerateEncryptionKey();
    edge->SetCentralKey(central_->ek().public_key);
    central_->SetEdgeKey(edge->id().domain, edge->ek().public_key);
  }
  central_->PublishParams(AllDomains());
  central_->PublishCandidates(AllDomains());
  RunPhase();
  setup_done_ = true;
}

void Federation::RunPhase() { ctx_->bus.DeliverAll(); }

std::vector<uint32_t> Federation::AllDomains() const {
  std::vector<uint32_t> out;
  for (uint32_t d = 1; d <= config_.edges; ++d) out.push_back(d);
  return out;
}

std::vector<uint32_t> Federation::ActiveDomains() const {
  std::vector<uint32_t> out;
  for (const auto& edge : edges_) {
    if (edge->active()) out.push_back(edge->id().domain);
  }
  return out;
}

void Federation::InjectDropouts(DropoutCase c) {
  for (auto it = pending_dropouts_.begin(); it != pending_dropouts_.end();) {
    if (it->second != c) {
      ++it;
      continue;
    }
    HandleDropout(c, it->first);
    it = pending_dropouts_.erase(it);
  }
}

void Federation::HandleDropout(DropoutCase c, const ParticipantId& id) {
  if (removed_.contains(id)) return;
  RemoveUser(id);
  ctx_->log.push_back(id.ToString() + " dropped out (" + DropoutCaseName(c) + ")");
  if (outcome_ != nullptr) outcome_->dropped.push_back(id);
}

void Federation::CatchUpNewUsers() {
  std::vector<ParticipantId> behind;
  for (auto& [id, node] : users_) {
    if (!node->caught_up() && !removed_.contains(id)) behind.push_back(id);
  }
  if (behind.empty()) return;
  std::vector<int> all(central_->model().trees.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  if (!all.empty()) SecPred(all, behind, true);
  for (const auto& id : behind) user(id).set_caught_up();
}

RoundOutcome Federation::TrainRound(int round,
                                       const std::map<ParticipantId, DropoutCase>& dropouts) {
  if (!setup_done_) throw Error(ErrorCode::kRuntime, "SetupRun must precede training");
  RoundOutcome outcome;
  outcome_ = &outcome;
  pending_dropouts_ = dropouts;
  const size_t base = central_->model().trees.size();
  for (int attempt = 1; attempt <= kMaxAttempts && !outcome.completed; ++attempt) {
    try {
      CatchUpNewUsers();
      const uint64_t epoch = ++epoch_;
      central_->set_epoch(epoch);
      SelectUsers(epoch);
      InjectDropouts(DropoutCase::kBeforeUpload);
      CollectKeyShares();
      for (int c = 0; c < ctx_->outputs; ++c) {
        Cart tree = BuildTree(round, c);
        central_->model().trees.push_back(std::move(tree));
        InjectDropouts(DropoutCase::kDuringSecPred);
        SecPred({static_cast<int>(central_->model().trees.size() - 1)}, live_users(), false);
      }
      central_->Commit(AllDomains(), epoch);
      RunPhase();
      outcome.completed = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kIncompleteRound) {
        outcome_ = nullptr;
        throw;
      }
      ctx_->log.push_back("round " + std::to_string(round) + " attempt " +
                          std::to_string(attempt) + " abandoned: " + e.what());
      central_->model().trees.resize(base);
      RunPhase();
    }
  }
  for (const auto& edge : edges_) {
    if (!edge->active()) outcome.aborted_domains.push_back(edge->id().domain);
    for (uint32_t index : edge->excluded()) {
      outcome.excluded.push_back(ParticipantId::User(edge->id().domain, index));
    }
  }
  pending_dropouts_.clear();
  outcome_ = nullptr;
  return outcome;
}

void Federation::SelectUsers(uint64_t epoch) {
  ctx_->stage = Stage::kSelection;
  central_->set_epoch(epoch);
  for (auto& edge : edges_) edge->BeginSelection(epoch);
  RunPhase();
}

void Federation::CollectKeyShares() {
  ctx_->stage = Stage::kKeyShares;
  for (auto& edge : edges_) edge->SendRosterKeys();
  RunPhase();
  for (auto& edge : edges_) edge->FreezeRoster();
  RunPhase();
}

Cart Federation::BuildTree(int round, int output) {
  ctx_->stage = Stage::kSecFind;
  auto features = SampleFeatures(config_.seed,
                                 static_cast<uint64_t>(round) * ctx_->outputs + output,
                                 ctx_->feature_count, config_.boost.feature_subsample);
  central_->BeginTree(round, output, std::move(features));
  while (central_->tree_open()) {
    const auto active = ActiveDomains();
    if (active.empty()) {
      throw Error(ErrorCode::kIncompleteRound, "every domain aborted");
    }
    central_->RequestLevel(active);
    RunPhase();
    if (central_->level() == 0) InjectDropouts(DropoutCase::kDuringSecFind);
    for (auto& [id, node] : users_) {
      if (ctx_->bus.connected(id)) node->UploadLevel();
    }
    RunPhase();
    for (auto& edge : edges_) edge->BeginAggregation();
    RunPhase();
    for (auto& edge : edges_) edge->FinishAggregation();
    RunPhase();
    auto batch = central_->FinishLevel(active);
    if (!batch) throw Error(ErrorCode::kIncompleteRound, "no domain aggregate at this level");
    if (*batch != 0) {
      RunPhase();
      for (auto& edge : edges_) edge->StartComparisons(*batch);
      RunPhase();
    }
  }
  return central_->FinishTree();
}

void Federation::SecPred(const std::vector<int>& tree_indices,
                         const std::vector<ParticipantId>& targets, bool commit_directly) {
  ctx_->stage = Stage::kSecPred;
  std::map<uint32_t, std::vector<uint32_t>> by_domain;
  for (const auto& id : targets) {
    if (removed_.contains(id) || !ctx_->bus.connected(id)) continue;
    by_domain[id.domain].push_back(id.index);
  }
  if (by_domain.empty() || tree_indices.empty()) return;
  const uint64_t batch = central_->StartPrediction(tree_indices, by_domain, commit_directly);
  RunPhase();
  for (auto& edge : edges_) edge->StartComparisons(batch);
  RunPhase();
}

const Model& Federation::model() const { return central_->model(); }
MessageBus& Federation::bus() { return ctx_->bus; }
uint32_t Federation::edge_threshold() const { return ctx_->edge_threshold; }
const PublicParams& Federation::public_params() const { return ctx_->params; }

std::vector<ParticipantId> Federation::users() const {
  std::vector<ParticipantId> out;
  for (const auto& [id, node] : users_) out.push_back(id);
  return out;
}

std::vector<ParticipantId> Federation::live_users() const {
  std::vector<ParticipantId> out;
  for (const auto& [id, node] : users_) {
    if (!removed_.contains(id) && ctx_->bus.connected(id)) out.push_back(id);
  }
  return out;
}

std::vector<DomainRosterView> Federation::rosters() const {
  std::vector<DomainRosterView> out;
  for (const auto& edge : edges_) out.push_back(edge->roster());
  return out;
}

internal::UserNode& Federation::user(const ParticipantId& id) {
  auto it = users_.find(id);
  if (it == users_.end()) throw Error(ErrorCode::kRoster, "unknown user " + id.ToString());
  return *it->second;
}

const internal::UserNode& Federation::user(const ParticipantId& id) const {
  auto it = users_.find(id);
  if (it == users_.end()) throw Error(ErrorCode::kRoster, "unknown user " + id.ToString());
  return *it->second;
}

const std::vector<std::vector<double>>& Federation::UserMargins(const ParticipantId& id) const {
  return user(id).margins();
}

size_t Federation::UserHeldShares(const ParticipantId& id) const {
  return user(id).held_shares();
}

const CostMeter& Federation::meter(const ParticipantId& id) const {
  switch (id.role) {
    case Role::kCentral: return central_->meter();
    case Role::kEdge:
      if (id.domain == 0 || id.domain > edges_.size()) {
        throw Error(ErrorCode::kRoster, "unknown edge " + id.ToString());
      }
      return edges_[id.domain - 1]->meter();
    case Role::kUser: return user(id).meter();
  }
  throw Error(ErrorCode::kRoster, "unknown participant");
}

std::vector<std::string> Federation::log() const { return ctx_->log; }
uint64_t Federation::auth_failures() const { return ctx_->auth_failures; }

void Federation::ForgeSignature(const ParticipantId& id) { user(id).ForgeSignatures(); }

}  // namespace fedgbt
