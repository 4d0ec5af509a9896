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

#include "fedgbt/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fedgbt/data_io.h"
#include "fedgbt/error.h"

namespace fedgbt {
namespace {

bool NumericTagAllowed(PayloadClass c) {
  switch (c) {
    case PayloadClass::kShare:
    case PayloadClass::kMaskedValue:
    case PayloadClass::kCiphertext:
    // Key material, signatures and control headers carry no training data.
    case PayloadClass::kPublicKey:
    case PayloadClass::kSignature:
    case PayloadClass::kControl:
      return true;
    default:
      return false;
  }
}

bool IsRaw(PayloadClass c) {
  return c == PayloadClass::kRawGradient || c == PayloadClass::kRawThreshold;
}

void Audit(PrivacyAudit& audit, const Envelope& e) {
  ++audit.messages;
  if (IsRaw(e.payload_class) || IsRaw(e.inner_class)) ++audit.raw_payloads;
  const bool up = e.sender.role == Role::kUser && e.receiver.role == Role::kEdge;
  const bool to_central = e.sender.role == Role::kEdge && e.receiver.role == Role::kCentral;
  if (up) ++audit.user_to_edge;
  if (to_central) ++audit.edge_to_central;
  if ((up || to_central) && !NumericTagAllowed(e.payload_class)) ++audit.untagged_numeric;
}

}  // namespace

void DropoutSchedule::Validate() const {
  if (!(rate >= 0 && rate < 1)) {
    throw Error(ErrorCode::kConfiguration, "dropout rate must be in [0, 1)");
  }
  if (period < 1) throw Error(ErrorCode::kConfiguration, "dropout period must be >= 1");
}

std::vector<ParticipantId> InjectDropout(const DropoutSchedule& schedule, int round,
                                         const std::vector<ParticipantId>& live, Rng& rng) {
  std::vector<ParticipantId> out;
  if (!schedule.Fires(round)) return out;
  std::map<uint32_t, std::vector<ParticipantId>> by_domain;
  for (const auto& id : live) by_domain[id.domain].push_back(id);
  for (auto& [domain, ids] : by_domain) {
    const size_t count = static_cast<size_t>(std::llround(schedule.rate * ids.size()));
    for (size_t k : rng.SampleWithoutReplacement(ids.size(), std::min(count, ids.size()))) {
      out.push_back(ids[k]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double RoleTotals::mean_us() const {
  if (participants == 0) return 0.0;
  return std::accumulate(stage_us.begin(), stage_us.end(), 0.0) / participants;
}

RunResult Run(const RunConfig& config, const RunInputs& inputs) {
  const auto start = std::chrono::steady_clock::now();
  config.dropout.Validate();
  const FederationConfig& fc = config.federation;
  if (config.users < fc.edges) {
    throw Error(ErrorCode::kConfiguration, "every edge needs at least one user (" +
                                               std::to_string(config.users) + " users, " +
                                               std::to_string(fc.edges) + " edges)");
  }
  const PrimeField field(fc.field_modulus);
  const FixedPointCodec codec(field, fc.fractional_bits);
  Dataset train = inputs.train;
  Dataset test = inputs.test;
  Dataset reserve = inputs.reserve;
  QuantizeFeatures(train, codec);
  QuantizeFeatures(test, codec);
  QuantizeFeatures(reserve, codec);

  Federation fed(fc, CandidateSchema::Build(train, config.max_candidates), train.feature_count,
                 train.class_count, config.cost);
  PrivacyAudit audit;
  fed.bus().SetObserver([&audit](const Envelope& e) { Audit(audit, e); });

  auto uptime = [&](uint64_t k) {
    Rng r = Rng::Derive(fc.seed, "uptime", k);
    return config.min_uptime + (1.0 - config.min_uptime) * r.UniformDouble();
  };
  const auto parts = Partition(train.size(), config.users, fc.seed);
  for (uint32_t u = 0; u < config.users; ++u) {
    fed.AddUser(u % fc.edges + 1, train.Subset(parts[u]), uptime(u));
  }
  fed.SetupRun();

  const size_t chunk = std::max<size_t>(1, train.size() / config.users);
  size_t reserve_pos = 0;
  uint64_t joined = config.users;
  Rng dropout_rng = Rng::Derive(fc.seed, "dropout", 0);
  RunResult result;
  auto& metrics = result.metrics;
  for (int k = 0; k < fc.boost.rounds; ++k) {
    std::map<ParticipantId, DropoutCase> dropouts;
    for (const auto& id : InjectDropout(config.dropout, k, fed.live_users(), dropout_rng)) {
      dropouts[id] = config.dropout.scope;
    }
    RoundOutcome outcome = fed.TrainRound(k, dropouts);
    if (!outcome.completed) {
      std::string why;
      for (const auto& line : fed.log()) why += "\n  " + line;
      throw Error(ErrorCode::kIncompleteRound,
                  "round " + std::to_string(k + 1) + " failed in every domain" + why);
    }
    RoundMetrics rm;
    rm.round = k + 1;
    rm.completed = true;
    rm.dropped = outcome.dropped.size();
    rm.aborted_domains = outcome.aborted_domains.size();
    for (const auto& gone : outcome.dropped) {
      // Once the reserve runs out the domain continues with fewer users.
      if (reserve_pos + chunk > reserve.size()) continue;
      std::vector<size_t> idx(chunk);
      std::iota(idx.begin(), idx.end(), reserve_pos);
      reserve_pos += chunk;
      fed.AddUser(gone.domain, reserve.Subset(idx), uptime(joined++));
      ++rm.replaced;
    }
    Evaluation ev = Evaluate(fed.model(), test);
    rm.accuracy = ev.accuracy;
    rm.loss = ev.loss;
    rm.messages = fed.bus().sent();
    for (const auto& [id, t] : fed.bus().traffic()) rm.bytes += t.bytes_sent;
    metrics.rounds.push_back(rm);
  }

  std::vector<ParticipantId> everyone = fed.users();
  everyone.push_back(ParticipantId::Central());
  for (uint32_t d = 1; d <= fc.edges; ++d) everyone.push_back(ParticipantId::Edge(d));
  for (const auto& id : everyone) {
    RoleTotals& totals = metrics.roles[id.role];
    const TrafficStats t = fed.bus().traffic(id);
    ++totals.participants;
    totals.messages_sent += t.messages_sent;
    totals.bytes_sent += t.bytes_sent;
    totals.messages_received += t.messages_received;
    totals.bytes_received += t.bytes_received;
    const CostMeter& meter = fed.meter(id);
    for (size_t s = 0; s < kStageCount; ++s) {
      totals.stage_us[s] += meter.stage_us(static_cast<Stage>(s));
    }
  }
  metrics.messages_sent = fed.bus().sent();
  metrics.messages_delivered = fed.bus().delivered();
  metrics.messages_discarded = fed.bus().discarded();
  metrics.auth_failures = fed.auth_failures();
  metrics.transcript_hash = HexEncode(fed.bus().TranscriptHash());
  metrics.audit = audit;
  metrics.log = fed.log();
  metrics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.model = fed.model();
  return result;
}

std::string RoundsCsv(const RunMetrics& metrics) {
  std::ostringstream out;
  out.precision(17);
  out << "round,completed,accuracy,loss,dropped,replaced,aborted_domains,messages,bytes\n";
  for (const auto& r : metrics.rounds) {
    out << r.round << ',' << (r.completed ? 1 : 0) << ',' << r.accuracy << ',' << r.loss << ','
        << r.dropped << ',' << r.replaced << ',' << r.aborted_domains << ',' << r.messages << ','
        << r.bytes << '\n';
  }
  return out.str();
}

}  // namespace fedgbt
