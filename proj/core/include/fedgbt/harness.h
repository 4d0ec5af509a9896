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

#ifndef FEDGBT_HARNESS_H_
#define FEDGBT_HARNESS_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fedgbt/bus.h"
#include "fedgbt/cart.h"
#include "fedgbt/cost_model.h"
#include "fedgbt/dataset.h"
#include "fedgbt/federation.h"

namespace fedgbt {

// Users disconnect on every round whose 1-based number is a multiple of
// `period`; each domain loses round(rate * live users) of them at `scope`.
struct DropoutSchedule {
  double rate = 0.0;
  int period = 10;
  DropoutCase scope = DropoutCase::kDuringSecFind;

  // kConfiguration unless rate in [0, 1) and period >= 1.
  void Validate() const;
  bool Fires(int round) const { return rate > 0 && (round + 1) % period == 0; }
};

// Picks the users to disconnect this round (empty when the schedule does
// not fire). Users are drawn per domain without replacement.
std::vector<ParticipantId> InjectDropout(const DropoutSchedule& schedule, int round,
                                         const std::vector<ParticipantId>& live, Rng& rng);

struct RunConfig {
  FederationConfig federation;
  uint32_t users = 20;
  size_t max_candidates = 32;
  DropoutSchedule dropout;
  CostModel cost;
  // Uptime values for kUptime selection are drawn uniformly in
  // [min_uptime, 1] per user.
  double min_uptime = 0.5;
};

struct RunInputs {
  Dataset train;
  Dataset test;
  // Fresh data for replacement users, consumed one partition-sized chunk
  // at a time. May be empty when no dropout is scheduled.
  Dataset reserve;
};

struct RoundMetrics {
  int round = 0;
  bool completed = false;
  double accuracy = 0.0;
  double loss = 0.0;
  size_t dropped = 0;
  size_t replaced = 0;
  size_t aborted_domains = 0;
  uint64_t messages = 0;  // cumulative
  uint64_t bytes = 0;     // cumulative
};

struct RoleTotals {
  size_t participants = 0;
  uint64_t messages_sent = 0;
  uint64_t bytes_sent = 0;
  uint64_t messages_received = 0;
  uint64_t bytes_received = 0;
  std::array<double, kStageCount> stage_us{};  // summed over participants

  double mean_bytes() const {
    return participants == 0 ? 0.0
                             : static_cast<double>(bytes_sent + bytes_received) / participants;
  }
  double mean_us() const;
};

// Counts from the transcript observer.
struct PrivacyAudit {
  uint64_t messages = 0;
  uint64_t user_to_edge = 0;
  uint64_t edge_to_central = 0;
  uint64_t raw_payloads = 0;       // raw gradient or raw threshold anywhere
  uint64_t untagged_numeric = 0;   // user->edge or edge->central outside the allowed tags

  bool clean() const { return raw_payloads == 0 && untagged_numeric == 0; }
};

struct RunMetrics {
  std::vector<RoundMetrics> rounds;
  std::map<Role, RoleTotals> roles;
  uint64_t messages_sent = 0;
  uint64_t messages_delivered = 0;
  uint64_t messages_discarded = 0;
  uint64_t auth_failures = 0;
  double wall_seconds = 0.0;
  std::string transcript_hash;
  PrivacyAudit audit;
  std::vector<std::string> log;
};

struct RunResult {
  RunMetrics metrics;
  Model model;
};

// One full training run: partitions `train` across users round-robin over
// the domains, trains config.federation.boost.rounds rounds with the
// dropout schedule and replacements, and evaluates on `test` after every
// round. kIncompleteRound when a round fails in every domain on every
// attempt; kConfiguration on invalid settings.
RunResult Run(const RunConfig& config, const RunInputs& inputs);

// Metrics rendered as CSV, one row per round. Contains no wall-clock data,
// so equal runs render byte-identically.
std::string RoundsCsv(const RunMetrics& metrics);

}  // namespace fedgbt

#endif  // FEDGBT_HARNESS_H_
