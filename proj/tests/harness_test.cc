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

#include <gtest/gtest.h>

#include <set>

#include "fedgbt/data_io.h"
#include "fedgbt/error.h"
#include "fedgbt/harness.h"

namespace fedgbt {
namespace {

RunConfig SmallRun(uint32_t users, uint32_t edges, int rounds) {
  RunConfig c;
  c.users = users;
  c.federation.edges = edges;
  c.federation.boost.rounds = rounds;
  c.federation.seed = 17;
  c.max_candidates = 16;
  return c;
}

RunInputs SmallInputs(size_t train, size_t reserve = 0) {
  RunInputs in;
  Dataset all = MakeSynthetic(train + reserve + 200, 5, 17);
  std::vector<size_t> a, b, c;
  for (size_t i = 0; i < all.size(); ++i) {
    (i < train ? a : i < train + reserve ? c : b).push_back(i);
  }
  in.train = all.Subset(a);
  in.test = all.Subset(b);
  in.reserve = all.Subset(c);
  return in;
}

TEST(DropoutScheduleTest, FiresOnPeriod) {
  DropoutSchedule s{0.1, 10, DropoutCase::kDuringSecFind};
  EXPECT_FALSE(s.Fires(0));
  EXPECT_TRUE(s.Fires(9));
  EXPECT_TRUE(s.Fires(19));
  EXPECT_FALSE(s.Fires(10));
  s.rate = 0;
  EXPECT_FALSE(s.Fires(9));
}

TEST(DropoutScheduleTest, Validation) {
  EXPECT_THROW((DropoutSchedule{1.0, 10, DropoutCase::kBeforeUpload}.Validate()), Error);
  EXPECT_THROW((DropoutSchedule{-0.1, 10, DropoutCase::kBeforeUpload}.Validate()), Error);
  EXPECT_THROW((DropoutSchedule{0.1, 0, DropoutCase::kBeforeUpload}.Validate()), Error);
  EXPECT_NO_THROW((DropoutSchedule{0.3, 1, DropoutCase::kBeforeUpload}.Validate()));
}

TEST(InjectDropoutTest, PerDomainCounts) {
  std::vector<ParticipantId> live;
  for (uint32_t d = 1; d <= 3; ++d) {
    for (uint32_t i = 1; i <= 10; ++i) live.push_back(ParticipantId::User(d, i));
  }
  Rng rng(3);
  const DropoutSchedule s{0.2, 1, DropoutCase::kDuringSecFind};
  const auto out = InjectDropout(s, 0, live, rng);
  ASSERT_EQ(out.size(), 6u);
  std::map<uint32_t, int> per;
  for (const auto& id : out) ++per[id.domain];
  for (uint32_t d = 1; d <= 3; ++d) EXPECT_EQ(per[d], 2);
  EXPECT_EQ(std::set<ParticipantId>(out.begin(), out.end()).size(), out.size());
  const DropoutSchedule idle{0.2, 5, DropoutCase::kDuringSecFind};
  EXPECT_TRUE(InjectDropout(idle, 0, live, rng).empty());
}

TEST(RunTest, MetricsAndDeterminism) {
  const RunConfig c = SmallRun(6, 2, 3);
  const RunInputs in = SmallInputs(300);
  const RunResult a = fedgbt::Run(c, in);
  ASSERT_EQ(a.metrics.rounds.size(), 3u);
  EXPECT_EQ(a.model.trees.size(), 3u);
  for (size_t k = 1; k < 3; ++k) {
    EXPECT_GE(a.metrics.rounds[k].messages, a.metrics.rounds[k - 1].messages);
  }
  EXPECT_GT(a.metrics.rounds.back().accuracy, 0.6);
  EXPECT_TRUE(a.metrics.audit.clean());
  EXPECT_GT(a.metrics.audit.user_to_edge, 0u);
  EXPECT_GT(a.metrics.audit.edge_to_central, 0u);
  EXPECT_EQ(a.metrics.roles.at(Role::kUser).participants, 6u);
  EXPECT_EQ(a.metrics.roles.at(Role::kEdge).participants, 2u);
  EXPECT_GT(a.metrics.roles.at(Role::kUser).mean_us(), 0.0);
  const RunResult b = fedgbt::Run(c, in);
  EXPECT_EQ(RoundsCsv(a.metrics), RoundsCsv(b.metrics));
  EXPECT_EQ(a.metrics.transcript_hash, b.metrics.transcript_hash);
  RunConfig other = c;
  other.federation.seed = 18;
  EXPECT_NE(fedgbt::Run(other, in).metrics.transcript_hash, a.metrics.transcript_hash);
}

TEST(RunTest, DropoutsAreReplacedFromReserve) {
  RunConfig c = SmallRun(10, 2, 4);
  c.dropout = {0.2, 2, DropoutCase::kDuringSecFind};
  const RunResult r = fedgbt::Run(c, SmallInputs(300, 300));
  size_t dropped = 0, replaced = 0;
  for (const auto& m : r.metrics.rounds) {
    EXPECT_TRUE(m.completed);
    dropped += m.dropped;
    replaced += m.replaced;
  }
  EXPECT_EQ(dropped, 4u);
  EXPECT_EQ(replaced, 4u);
  EXPECT_EQ(r.metrics.roles.at(Role::kUser).participants, 14u);
}

TEST(RunTest, RejectsMoreEdgesThanUsers) {
  try {
    fedgbt::Run(SmallRun(2, 3, 1), SmallInputs(100));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfiguration);
  }
}

TEST(RoundsCsvTest, HeaderAndRows) {
  RunMetrics m;
  m.rounds.push_back({1, true, 0.75, 0.5, 0, 0, 0, 10, 100});
  const std::string csv = RoundsCsv(m);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "round,completed,accuracy,loss,dropped,replaced,aborted_domains,messages,bytes");
  EXPECT_NE(csv.find("\n1,"), std::string::npos);
}

}  // namespace
}  // namespace fedgbt
