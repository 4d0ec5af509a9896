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

#include <cmath>
#include <limits>

#include "fedgbt/cart.h"
#include "fedgbt/data_io.h"
#include "fedgbt/error.h"
#include "fedgbt/loss.h"
#include "fedgbt/plaintext_trainer.h"
#include "fedgbt/split.h"

namespace fedgbt {
namespace {

Instance Dense(std::vector<double> values, double label) {
  Instance x;
  for (uint32_t f = 0; f < values.size(); ++f) {
    if (values[f] != 0) x.features.push_back({f, values[f]});
  }
  x.label = label;
  return x;
}

TEST(LossTest, LogisticAtZero) {
  const GradientPair gp = LogisticGradient(0.0, 1.0);
  EXPECT_DOUBLE_EQ(gp.g, -0.5);
  EXPECT_DOUBLE_EQ(gp.h, 0.25);
}

TEST(LossTest, SoftmaxUniformLogits) {
  const std::vector<double> logits(10, 0.0);
  const auto g = SoftmaxGradients(logits, 3);
  EXPECT_NEAR(g[3].g, -0.9, 1e-15);
  EXPECT_NEAR(g[0].g, 0.1, 1e-15);
  EXPECT_NEAR(g[0].h, 0.09, 1e-15);
}

TEST(LossTest, LogisticMatchesCentralDifferences) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double m = (rng.UniformDouble() - 0.5) * 12;
    const double y = rng.UniformBelow(2);
    const double e = 1e-4;
    const double g = (LogisticLoss(m + e, y) - LogisticLoss(m - e, y)) / (2 * e);
    const double h = (LogisticLoss(m + e, y) - 2 * LogisticLoss(m, y) + LogisticLoss(m - e, y)) / (e * e);
    const GradientPair gp = LogisticGradient(m, y);
    EXPECT_NEAR(gp.g, g, 1e-5 * std::max(1.0, std::abs(g)));
    EXPECT_NEAR(gp.h, h, 1e-5 * std::max(1.0, std::abs(h)) + 1e-6);
  }
}

TEST(LossTest, UnknownKindIsConfigurationError) {
  try {
    ParseLossKind("hinge");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfiguration);
  }
  EXPECT_EQ(ParseLossKind("softmax"), LossKind::kSoftmax);
  EXPECT_EQ(OutputCount(LossKind::kLogistic, 2), 1);
  EXPECT_EQ(OutputCount(LossKind::kSoftmax, 10), 10);
}

TEST(SplitScoreTest, HandValues) {
  EXPECT_DOUBLE_EQ(SplitScore(0, 0, 0, 0, 0, 0, 1.0), 0.0);
  const double expect = 4.0 / 4.0 + 1.0 / 3.0 - 1.0 / 6.0;
  EXPECT_NEAR(SplitScore(2, 3, -1, 2, 1, 5, 1.0), expect, 1e-15);
  EXPECT_NEAR(expect, 7.0 / 6.0, 1e-15);
}

TEST(SplitScoreTest, AdditivityViolationIsRejected) {
  try {
    SplitScore(2, 3, -1, 2, 5, 5, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAggregationConsistency);
  }
}

TEST(LeafWeightTest, ValuesAndQuadraticMinimum) {
  EXPECT_DOUBLE_EQ(LeafWeight(0, 3, 1), 0.0);
  EXPECT_DOUBLE_EQ(LeafWeight(4, 3, 1), -1.0);
  // The weight minimizes G w + (H + lambda) w^2 / 2.
  const double g = 2.7, h = 1.3, lambda = 0.5;
  const double w = LeafWeight(g, h, lambda);
  auto objective = [&](double v) { return g * v + 0.5 * (h + lambda) * v * v; };
  EXPECT_LT(objective(w), objective(w + 1e-3));
  EXPECT_LT(objective(w), objective(w - 1e-3));
  EXPECT_THROW(LeafWeight(1, -2, 1), Error);
}

TEST(CandidateTest, Midpoints) {
  const std::vector<double> v = {3, 1, 2, 2};
  EXPECT_EQ(EnumerateCandidates(v, 10), (std::vector<double>{1.5, 2.5}));
  const std::vector<double> constant = {4, 4, 4};
  EXPECT_TRUE(EnumerateCandidates(constant, 10).empty());
}

TEST(CandidateTest, CapIsHonored) {
  std::vector<double> v(10000);
  for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i) * 0.37;
  const auto c = EnumerateCandidates(v, 100);
  ASSERT_LE(c.size(), 100u);
  ASSERT_GE(c.size(), 90u);
  for (size_t i = 1; i < c.size(); ++i) EXPECT_LT(c[i - 1], c[i]);
  // Roughly evenly spaced quantiles over a uniform grid.
  const double span = v.back() - v.front();
  for (size_t i = 1; i < c.size(); ++i) EXPECT_LT(c[i] - c[i - 1], 3.0 * span / c.size());
}

TEST(FindBestSplitTest, MatchesBruteForceOnToyData) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    Dataset d;
    d.feature_count = 3;
    const size_t n = 2 + rng.UniformBelow(7);
    for (size_t i = 0; i < n; ++i) {
      d.instances.push_back(Dense({static_cast<double>(rng.UniformBelow(4)),
                                   static_cast<double>(rng.UniformBelow(3)),
                                   static_cast<double>(rng.UniformBelow(5))},
                                  static_cast<double>(rng.UniformBelow(2))));
    }
    const CandidateSchema schema = CandidateSchema::Build(d, 16);
    std::vector<GradientPair> gp;
    NodeStats parent;
    for (const auto& x : d.instances) {
      gp.push_back(LogisticGradient(rng.UniformDouble() - 0.5, x.label));
      parent.g += gp.back().g;
      parent.h += gp.back().h;
      parent.n += 1;
    }
    const std::vector<uint32_t> features = {0, 1, 2};
    std::vector<NodeStats> left;
    double best = -std::numeric_limits<double>::infinity();
    uint32_t best_f = 0;
    double best_t = 0;
    for (uint32_t f : features) {
      for (double t : schema.thresholds[f]) {
        NodeStats l;
        for (size_t i = 0; i < n; ++i) {
          if (d.instances[i].Get(f) < t) {
            l.g += gp[i].g;
            l.h += gp[i].h;
            l.n += 1;
          }
        }
        left.push_back(l);
        const double s = SplitScore(l.g, l.h, parent.g - l.g, parent.h - l.h, parent.g, parent.h, 1.0);
        if (l.n >= 1 && parent.n - l.n >= 1 && s / 2 > 0.0 && s > best + 1e-12) {
          best = s;
          best_f = f;
          best_t = t;
        }
      }
    }
    const SplitChoice c = FindBestSplit(parent, {features, &schema, left}, {1.0, 0.0, 1.0});
    if (best == -std::numeric_limits<double>::infinity()) {
      EXPECT_FALSE(c.valid);
    } else {
      ASSERT_TRUE(c.valid);
      EXPECT_NEAR(c.score, best, 1e-9);
      // Near-ties may resolve either way; the chosen split must score the same.
      NodeStats l;
      for (size_t i = 0; i < n; ++i) {
        if (d.instances[i].Get(c.feature) < c.threshold) {
          l.g += gp[i].g;
          l.h += gp[i].h;
        }
      }
      EXPECT_NEAR(SplitScore(l.g, l.h, parent.g - l.g, parent.h - l.h, parent.g, parent.h, 1.0),
                  best, 1e-9);
      (void)best_f;
      (void)best_t;
    }
  }
}

TEST(FindBestSplitTest, GammaGateAndTieBreak) {
  CandidateSchema schema;
  schema.thresholds = {{0.5}, {0.5}};
  const std::vector<uint32_t> features = {1, 0};
  const NodeStats parent{0.0, 2.0, 2.0};
  // Identical splits on both features: the lower feature id wins even when
  // listed second.
  const std::vector<NodeStats> left = {{-1.0, 1.0, 1.0}, {-1.0, 1.0, 1.0}};
  SplitChoice c = FindBestSplit(parent, {features, &schema, left}, {1.0, 0.0, 1.0});
  ASSERT_TRUE(c.valid);
  EXPECT_EQ(c.feature, 0u);
  // score = 0.5 + 0.5 - 0 = 1; gate score/2 > gamma.
  c = FindBestSplit(parent, {features, &schema, left}, {1.0, 0.5, 1.0});
  EXPECT_FALSE(c.valid);
  c = FindBestSplit(parent, {features, &schema, left}, {1.0, 0.49, 1.0});
  EXPECT_TRUE(c.valid);
  c = FindBestSplit(parent, {features, &schema, left}, {1.0, 0.0, 2.0});
  EXPECT_FALSE(c.valid);
}

TEST(LeftSumsTest, MatchesDirectCount) {
  Dataset d = MakeSynthetic(60, 4, 3);
  const CandidateSchema schema = CandidateSchema::Build(d, 8);
  const DenseMatrix x(d);
  std::vector<size_t> rows;
  std::vector<std::array<double, 3>> stats;
  for (size_t i = 0; i < d.size(); i += 2) {
    rows.push_back(i);
    stats.push_back({static_cast<double>(i), 1.0, 1.0});
  }
  const std::vector<uint32_t> features = {3, 1};
  std::vector<std::array<double, 3>> slots(CandidateSlotCount(schema, features));
  AccumulateLeftSums<double>(schema, features, x, rows, stats, slots);
  size_t k = 0;
  for (uint32_t f : features) {
    for (double t : schema.thresholds[f]) {
      double g = 0, n = 0;
      for (size_t r = 0; r < rows.size(); ++r) {
        if (x.at(rows[r], f) < t) {
          g += stats[r][0];
          n += 1;
        }
      }
      EXPECT_EQ(slots[k][0], g);
      EXPECT_EQ(slots[k][2], n);
      ++k;
    }
  }
}

TEST(CartTest, RoutingAndPrediction) {
  Cart tree;
  const int32_t l = tree.Split(0, 0, 2.0);
  tree.SetWeight(l, -1.0);
  tree.SetWeight(l + 1, 1.0);
  EXPECT_TRUE(tree.WellFormed(1));
  EXPECT_FALSE(tree.WellFormed(0));
  const std::vector<Cart> trees = {tree};
  EXPECT_DOUBLE_EQ(Predict(trees, 0.3, Dense({1.0}, 0)), -0.3);
  EXPECT_DOUBLE_EQ(Predict(trees, 0.3, Dense({2.0}, 0)), 0.3);
  EXPECT_DOUBLE_EQ(Predict({}, 0.3, Dense({2.0}, 0)), 0.0);
  EXPECT_EQ(tree.InternalNodes(), std::vector<int32_t>{0});
  EXPECT_THROW(tree.Split(0, 1, 1.0), Error);
}

TEST(CartTest, BatchEqualsSingle) {
  Dataset d = MakeSynthetic(300, 5, 4);
  const Model m = TrainPlaintext(d, CandidateSchema::Build(d, 16), BoostParams{}, {});
  const auto batch = PredictBatch(m.trees, m.eta, d.instances);
  for (size_t i = 0; i < d.size(); ++i) {
    EXPECT_DOUBLE_EQ(batch[i], Predict(m.trees, m.eta, d.instances[i]));
  }
}

TEST(TrainPlaintextTest, SingleInstanceIsOneLeaf) {
  Dataset d;
  d.feature_count = 1;
  d.instances = {Dense({1.0}, 1.0)};
  BoostParams p;
  p.max_depth = 1;
  p.rounds = 1;
  const Model m = TrainPlaintext(d, CandidateSchema::Build(d, 4), p, {});
  ASSERT_EQ(m.trees.size(), 1u);
  ASSERT_EQ(m.trees[0].nodes().size(), 1u);
  EXPECT_DOUBLE_EQ(m.trees[0].node(0).weight, LeafWeight(-0.5, 0.25, 1.0));
}

TEST(TrainPlaintextTest, SeparableSetIsLearned) {
  Dataset d;
  d.feature_count = 2;
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.UniformDouble(), b = rng.UniformDouble();
    d.instances.push_back(Dense({a, b}, a + b > 1.0 ? 1.0 : 0.0));
  }
  const Model m = TrainPlaintext(d, CandidateSchema::Build(d, 32), BoostParams{}, {});
  EXPECT_GE(Evaluate(m, d).accuracy, 0.95);
}

TEST(TrainPlaintextTest, LossNonIncreasingAndDeterministic) {
  Dataset d = MakeSynthetic(500, 6, 7);
  const CandidateSchema schema = CandidateSchema::Build(d, 16);
  std::vector<double> losses;
  PlaintextOptions opt;
  opt.on_round = [&](int, const Model& m) { losses.push_back(Evaluate(m, d).loss); };
  BoostParams p;
  p.rounds = 15;
  const Model a = TrainPlaintext(d, schema, p, opt);
  for (size_t i = 1; i < losses.size(); ++i) EXPECT_LE(losses[i], losses[i - 1] + 1e-12);
  const Model b = TrainPlaintext(d, schema, p, {});
  EXPECT_EQ(a.trees, b.trees);
  for (const auto& t : a.trees) EXPECT_TRUE(t.WellFormed(p.max_depth));
}

TEST(TrainPlaintextTest, SoftmaxGrowsOneTreePerClass) {
  Dataset d = MakeSynthetic(200, 4, 8);
  for (size_t i = 0; i < d.size(); ++i) d.instances[i].label = static_cast<double>(i % 3);
  d.class_count = 3;
  BoostParams p;
  p.rounds = 2;
  PlaintextOptions opt;
  opt.loss = LossKind::kSoftmax;
  const Model m = TrainPlaintext(d, CandidateSchema::Build(d, 8), p, opt);
  ASSERT_EQ(m.trees.size(), 6u);
  for (size_t i = 0; i < m.trees.size(); ++i) EXPECT_EQ(m.trees[i].output(), static_cast<int>(i % 3));
}

TEST(SampleFeaturesTest, SortedDistinctAndCapped) {
  const auto f = SampleFeatures(1, 3, 50, 10);
  ASSERT_EQ(f.size(), 10u);
  for (size_t i = 1; i < f.size(); ++i) EXPECT_LT(f[i - 1], f[i]);
  EXPECT_EQ(SampleFeatures(1, 3, 50, 10), f);
  EXPECT_EQ(SampleFeatures(1, 3, 5, 100).size(), 5u);
}

TEST(BoostParamsTest, Validation) {
  BoostParams p;
  EXPECT_NO_THROW(p.Validate());
  p.eta = 0;
  EXPECT_THROW(p.Validate(), Error);
  p = BoostParams{};
  p.max_depth = 0;
  EXPECT_THROW(p.Validate(), Error);
  p = BoostParams{};
  p.lambda = -1;
  EXPECT_THROW(p.Validate(), Error);
}

}  // namespace
}  // namespace fedgbt
