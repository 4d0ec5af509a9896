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

#ifndef FEDGBT_PLAINTEXT_TRAINER_H_
#define FEDGBT_PLAINTEXT_TRAINER_H_

#include <cstdint>
#include <functional>

#include "fedgbt/cart.h"
#include "fedgbt/dataset.h"
#include "fedgbt/finite_field.h"
#include "fedgbt/loss.h"
#include "fedgbt/split.h"

namespace fedgbt {

struct BoostParams {
  double eta = 0.3;
  double gamma = 0.1;
  double lambda = 1.0;
  int max_depth = 3;
  int rounds = 10;
  size_t feature_subsample = 100;
  double min_instances = 1.0;

  // kConfiguration unless eta in (0,1], lambda >= 0, max_depth >= 1,
  // rounds >= 0, feature_subsample >= 1, min_instances >= 1.
  void Validate() const;
  SplitRules rules() const { return {lambda, gamma, min_instances}; }
};

struct PlaintextOptions {
  LossKind loss = LossKind::kLogistic;
  uint64_t seed = 1;
  // When set, per-instance g and h are rounded to the codec grid and summed
  // as integers, which is exactly what the federated aggregation computes.
  const FixedPointCodec* quantize = nullptr;
  // Invoked after each completed boosting round (1-based).
  std::function<void(int round, const Model& model)> on_round;
};

// Greedy depth-wise boosting over `schema`'s candidates. Tree i of round k
// (0-based) subsamples features with SampleFeatures(seed, k * outputs + i).
Model TrainPlaintext(const Dataset& data, const CandidateSchema& schema,
                     const BoostParams& params, const PlaintextOptions& options);

// Builds one tree from per-row (g, h). Exposed for tests.
Cart BuildTree(const DenseMatrix& x, std::span<const GradientPair> gradients,
               const CandidateSchema& schema, std::span<const uint32_t> features,
               const BoostParams& params, const FixedPointCodec* quantize);

}  // namespace fedgbt

#endif  // FEDGBT_PLAINTEXT_TRAINER_H_
