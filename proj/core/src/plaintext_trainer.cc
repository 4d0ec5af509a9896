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

#include "fedgbt/plaintext_trainer.h"

#include <numeric>

#include "fedgbt/error.h"

namespace fedgbt {

void BoostParams::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kConfiguration, what);
  };
  if (!(eta > 0 && eta <= 1)) fail("eta must be in (0, 1]");
  if (!(lambda >= 0)) fail("lambda must be >= 0");
  if (max_depth < 1) fail("max_depth must be >= 1");
  if (rounds < 0) fail("rounds must be >= 0");
  if (feature_subsample < 1) fail("feature_subsample must be >= 1");
  if (!(min_instances >= 1)) fail("min_instances must be >= 1");
}

namespace {

// Node statistics from either exact doubles or quantized integer sums.
template <typename T>
NodeStats ToStats(const std::array<T, 3>& sums, const FixedPointCodec* codec) {
  if constexpr (std::is_same_v<T, int64_t>) {
    return {codec->FromFixed(sums[0]), codec->FromFixed(sums[1]),
            static_cast<double>(sums[2])};
  } else {
    return {sums[0], sums[1], sums[2]};
  }
}

template <typename T>
Cart BuildTreeImpl(const DenseMatrix& x, std::span<const GradientPair> gradients,
                   const CandidateSchema& schema, std::span<const uint32_t> features,
                   const BoostParams& params, const FixedPointCodec* codec) {
  const size_t rows = gradients.size();
  std::vector<std::array<T, 3>> row_stats(rows);
  for (size_t r = 0; r < rows; ++r) {
    if constexpr (std::is_same_v<T, int64_t>) {
      row_stats[r] = {codec->ToFixed(gradients[r].g), codec->ToFixed(gradients[r].h), 1};
    } else {
      row_stats[r] = {gradients[r].g, gradients[r].h, 1.0};
    }
  }

  struct Pending {
    int32_t node;
    std::vector<size_t> rows;
    NodeStats stats;
  };
  std::vector<Pending> frontier(1);
  frontier[0].node = 0;
  frontier[0].rows.resize(rows);
  std::iota(frontier[0].rows.begin(), frontier[0].rows.end(), size_t{0});
  std::array<T, 3> total{};
  for (const auto& s : row_stats) {
    for (int k = 0; k < 3; ++k) total[k] += s[k];
  }
  frontier[0].stats = ToStats(total, codec);

  Cart tree;
  const size_t slot_count = CandidateSlotCount(schema, features);
  std::vector<std::array<T, 3>> slots(slot_count);
  std::vector<std::array<T, 3>> local;
  std::vector<NodeStats> left(slot_count);
  for (int depth = 0; depth < params.max_depth && !frontier.empty(); ++depth) {
    std::vector<Pending> next;
    for (auto& pending : frontier) {
      local.resize(pending.rows.size());
      for (size_t i = 0; i < pending.rows.size(); ++i) local[i] = row_stats[pending.rows[i]];
      AccumulateLeftSums<T>(schema, features, x, pending.rows, local, slots);
      for (size_t s = 0; s < slot_count; ++s) left[s] = ToStats(slots[s], codec);
      SplitChoice choice = FindBestSplit(pending.stats, {features, &schema, left},
                                         params.rules());
      if (!choice.valid) {
        tree.SetWeight(pending.node,
                       LeafWeight(pending.stats.g, pending.stats.h, params.lambda));
        continue;
      }
      int32_t l = tree.Split(pending.node, choice.feature, choice.threshold);
      Pending lp{l, {}, choice.left};
      Pending rp{l + 1, {}, choice.right};
      for (size_t r : pending.rows) {
        (x.at(r, choice.feature) < choice.threshold ? lp.rows : rp.rows).push_back(r);
      }
      next.push_back(std::move(lp));
      next.push_back(std::move(rp));
    }
    frontier = std::move(next);
  }
  for (const auto& pending : frontier) {
    tree.SetWeight(pending.node, LeafWeight(pending.stats.g, pending.stats.h, params.lambda));
  }
  return tree;
}

}  // namespace

Cart BuildTree(const DenseMatrix& x, std::span<const GradientPair> gradients,
               const CandidateSchema& schema, std::span<const uint32_t> features,
               const BoostParams& params, const FixedPointCodec* quantize) {
  if (quantize != nullptr) {
    return BuildTreeImpl<int64_t>(x, gradients, schema, features, params, quantize);
  }
  return BuildTreeImpl<double>(x, gradients, schema, features, params, nullptr);
}

Model TrainPlaintext(const Dataset& data, const CandidateSchema& schema,
                     const BoostParams& params, const PlaintextOptions& options) {
  params.Validate();
  if (schema.feature_count() != data.feature_count) {
    throw Error(ErrorCode::kConfiguration, "candidate schema does not match dataset");
  }
  Model model;
  model.loss = options.loss;
  model.class_count = static_cast<int>(data.class_count);
  model.eta = params.eta;
  const int outputs = model.outputs();
  const DenseMatrix x(data);
  const size_t rows = data.size();
  std::vector<std::vector<double>> margins(rows, std::vector<double>(outputs, 0.0));
  std::vector<std::vector<GradientPair>> grads(outputs, std::vector<GradientPair>(rows));

  for (int round = 0; round < params.rounds; ++round) {
    for (size_t r = 0; r < rows; ++r) {
      auto g = LossGradients(options.loss, margins[r], data.instances[r].label);
      for (int c = 0; c < outputs; ++c) grads[c][r] = g[c];
    }
    for (int c = 0; c < outputs; ++c) {
      auto features = SampleFeatures(options.seed,
                                     static_cast<uint64_t>(round) * outputs + c,
                                     data.feature_count, params.feature_subsample);
      Cart tree = BuildTree(x, grads[c], schema, features, params, options.quantize);
      tree.set_output(c);
      for (size_t r = 0; r < rows; ++r) {
        margins[r][c] += params.eta * tree.LeafWeight(data.instances[r]);
      }
      model.trees.push_back(std::move(tree));
    }
    if (options.on_round) options.on_round(round + 1, model);
  }
  return model;
}

}  // namespace fedgbt
