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

#ifndef FEDGBT_SPLIT_H_
#define FEDGBT_SPLIT_H_

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fedgbt/dataset.h"

namespace fedgbt {

// G^2/(H+lambda) terms of the left and right children minus the parent's.
// Throws kAggregationConsistency when G or H is not the sum of its halves
// to within `tolerance` (absolute, scaled by max(1, |G|)).
double SplitScore(double g_left, double h_left, double g_right, double h_right, double g,
                  double h, double lambda, double tolerance = 1e-6);

// -G/(H+lambda). kRange when H + lambda <= 0.
double LeafWeight(double g, double h, double lambda);

// Midpoints between consecutive distinct values, thinned to at most
// max_candidates by count-weighted quantiles. Strictly increasing.
std::vector<double> EnumerateCandidates(std::span<const double> values,
                                        size_t max_candidates);

// Per-feature candidate thresholds; public to every participant.
struct CandidateSchema {
  std::vector<std::vector<double>> thresholds;  // indexed by feature id

  size_t feature_count() const { return thresholds.size(); }
  static CandidateSchema Build(const Dataset& data, size_t max_candidates);
};

// Per-tree feature subsample: min(delta, q) ids drawn without replacement
// from the tree's stream, returned in ascending order.
std::vector<uint32_t> SampleFeatures(uint64_t seed, uint64_t tree_index, uint32_t q,
                                     size_t delta);

struct NodeStats {
  double g = 0.0;
  double h = 0.0;
  double n = 0.0;
};

struct SplitRules {
  double lambda = 1.0;
  double gamma = 0.1;
  double min_instances = 1.0;
};

struct SplitChoice {
  bool valid = false;
  uint32_t feature = 0;
  double threshold = 0.0;
  double score = 0.0;
  NodeStats left;
  NodeStats right;
};

// Left-child statistics for every (feature, candidate) pair, laid out
// feature-major in the order of `features`.
struct LeftStatsView {
  std::span<const uint32_t> features;
  const CandidateSchema* schema = nullptr;
  std::span<const NodeStats> left;
};

// Best admissible split: both children hold >= min_instances and
// score / 2 > gamma. Ties go to the lower feature id, then lower threshold.
SplitChoice FindBestSplit(const NodeStats& parent, const LeftStatsView& view,
                          const SplitRules& rules);

// Number of left-stat slots LeftStatsView expects for these features.
size_t CandidateSlotCount(const CandidateSchema& schema, std::span<const uint32_t> features);

// Sums of (g, h, count) triples over the rows falling left of each
// candidate, written into `slots` (feature-major, features in the given
// order). T is int64_t for fixed-point sums or double.
template <typename T>
void AccumulateLeftSums(const CandidateSchema& schema, std::span<const uint32_t> features,
                        const DenseMatrix& x, std::span<const size_t> rows,
                        std::span<const std::array<T, 3>> row_stats,
                        std::span<std::array<T, 3>> slots) {
  size_t base = 0;
  std::vector<std::array<T, 3>> diff;
  for (uint32_t f : features) {
    const auto& cands = schema.thresholds[f];
    diff.assign(cands.size() + 1, std::array<T, 3>{});
    for (size_t r = 0; r < rows.size(); ++r) {
      // Row contributes to every candidate strictly above its value.
      size_t first = std::upper_bound(cands.begin(), cands.end(), x.at(rows[r], f)) -
                     cands.begin();
      for (int k = 0; k < 3; ++k) diff[first][k] += row_stats[r][k];
    }
    std::array<T, 3> running{};
    for (size_t c = 0; c < cands.size(); ++c) {
      for (int k = 0; k < 3; ++k) running[k] += diff[c][k];
      slots[base + c] = running;
    }
    base += cands.size();
  }
}

}  // namespace fedgbt

#endif  // FEDGBT_SPLIT_H_
