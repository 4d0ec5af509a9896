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

#include "fedgbt/split.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "fedgbt/error.h"
#include "fedgbt/random.h"

namespace fedgbt {

double SplitScore(double g_left, double h_left, double g_right, double h_right, double g,
                  double h, double lambda, double tolerance) {
  const double scale = std::max(1.0, std::fabs(g) + std::fabs(h));
  if (std::fabs(g - g_left - g_right) > tolerance * scale ||
      std::fabs(h - h_left - h_right) > tolerance * scale) {
    throw Error(ErrorCode::kAggregationConsistency,
                "child statistics do not add up to the parent");
  }
  double score = g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
                 g * g / (h + lambda);
  if (!std::isfinite(score)) {
    throw Error(ErrorCode::kAggregationConsistency, "non-finite split score");
  }
  return score;
}

double LeafWeight(double g, double h, double lambda) {
  if (!(h + lambda > 0)) throw Error(ErrorCode::kRange, "leaf hessian plus lambda not positive");
  return -g / (h + lambda);
}

std::vector<double> EnumerateCandidates(std::span<const double> values,
                                        size_t max_candidates) {
  std::map<double, size_t> counts;
  for (double v : values) ++counts[v];
  if (counts.size() < 2 || max_candidates == 0) return {};

  std::vector<double> distinct;
  std::vector<size_t> below;  // instances strictly below each midpoint
  size_t running = 0;
  for (const auto& [v, c] : counts) {
    if (!distinct.empty()) below.push_back(running);
    distinct.push_back(v);
    running += c;
  }
  std::vector<double> midpoints(distinct.size() - 1);
  for (size_t i = 0; i + 1 < distinct.size(); ++i) {
    midpoints[i] = distinct[i] + (distinct[i + 1] - distinct[i]) / 2;
  }
  if (midpoints.size() <= max_candidates) return midpoints;

  // Pick the midpoint whose left mass is nearest each target quantile.
  std::vector<double> out;
  const double total = static_cast<double>(running);
  size_t cursor = 0;
  for (size_t k = 1; k <= max_candidates; ++k) {
    double target = total * static_cast<double>(k) / static_cast<double>(max_candidates + 1);
    while (cursor + 1 < below.size() &&
           std::fabs(below[cursor + 1] - target) <= std::fabs(below[cursor] - target)) {
      ++cursor;
    }
    if (out.empty() || midpoints[cursor] > out.back()) out.push_back(midpoints[cursor]);
  }
  return out;
}

CandidateSchema CandidateSchema::Build(const Dataset& data, size_t max_candidates) {
  CandidateSchema schema;
  schema.thresholds.resize(data.feature_count);
  std::vector<std::vector<double>> columns(data.feature_count,
                                           std::vector<double>(data.size(), 0.0));
  for (size_t i = 0; i < data.size(); ++i) {
    for (const auto& [f, v] : data.instances[i].features) {
      if (f < data.feature_count) columns[f][i] = v;
    }
  }
  for (uint32_t f = 0; f < data.feature_count; ++f) {
    schema.thresholds[f] = EnumerateCandidates(columns[f], max_candidates);
  }
  return schema;
}

std::vector<uint32_t> SampleFeatures(uint64_t seed, uint64_t tree_index, uint32_t q,
                                     size_t delta) {
  Rng rng = Rng::Derive(seed, "feature-subsample", tree_index);
  auto picked = rng.SampleWithoutReplacement(q, std::min<size_t>(delta, q));
  std::vector<uint32_t> out(picked.begin(), picked.end());
  std::sort(out.begin(), out.end());
  return out;
}

size_t CandidateSlotCount(const CandidateSchema& schema, std::span<const uint32_t> features) {
  size_t total = 0;
  for (uint32_t f : features) total += schema.thresholds.at(f).size();
  return total;
}

SplitChoice FindBestSplit(const NodeStats& parent, const LeftStatsView& view,
                          const SplitRules& rules) {
  if (view.left.size() != CandidateSlotCount(*view.schema, view.features)) {
    throw Error(ErrorCode::kAggregationConsistency, "left statistics do not match candidates");
  }
  SplitChoice best;
  size_t slot = 0;
  for (uint32_t f : view.features) {
    for (double threshold : view.schema->thresholds[f]) {
      const NodeStats& l = view.left[slot++];
      NodeStats r{parent.g - l.g, parent.h - l.h, parent.n - l.n};
      if (l.n < rules.min_instances || r.n < rules.min_instances) continue;
      double score = SplitScore(l.g, l.h, r.g, r.h, parent.g, parent.h, rules.lambda);
      if (!(score / 2 > rules.gamma)) continue;
      bool better = !best.valid || score > best.score ||
                    (score == best.score &&
                     (f < best.feature || (f == best.feature && threshold < best.threshold)));
      if (better) best = {true, f, threshold, score, l, r};
    }
  }
  return best;
}

}  // namespace fedgbt
