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

#include "fedgbt/cart.h"

#include <algorithm>

#include "fedgbt/error.h"

namespace fedgbt {

double Instance::Get(uint32_t feature) const {
  auto it = std::lower_bound(features.begin(), features.end(), feature,
                             [](const auto& entry, uint32_t f) { return entry.first < f; });
  return it != features.end() && it->first == feature ? it->second : 0.0;
}

Dataset Dataset::Subset(const std::vector<size_t>& indices) const {
  Dataset out;
  out.name = name;
  out.feature_count = feature_count;
  out.class_count = class_count;
  out.instances.reserve(indices.size());
  for (size_t i : indices) out.instances.push_back(instances.at(i));
  return out;
}

DenseMatrix::DenseMatrix(const Dataset& data)
    : rows_(data.size()), cols_(data.feature_count), values_(rows_ * cols_, 0.0) {
  for (size_t i = 0; i < rows_; ++i) {
    for (const auto& [f, v] : data.instances[i].features) {
      if (f < cols_) values_[i * cols_ + f] = v;
    }
  }
}

int32_t Cart::Split(int32_t id, uint32_t feature, double threshold) {
  CartNode& parent = nodes_.at(id);
  if (!parent.leaf) throw Error(ErrorCode::kRuntime, "node already split");
  const int32_t left = static_cast<int32_t>(nodes_.size());
  parent.leaf = false;
  parent.feature = feature;
  parent.threshold = threshold;
  parent.left = left;
  parent.right = left + 1;
  parent.weight = 0.0;
  const int32_t child_depth = parent.depth + 1;
  nodes_.push_back(CartNode{.depth = child_depth});
  nodes_.push_back(CartNode{.depth = child_depth});
  return left;
}

int32_t Cart::LeafIndex(const Instance& x) const {
  int32_t id = 0;
  while (!nodes_[id].leaf) {
    const CartNode& n = nodes_[id];
    id = x.Get(n.feature) < n.threshold ? n.left : n.right;
  }
  return id;
}

int Cart::depth() const {
  int d = 0;
  for (const auto& n : nodes_) d = std::max(d, static_cast<int>(n.depth));
  return d;
}

bool Cart::WellFormed(int max_depth) const {
  const int32_t size = static_cast<int32_t>(nodes_.size());
  for (int32_t id = 0; id < size; ++id) {
    const CartNode& n = nodes_[id];
    if (n.depth > max_depth) return false;
    if (n.leaf) continue;
    if (n.left <= id || n.right <= id || n.left >= size || n.right >= size) return false;
    if (nodes_[n.left].depth != n.depth + 1 || nodes_[n.right].depth != n.depth + 1) {
      return false;
    }
  }
  return true;
}

std::vector<int32_t> Cart::InternalNodes() const {
  std::vector<int32_t> ids;
  for (int32_t id = 0; id < static_cast<int32_t>(nodes_.size()); ++id) {
    if (!nodes_[id].leaf) ids.push_back(id);
  }
  return ids;
}

std::vector<double> Model::Margins(const Instance& x) const {
  std::vector<double> margins(outputs(), 0.0);
  for (const auto& tree : trees) margins.at(tree.output()) += eta * tree.LeafWeight(x);
  return margins;
}

int Model::PredictClass(const Instance& x) const { return ClassFromMargins(Margins(x)); }

double Predict(std::span<const Cart> trees, double eta, const Instance& x) {
  double sum = 0.0;
  for (const auto& tree : trees) sum += eta * tree.LeafWeight(x);
  return sum;
}

std::vector<double> PredictBatch(std::span<const Cart> trees, double eta,
                                 std::span<const Instance> xs) {
  std::vector<double> out(xs.size(), 0.0);
  for (const auto& tree : trees) {
    for (size_t i = 0; i < xs.size(); ++i) out[i] += eta * tree.LeafWeight(xs[i]);
  }
  return out;
}

int ClassFromMargins(std::span<const double> margins) {
  if (margins.size() == 1) return margins[0] > 0 ? 1 : 0;
  return static_cast<int>(std::max_element(margins.begin(), margins.end()) - margins.begin());
}

Evaluation Evaluate(const Model& model, const Dataset& data) {
  Evaluation e;
  if (data.size() == 0) return e;
  size_t correct = 0;
  double loss = 0.0;
  for (const auto& x : data.instances) {
    auto margins = model.Margins(x);
    if (ClassFromMargins(margins) == static_cast<int>(x.label)) ++correct;
    loss += LossValue(model.loss, margins, x.label);
  }
  e.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  e.loss = loss / static_cast<double>(data.size());
  return e;
}

}  // namespace fedgbt
