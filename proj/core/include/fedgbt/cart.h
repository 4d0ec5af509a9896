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

#ifndef FEDGBT_CART_H_
#define FEDGBT_CART_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fedgbt/dataset.h"
#include "fedgbt/loss.h"

namespace fedgbt {

struct CartNode {
  bool leaf = true;
  uint32_t feature = 0;
  double threshold = 0.0;
  int32_t left = -1;
  int32_t right = -1;
  int32_t depth = 0;
  double weight = 0.0;

  friend bool operator==(const CartNode&, const CartNode&) = default;
};

// Binary regression tree. Node 0 is the root; nodes are numbered in the
// order they are created, level by level. x[feature] < threshold goes left.
class Cart {
 public:
  Cart() { nodes_.push_back(CartNode{}); }

  const std::vector<CartNode>& nodes() const { return nodes_; }
  const CartNode& node(int32_t id) const { return nodes_.at(id); }
  int output() const { return output_; }
  void set_output(int output) { output_ = output; }

  // Turns a leaf into a split node with two fresh leaf children; returns
  // the left child's id (the right child is left + 1).
  int32_t Split(int32_t id, uint32_t feature, double threshold);
  void SetWeight(int32_t id, double weight) { nodes_.at(id).weight = weight; }

  int32_t LeafIndex(const Instance& x) const;
  double LeafWeight(const Instance& x) const { return nodes_[LeafIndex(x)].weight; }
  int depth() const;
  // Every split node has two in-range children and depth <= max_depth.
  bool WellFormed(int max_depth) const;
  std::vector<int32_t> InternalNodes() const;

  friend bool operator==(const Cart&, const Cart&) = default;

 private:
  std::vector<CartNode> nodes_;
  int output_ = 0;
};

// Boosted ensemble; prediction state is eta times the summed leaf weights
// of each output's trees.
struct Model {
  LossKind loss = LossKind::kLogistic;
  int class_count = 2;
  double eta = 0.3;
  std::vector<Cart> trees;

  int outputs() const { return OutputCount(loss, class_count); }
  std::vector<double> Margins(const Instance& x) const;
  int PredictClass(const Instance& x) const;
};

// eta * sum of leaf weights over `trees` (single-output form).
double Predict(std::span<const Cart> trees, double eta, const Instance& x);
std::vector<double> PredictBatch(std::span<const Cart> trees, double eta,
                                 std::span<const Instance> xs);

// Class from a margin vector: margin > 0 for one output, argmax otherwise.
int ClassFromMargins(std::span<const double> margins);

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;
};
Evaluation Evaluate(const Model& model, const Dataset& data);

}  // namespace fedgbt

#endif  // FEDGBT_CART_H_
