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

#ifndef FEDGBT_LOSS_H_
#define FEDGBT_LOSS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fedgbt {

enum class LossKind { kLogistic, kSoftmax };

// Accepts "logistic" and "softmax"; anything else is kConfiguration.
LossKind ParseLossKind(std::string_view name);
std::string LossKindName(LossKind kind);

struct GradientPair {
  double g = 0.0;
  double h = 0.0;
};

double Sigmoid(double x);

// Binary logistic loss on a margin; label in {0, 1}.
GradientPair LogisticGradient(double margin, double label);
double LogisticLoss(double margin, double label);

// Per-class gradients of the cross-entropy of softmax(logits).
std::vector<GradientPair> SoftmaxGradients(std::span<const double> logits, int label);
double SoftmaxLoss(std::span<const double> logits, int label);

// Number of margins (and trees per round) the loss needs.
int OutputCount(LossKind kind, int class_count);

// Dispatch over the loss kind. `state` holds OutputCount margins.
std::vector<GradientPair> LossGradients(LossKind kind, std::span<const double> state,
                                        double label);
double LossValue(LossKind kind, std::span<const double> state, double label);

}  // namespace fedgbt

#endif  // FEDGBT_LOSS_H_
