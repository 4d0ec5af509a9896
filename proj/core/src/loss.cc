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

#include "fedgbt/loss.h"

#include <algorithm>
#include <cmath>

#include "fedgbt/error.h"

namespace fedgbt {

LossKind ParseLossKind(std::string_view name) {
  if (name == "logistic") return LossKind::kLogistic;
  if (name == "softmax") return LossKind::kSoftmax;
  throw Error(ErrorCode::kConfiguration, "unknown loss '" + std::string(name) + "'");
}

std::string LossKindName(LossKind kind) {
  return kind == LossKind::kLogistic ? "logistic" : "softmax";
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

GradientPair LogisticGradient(double margin, double label) {
  double p = Sigmoid(margin);
  return {p - label, p * (1.0 - p)};
}

double LogisticLoss(double margin, double label) {
  // log(1 + e^m) - y m, written to avoid overflow.
  double softplus = margin > 0 ? margin + std::log1p(std::exp(-margin))
                               : std::log1p(std::exp(margin));
  return softplus - label * margin;
}

namespace {

std::vector<double> Softmax(std::span<const double> logits) {
  double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (size_t c = 0; c < logits.size(); ++c) {
    p[c] = std::exp(logits[c] - peak);
    total += p[c];
  }
  for (double& v : p) v /= total;
  return p;
}

void CheckLabel(std::span<const double> logits, int label) {
  if (logits.empty() || label < 0 || static_cast<size_t>(label) >= logits.size()) {
    throw Error(ErrorCode::kRange, "class label outside logit range");
  }
}

}  // namespace

std::vector<GradientPair> SoftmaxGradients(std::span<const double> logits, int label) {
  CheckLabel(logits, label);
  auto p = Softmax(logits);
  std::vector<GradientPair> out(p.size());
  for (size_t c = 0; c < p.size(); ++c) {
    out[c] = {p[c] - (static_cast<int>(c) == label ? 1.0 : 0.0), p[c] * (1.0 - p[c])};
  }
  return out;
}

double SoftmaxLoss(std::span<const double> logits, int label) {
  CheckLabel(logits, label);
  double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp(z - peak);
  return peak + std::log(total) - logits[label];
}

int OutputCount(LossKind kind, int class_count) {
  if (kind == LossKind::kLogistic) return 1;
  if (class_count < 2) throw Error(ErrorCode::kConfiguration, "softmax needs >= 2 classes");
  return class_count;
}

std::vector<GradientPair> LossGradients(LossKind kind, std::span<const double> state,
                                        double label) {
  if (kind == LossKind::kLogistic) return {LogisticGradient(state[0], label)};
  return SoftmaxGradients(state, static_cast<int>(label));
}

double LossValue(LossKind kind, std::span<const double> state, double label) {
  if (kind == LossKind::kLogistic) return LogisticLoss(state[0], label);
  return SoftmaxLoss(state, static_cast<int>(label));
}

}  // namespace fedgbt
