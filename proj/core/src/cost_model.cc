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

#include "fedgbt/cost_model.h"

#include <numeric>

namespace fedgbt {

std::string_view StageName(Stage stage) {
  switch (stage) {
    case Stage::kSetup: return "setup";
    case Stage::kSelection: return "selection";
    case Stage::kKeyShares: return "key_shares";
    case Stage::kSecFind: return "secfind";
    case Stage::kSecPred: return "secpred";
  }
  return "unknown";
}

std::string_view PrimitiveName(Primitive p) {
  static constexpr std::string_view kNames[kPrimitiveCount] = {
      "key_gen",    "key_agree", "sign",     "verify",   "aead_call",   "aead_byte",
      "share_term", "lagrange_term", "prg_word", "field_op", "message", "message_byte"};
  return kNames[static_cast<size_t>(p)];
}

void CostMeter::Charge(Stage stage, Primitive p, double units) {
  units_[static_cast<size_t>(p)] += units;
  if (model_ != nullptr) stage_us_[static_cast<size_t>(stage)] += units * model_->weight(p);
}

double CostMeter::total_us() const {
  return std::accumulate(stage_us_.begin(), stage_us_.end(), 0.0);
}

}  // namespace fedgbt
