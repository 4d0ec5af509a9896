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

#ifndef FEDGBT_COST_MODEL_H_
#define FEDGBT_COST_MODEL_H_

#include <array>
#include <cstdint>
#include <string_view>

namespace fedgbt {

enum class Stage : uint8_t { kSetup, kSelection, kKeyShares, kSecFind, kSecPred };
inline constexpr size_t kStageCount = 5;
std::string_view StageName(Stage stage);

enum class Primitive : uint8_t {
  kKeyGen,       // one key pair
  kKeyAgree,     // one agreement
  kSign,         // one signature
  kVerify,       // one verification
  kAeadCall,     // fixed part of one encryption or decryption
  kAeadByte,     // per plaintext byte
  kShareTerm,    // one multiply-add while evaluating a sharing polynomial
  kLagrangeTerm, // one multiply-add while interpolating (incl. basis setup)
  kPrgWord,      // one 64-bit keystream word
  kFieldOp,      // one field addition or multiplication elsewhere
  kMessage,      // fixed cost of handling one message
  kMessageByte,  // per wire byte handled
};
inline constexpr size_t kPrimitiveCount = 12;
std::string_view PrimitiveName(Primitive p);

// Simulated runtime, in microseconds per unit of each primitive. The
// defaults were measured with the fedgbt_bench microbenchmarks on a single
// x86-64 core (tools/calibrate_costs.py converts its output) and are only
// meaningful relative to each other.
struct CostModel {
  std::array<double, kPrimitiveCount> weight_us = {
      19.6,     // key gen
      72.4,     // key agree
      104.0,    // sign
      197.0,    // verify
      0.72,     // aead call
      0.00035,  // aead byte
      0.0065,   // share term
      0.0072,   // lagrange term
      0.0031,   // prg word
      0.0020,   // field op
      0.30,     // message
      0.00091,  // message byte
  };

  double weight(Primitive p) const { return weight_us[static_cast<size_t>(p)]; }
};

// Per-participant accumulator of simulated runtime and primitive counts.
class CostMeter {
 public:
  explicit CostMeter(const CostModel* model = nullptr) : model_(model) {}

  void Charge(Stage stage, Primitive p, double units);

  double stage_us(Stage stage) const { return stage_us_[static_cast<size_t>(stage)]; }
  double total_us() const;
  double units(Primitive p) const { return units_[static_cast<size_t>(p)]; }

 private:
  const CostModel* model_;
  std::array<double, kStageCount> stage_us_{};
  std::array<double, kPrimitiveCount> units_{};
};

}  // namespace fedgbt

#endif  // FEDGBT_COST_MODEL_H_
