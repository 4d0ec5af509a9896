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

#ifndef FEDGBT_SECCMP_H_
#define FEDGBT_SECCMP_H_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "fedgbt/finite_field.h"
#include "fedgbt/random.h"

namespace fedgbt {

// Comparison of two shared values among parties 1..n. The result
// reconstructs to 0 when left > right and to 1 otherwise (ties give 1).
struct CmpRequest {
  std::vector<Share> left_shares;
  std::vector<Share> right_shares;
  uint32_t threshold = 0;
};

struct CmpResultShares {
  std::vector<Share> shares;
};

// Largest per-party blinding contribution such that the blinded difference
// of any two encodable values keeps its sign in the centered field lift.
uint64_t BlindingBound(const FixedPointCodec& codec, uint32_t parties);

// Smallest party count able to run the degree reduction for threshold t.
constexpr uint32_t PartiesRequired(uint32_t t) { return 2 * t - 1; }

// One party's side of a batched comparison. Message flow:
//   1. every party: BlindingShares() -> parties 1..2t-1 AcceptBlinding()
//   2. parties 1..2t-1: ProductReshares(left, right) -> parties 1..t AcceptReshare()
//   3. parties 1..t: ReducedShares() -> combiner (party 1) AcceptReduced()
//   4. combiner: ResultShares() -> every party
// Party ids are 1-based and equal to the Shamir holder index.
class SecCmpParty {
 public:
  SecCmpParty(const FixedPointCodec& codec, uint32_t self, uint32_t parties, uint32_t t,
              size_t batch);

  uint32_t self() const { return self_; }
  bool is_combiner() const { return self_ == kCombiner; }
  bool in_reduction_set() const { return self_ <= PartiesRequired(t_); }
  bool in_opening_set() const { return self_ <= t_; }
  uint32_t threshold() const { return t_; }
  size_t batch() const { return batch_; }

  // Holder -> shares of this party's random positive blinding factors, for
  // the reduction set only.
  std::map<uint32_t, std::vector<FieldElement>> BlindingShares(Rng& rng) const;
  void AcceptBlinding(uint32_t from, std::vector<FieldElement> shares);
  bool HasAllBlinding() const { return blinding_from_.size() == parties_; }

  // Degree 2t-2 product of blinding and difference, reshared at degree t-1
  // to the opening set.
  std::map<uint32_t, std::vector<FieldElement>> ProductReshares(
      std::span<const FieldElement> left, std::span<const FieldElement> right, Rng& rng) const;
  void AcceptReshare(uint32_t from, std::vector<FieldElement> shares);
  bool HasAllReshares() const { return reshare_from_.size() == PartiesRequired(t_); }

  // This party's degree t-1 share of the blinded difference.
  std::vector<FieldElement> ReducedShares() const;

  void AcceptReduced(uint32_t from, std::vector<FieldElement> shares);
  bool HasEnoughReduced() const { return reduced_from_.size() >= t_; }
  // Combiner only: reconstructs the blinded differences, derives the bits
  // and shares them to every party.
  std::map<uint32_t, std::vector<FieldElement>> ResultShares(Rng& rng) const;

  static constexpr uint32_t kCombiner = 1;

 private:
  FixedPointCodec codec_;
  ShamirScheme scheme_;
  uint32_t self_;
  uint32_t parties_;
  uint32_t t_;
  size_t batch_;
  uint64_t blinding_bound_;
  std::vector<FieldElement> blinding_sum_;
  std::map<uint32_t, bool> blinding_from_;
  std::vector<FieldElement> reduced_;
  std::map<uint32_t, bool> reshare_from_;
  std::vector<FieldElement> reduction_basis_;
  std::map<uint32_t, std::vector<FieldElement>> reduced_from_;
};

// Runs every party in process. kRoster when the two sharings disagree on
// holders; kThreshold when the party count is below 2t-1.
CmpResultShares SecCmp(const CmpRequest& request, const FixedPointCodec& codec, Rng& rng);

// Reconstructs the result bit from >= t shares; true means 1 (left <= right).
// kAggregationConsistency when the shares do not open to 0 or 1.
bool CmpRecon(const ShamirScheme& scheme, const CmpResultShares& result, uint32_t t);

// Encodes a plaintext value and shares it to parties 1..parties. Throws
// kRange when |value| exceeds the codec range.
std::vector<Share> ShareValue(const FixedPointCodec& codec, double value, uint32_t t,
                              uint32_t parties, Rng& rng);

}  // namespace fedgbt

#endif  // FEDGBT_SECCMP_H_
