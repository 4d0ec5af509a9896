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

#include "fedgbt/seccmp.h"

#include <numeric>

#include "fedgbt/error.h"

namespace fedgbt {
namespace {

std::vector<uint32_t> Roster(uint32_t parties) {
  std::vector<uint32_t> roster(parties);
  std::iota(roster.begin(), roster.end(), 1u);
  return roster;
}

std::map<uint32_t, std::vector<FieldElement>> ToHolderMap(
    std::vector<std::vector<FieldElement>> batch, std::span<const uint32_t> roster) {
  std::map<uint32_t, std::vector<FieldElement>> out;
  for (size_t h = 0; h < roster.size(); ++h) out[roster[h]] = std::move(batch[h]);
  return out;
}

}  // namespace

uint64_t BlindingBound(const FixedPointCodec& codec, uint32_t parties) {
  const uint64_t max_fixed = static_cast<uint64_t>(codec.ToFixed(codec.range_bound()));
  const __uint128_t half = (codec.field().modulus() - 1) / 2;
  const __uint128_t per_unit = static_cast<__uint128_t>(2 * max_fixed) * parties;
  uint64_t bound = static_cast<uint64_t>(half / per_unit);
  if (bound < 1) {
    throw Error(ErrorCode::kConfiguration, "field too small to blind comparisons");
  }
  return bound;
}

SecCmpParty::SecCmpParty(const FixedPointCodec& codec, uint32_t self, uint32_t parties,
                         uint32_t t, size_t batch)
    : codec_(codec),
      scheme_(codec.field()),
      self_(self),
      parties_(parties),
      t_(t),
      batch_(batch),
      blinding_bound_(BlindingBound(codec, parties)),
      blinding_sum_(batch),
      reduced_(batch) {
  if (t == 0 || PartiesRequired(t) > parties) {
    throw Error(ErrorCode::kThreshold, "comparison threshold " + std::to_string(t) +
                                           " needs " + std::to_string(2 * t - 1) +
                                           " parties, have " + std::to_string(parties));
  }
  if (self == 0 || self > parties) {
    throw Error(ErrorCode::kRoster, "party index out of range");
  }
  auto reduction_set = Roster(PartiesRequired(t));
  reduction_basis_ = scheme_.LagrangeAtZero(reduction_set);
}

std::map<uint32_t, std::vector<FieldElement>> SecCmpParty::BlindingShares(Rng& rng) const {
  std::vector<FieldElement> factors(batch_);
  for (auto& f : factors) f = FieldElement{1 + rng.UniformBelow(blinding_bound_)};
  auto roster = Roster(PartiesRequired(t_));
  return ToHolderMap(scheme_.SplitBatch(factors, t_, roster, rng), roster);
}

void SecCmpParty::AcceptBlinding(uint32_t from, std::vector<FieldElement> shares) {
  if (!in_reduction_set() || shares.size() != batch_ || blinding_from_.contains(from)) {
    throw Error(ErrorCode::kAggregationConsistency, "unexpected blinding shares");
  }
  blinding_from_[from] = true;
  const PrimeField& field = codec_.field();
  for (size_t k = 0; k < batch_; ++k) blinding_sum_[k] = field.Add(blinding_sum_[k], shares[k]);
}

std::map<uint32_t, std::vector<FieldElement>> SecCmpParty::ProductReshares(
    std::span<const FieldElement> left, std::span<const FieldElement> right, Rng& rng) const {
  if (!in_reduction_set()) {
    throw Error(ErrorCode::kRoster, "party outside the reduction set cannot reshare");
  }
  if (left.size() != batch_ || right.size() != batch_ || !HasAllBlinding()) {
    throw Error(ErrorCode::kAggregationConsistency, "comparison inputs incomplete");
  }
  const PrimeField& field = codec_.field();
  std::vector<FieldElement> product(batch_);
  for (size_t k = 0; k < batch_; ++k) {
    product[k] = field.Mul(blinding_sum_[k], field.Sub(left[k], right[k]));
  }
  auto roster = Roster(t_);
  return ToHolderMap(scheme_.SplitBatch(product, t_, roster, rng), roster);
}

void SecCmpParty::AcceptReshare(uint32_t from, std::vector<FieldElement> shares) {
  if (!in_opening_set() || from == 0 || from > PartiesRequired(t_) || shares.size() != batch_ ||
      reshare_from_.contains(from)) {
    throw Error(ErrorCode::kAggregationConsistency, "unexpected reshare");
  }
  reshare_from_[from] = true;
  const PrimeField& field = codec_.field();
  const FieldElement lambda = reduction_basis_[from - 1];
  for (size_t k = 0; k < batch_; ++k) {
    reduced_[k] = field.Add(reduced_[k], field.Mul(lambda, shares[k]));
  }
}

std::vector<FieldElement> SecCmpParty::ReducedShares() const {
  if (!in_opening_set() || !HasAllReshares()) {
    throw Error(ErrorCode::kIncompleteRound, "degree reduction incomplete");
  }
  return reduced_;
}

void SecCmpParty::AcceptReduced(uint32_t from, std::vector<FieldElement> shares) {
  if (!is_combiner() || shares.size() != batch_) {
    throw Error(ErrorCode::kAggregationConsistency, "unexpected reduced shares");
  }
  reduced_from_[from] = std::move(shares);
}

std::map<uint32_t, std::vector<FieldElement>> SecCmpParty::ResultShares(Rng& rng) const {
  if (!HasEnoughReduced()) {
    throw Error(ErrorCode::kThreshold, "combiner holds too few reduced shares");
  }
  std::vector<uint32_t> points;
  for (const auto& [holder, shares] : reduced_from_) {
    points.push_back(holder);
    if (points.size() == t_) break;
  }
  auto basis = scheme_.LagrangeAtZero(points);
  const PrimeField& field = codec_.field();
  std::vector<FieldElement> bits(batch_);
  for (size_t k = 0; k < batch_; ++k) {
    FieldElement blinded{0};
    for (size_t i = 0; i < points.size(); ++i) {
      blinded = field.Add(blinded, field.Mul(basis[i], reduced_from_.at(points[i])[k]));
    }
    bits[k] = FieldElement{field.ToSigned(blinded) > 0 ? 0u : 1u};
  }
  auto roster = Roster(parties_);
  return ToHolderMap(scheme_.SplitBatch(bits, t_, roster, rng), roster);
}

CmpResultShares SecCmp(const CmpRequest& request, const FixedPointCodec& codec, Rng& rng) {
  const auto& left = request.left_shares;
  const auto& right = request.right_shares;
  if (left.size() != right.size()) {
    throw Error(ErrorCode::kRoster, "operand sharings have different rosters");
  }
  const uint32_t parties = static_cast<uint32_t>(left.size());
  for (uint32_t i = 0; i < parties; ++i) {
    if (left[i].holder != i + 1 || right[i].holder != i + 1) {
      throw Error(ErrorCode::kRoster, "operand sharings must be held by parties 1..n in order");
    }
  }
  const uint32_t t = request.threshold;
  std::vector<SecCmpParty> party;
  for (uint32_t i = 1; i <= parties; ++i) party.emplace_back(codec, i, parties, t, 1);

  for (auto& sender : party) {
    for (auto& [holder, shares] : sender.BlindingShares(rng)) {
      party[holder - 1].AcceptBlinding(sender.self(), std::move(shares));
    }
  }
  for (auto& sender : party) {
    if (!sender.in_reduction_set()) continue;
    FieldElement l[] = {left[sender.self() - 1].value};
    FieldElement r[] = {right[sender.self() - 1].value};
    for (auto& [holder, shares] : sender.ProductReshares(l, r, rng)) {
      party[holder - 1].AcceptReshare(sender.self(), std::move(shares));
    }
  }
  SecCmpParty& combiner = party[SecCmpParty::kCombiner - 1];
  for (auto& sender : party) {
    if (sender.in_opening_set()) combiner.AcceptReduced(sender.self(), sender.ReducedShares());
  }
  CmpResultShares result;
  for (auto& [holder, shares] : combiner.ResultShares(rng)) {
    result.shares.push_back({holder, shares[0]});
  }
  return result;
}

bool CmpRecon(const ShamirScheme& scheme, const CmpResultShares& result, uint32_t t) {
  FieldElement bit = scheme.Reconstruct(result.shares, t);
  if (bit.value > 1) {
    throw Error(ErrorCode::kAggregationConsistency, "comparison result is not a bit");
  }
  return bit.value == 1;
}

std::vector<Share> ShareValue(const FixedPointCodec& codec, double value, uint32_t t,
                              uint32_t parties, Rng& rng) {
  ShamirScheme scheme(codec.field());
  auto roster = Roster(parties);
  return scheme.Split(codec.Encode(value), t, roster, rng);
}

}  // namespace fedgbt
