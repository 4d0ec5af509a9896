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

#ifndef FEDGBT_FINITE_FIELD_H_
#define FEDGBT_FINITE_FIELD_H_

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "fedgbt/random.h"

namespace fedgbt {

// An element of F_p. The owning PrimeField keeps value < p.
struct FieldElement {
  uint64_t value = 0;

  friend auto operator<=>(const FieldElement&, const FieldElement&) = default;
};

// Prime-field arithmetic with a runtime modulus (p < 2^63).
class PrimeField {
 public:
  static constexpr uint64_t kDefaultModulus = (uint64_t{1} << 61) - 1;

  // Throws kConfiguration if modulus is not a prime in [3, 2^63).
  explicit PrimeField(uint64_t modulus = kDefaultModulus);

  uint64_t modulus() const { return p_; }
  // Bits usable for a value that must stay below p.
  int safe_bits() const { return safe_bits_; }

  FieldElement FromUint(uint64_t x) const { return {x % p_}; }
  FieldElement FromSigned(int64_t x) const;
  // Centered lift into (-p/2, p/2].
  int64_t ToSigned(FieldElement a) const;

  FieldElement Add(FieldElement a, FieldElement b) const {
    uint64_t s = a.value + b.value;
    return {s >= p_ ? s - p_ : s};
  }
  FieldElement Sub(FieldElement a, FieldElement b) const {
    return {a.value >= b.value ? a.value - b.value : a.value + p_ - b.value};
  }
  FieldElement Neg(FieldElement a) const { return {a.value == 0 ? 0 : p_ - a.value}; }
  FieldElement Mul(FieldElement a, FieldElement b) const {
    return {static_cast<uint64_t>(static_cast<__uint128_t>(a.value) * b.value % p_)};
  }
  FieldElement Pow(FieldElement a, uint64_t e) const;
  // Throws kRange on zero.
  FieldElement Inv(FieldElement a) const;

  FieldElement Random(Rng& rng) const { return {rng.UniformBelow(p_)}; }

  friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

 private:
  uint64_t p_;
  int safe_bits_;
};

bool IsPrime64(uint64_t n);

// Fixed-point embedding of reals into F_p: x -> round(x * 2^f), negatives in
// the upper half of the field. range_bound is chosen so that up to
// max_summands encoded values can be added without wraparound.
class FixedPointCodec {
 public:
  static constexpr int kDefaultFractionalBits = 16;
  static constexpr uint64_t kDefaultMaxSummands = uint64_t{1} << 20;

  explicit FixedPointCodec(const PrimeField& field,
                           int fractional_bits = kDefaultFractionalBits,
                           uint64_t max_summands = kDefaultMaxSummands);

  const PrimeField& field() const { return field_; }
  int fractional_bits() const { return fractional_bits_; }
  double range_bound() const { return range_bound_; }
  double resolution() const { return resolution_; }
  uint64_t max_summands() const { return max_summands_; }

  // Round-half-up scaling; throws kRange when |x| > range_bound.
  int64_t ToFixed(double x) const;
  double FromFixed(int64_t v) const { return static_cast<double>(v) * resolution_; }

  FieldElement Encode(double x) const { return field_.FromSigned(ToFixed(x)); }
  double Decode(FieldElement e) const { return FromFixed(field_.ToSigned(e)); }
  // Snaps x onto the representable grid.
  double Quantize(double x) const { return FromFixed(ToFixed(x)); }

 private:
  PrimeField field_;
  int fractional_bits_;
  uint64_t max_summands_;
  double scale_;
  double resolution_;
  double range_bound_;
};

// One holder's point on a sharing polynomial. holder is the evaluation point
// and is never 0.
struct Share {
  uint32_t holder = 0;
  FieldElement value;

  friend bool operator==(const Share&, const Share&) = default;
};

// (t, n) Shamir secret sharing with Lagrange reconstruction at zero.
class ShamirScheme {
 public:
  explicit ShamirScheme(const PrimeField& field) : field_(field) {}

  const PrimeField& field() const { return field_; }

  // One share per roster entry; degree (t - 1) polynomial with constant term
  // `secret`. Errors: kThreshold if t == 0 or t > |roster|; kRoster on
  // duplicate or zero indices.
  std::vector<Share> Split(FieldElement secret, uint32_t t,
                           std::span<const uint32_t> roster, Rng& rng) const;

  // Shares many secrets at once. Result[h][i] is roster[h]'s share of
  // secrets[i]; each secret gets an independent polynomial.
  std::vector<std::vector<FieldElement>> SplitBatch(
      std::span<const FieldElement> secrets, uint32_t t,
      std::span<const uint32_t> roster, Rng& rng) const;

  // Uses the first t shares. kThreshold if fewer than t; kRoster on
  // duplicate or zero holders.
  FieldElement Reconstruct(std::span<const Share> shares, uint32_t t) const;

  // Lagrange basis values at zero for the given distinct nonzero points.
  std::vector<FieldElement> LagrangeAtZero(std::span<const uint32_t> points) const;

  // Evaluates the sharing polynomial with the given coefficients at x.
  FieldElement Evaluate(std::span<const FieldElement> coefficients, uint32_t x) const;

 private:
  void ValidateRoster(std::span<const uint32_t> roster) const;

  PrimeField field_;
};

// Splits a big-endian byte string into limbs of field().safe_bits() bits,
// each a field element, so that keys longer than log2(p) can be shared.
std::vector<FieldElement> BytesToLimbs(const PrimeField& field,
                                       std::span<const uint8_t> bytes);
std::vector<uint8_t> LimbsToBytes(const PrimeField& field,
                                  std::span<const FieldElement> limbs,
                                  size_t byte_count);

}  // namespace fedgbt

#endif  // FEDGBT_FINITE_FIELD_H_
