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

#include "fedgbt/finite_field.h"

#include <bit>
#include <cmath>
#include <sstream>

#include "fedgbt/error.h"

namespace fedgbt {
namespace {

uint64_t MulMod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<__uint128_t>(a) * b % m);
}

uint64_t PowMod(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t result = 1 % m;
  a %= m;
  while (e > 0) {
    if (e & 1) result = MulMod(result, a, m);
    a = MulMod(a, a, m);
    e >>= 1;
  }
  return result;
}

}  // namespace

bool IsPrime64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t small : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % small == 0) return n == small;
  }
  uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // These witnesses are deterministic for every 64-bit n.
  for (uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    uint64_t x = PowMod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = MulMod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeField::PrimeField(uint64_t modulus) : p_(modulus) {
  if (modulus < 3 || modulus >= (uint64_t{1} << 63) || !IsPrime64(modulus)) {
    std::ostringstream msg;
    msg << "field modulus " << modulus << " is not a prime in [3, 2^63)";
    throw Error(ErrorCode::kConfiguration, msg.str());
  }
  safe_bits_ = std::bit_width(p_) - 1;
}

FieldElement PrimeField::FromSigned(int64_t x) const {
  if (x >= 0) return {static_cast<uint64_t>(x) % p_};
  uint64_t magnitude = (static_cast<uint64_t>(-(x + 1)) + 1) % p_;
  return Neg({magnitude});
}

int64_t PrimeField::ToSigned(FieldElement a) const {
  if (a.value <= p_ / 2) return static_cast<int64_t>(a.value);
  return -static_cast<int64_t>(p_ - a.value);
}

FieldElement PrimeField::Pow(FieldElement a, uint64_t e) const {
  return {PowMod(a.value, e, p_)};
}

FieldElement PrimeField::Inv(FieldElement a) const {
  if (a.value == 0) throw Error(ErrorCode::kRange, "inverse of zero");
  return Pow(a, p_ - 2);
}

FixedPointCodec::FixedPointCodec(const PrimeField& field, int fractional_bits,
                                 uint64_t max_summands)
    : field_(field),
      fractional_bits_(fractional_bits),
      max_summands_(max_summands) {
  if (fractional_bits < 0 || fractional_bits > 40) {
    throw Error(ErrorCode::kConfiguration, "fractional_bits must be in [0, 40]");
  }
  if (max_summands == 0) {
    throw Error(ErrorCode::kConfiguration, "max_summands must be positive");
  }
  scale_ = std::ldexp(1.0, fractional_bits);
  resolution_ = std::ldexp(1.0, -fractional_bits);
  // 2 * max_fixed * max_summands < p keeps any admissible sum unambiguous.
  uint64_t max_fixed = (field.modulus() - 1) / (2 * max_summands);
  if (max_fixed > 0) --max_fixed;
  if (max_fixed < 1) {
    throw Error(ErrorCode::kConfiguration,
                "field too small for the requested fixed-point budget");
  }
  range_bound_ = static_cast<double>(max_fixed) * resolution_;
}

int64_t FixedPointCodec::ToFixed(double x) const {
  if (!std::isfinite(x) || std::fabs(x) > range_bound_) {
    std::ostringstream msg;
    msg << "value " << x << " outside fixed-point range +/-" << range_bound_;
    throw Error(ErrorCode::kRange, msg.str());
  }
  return static_cast<int64_t>(std::floor(x * scale_ + 0.5));
}

void ShamirScheme::ValidateRoster(std::span<const uint32_t> roster) const {
  for (size_t i = 0; i < roster.size(); ++i) {
    if (roster[i] == 0) throw Error(ErrorCode::kRoster, "holder index 0 is reserved");
    if (roster[i] >= field_.modulus()) {
      throw Error(ErrorCode::kRoster, "holder index not below field modulus");
    }
    for (size_t j = 0; j < i; ++j) {
      if (roster[i] == roster[j]) {
        throw Error(ErrorCode::kRoster,
                    "duplicate holder index " + std::to_string(roster[i]));
      }
    }
  }
}

FieldElement ShamirScheme::Evaluate(std::span<const FieldElement> coefficients,
                                    uint32_t x) const {
  FieldElement acc{0};
  FieldElement point = field_.FromUint(x);
  for (size_t i = coefficients.size(); i-- > 0;) {
    acc = field_.Add(field_.Mul(acc, point), coefficients[i]);
  }
  return acc;
}

std::vector<Share> ShamirScheme::Split(FieldElement secret, uint32_t t,
                                       std::span<const uint32_t> roster,
                                       Rng& rng) const {
  FieldElement one_secret[] = {secret};
  auto batch = SplitBatch(one_secret, t, roster, rng);
  std::vector<Share> shares;
  shares.reserve(roster.size());
  for (size_t h = 0; h < roster.size(); ++h) {
    shares.push_back({roster[h], batch[h][0]});
  }
  return shares;
}

std::vector<std::vector<FieldElement>> ShamirScheme::SplitBatch(
    std::span<const FieldElement> secrets, uint32_t t,
    std::span<const uint32_t> roster, Rng& rng) const {
  if (t == 0 || t > roster.size()) {
    throw Error(ErrorCode::kThreshold,
                "threshold " + std::to_string(t) + " invalid for roster of " +
                    std::to_string(roster.size()));
  }
  ValidateRoster(roster);
  std::vector<std::vector<FieldElement>> out(
      roster.size(), std::vector<FieldElement>(secrets.size()));
  std::vector<FieldElement> coefficients(t);
  for (size_t i = 0; i < secrets.size(); ++i) {
    coefficients[0] = secrets[i];
    for (uint32_t c = 1; c < t; ++c) coefficients[c] = field_.Random(rng);
    for (size_t h = 0; h < roster.size(); ++h) {
      out[h][i] = Evaluate(coefficients, roster[h]);
    }
  }
  return out;
}

std::vector<FieldElement> ShamirScheme::LagrangeAtZero(
    std::span<const uint32_t> points) const {
  ValidateRoster(points);
  std::vector<FieldElement> basis(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    FieldElement num{1};
    FieldElement den{1};
    FieldElement xi = field_.FromUint(points[i]);
    for (size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      FieldElement xj = field_.FromUint(points[j]);
      num = field_.Mul(num, xj);
      den = field_.Mul(den, field_.Sub(xj, xi));
    }
    basis[i] = field_.Mul(num, field_.Inv(den));
  }
  return basis;
}

FieldElement ShamirScheme::Reconstruct(std::span<const Share> shares,
                                       uint32_t t) const {
  if (t == 0 || shares.size() < t) {
    throw Error(ErrorCode::kThreshold,
                "need " + std::to_string(t) + " shares, have " +
                    std::to_string(shares.size()));
  }
  std::vector<uint32_t> points(t);
  for (uint32_t i = 0; i < t; ++i) points[i] = shares[i].holder;
  auto basis = LagrangeAtZero(points);
  FieldElement secret{0};
  for (uint32_t i = 0; i < t; ++i) {
    secret = field_.Add(secret, field_.Mul(basis[i], shares[i].value));
  }
  return secret;
}

std::vector<FieldElement> BytesToLimbs(const PrimeField& field,
                                       std::span<const uint8_t> bytes) {
  const int width = field.safe_bits();
  const size_t total_bits = bytes.size() * 8;
  const size_t count = (total_bits + width - 1) / width;
  std::vector<FieldElement> limbs(count);
  // Bit k of the integer is bit (k % 8) of bytes[size - 1 - k / 8].
  for (size_t k = 0; k < total_bits; ++k) {
    uint8_t byte = bytes[bytes.size() - 1 - k / 8];
    if ((byte >> (k % 8)) & 1) limbs[k / width].value |= uint64_t{1} << (k % width);
  }
  return limbs;
}

std::vector<uint8_t> LimbsToBytes(const PrimeField& field,
                                  std::span<const FieldElement> limbs,
                                  size_t byte_count) {
  const int width = field.safe_bits();
  std::vector<uint8_t> bytes(byte_count, 0);
  for (size_t k = 0; k < byte_count * 8; ++k) {
    size_t limb = k / width;
    if (limb >= limbs.size()) break;
    if ((limbs[limb].value >> (k % width)) & 1) {
      bytes[byte_count - 1 - k / 8] |= static_cast<uint8_t>(1u << (k % 8));
    }
  }
  return bytes;
}

}  // namespace fedgbt
