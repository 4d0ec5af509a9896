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

#ifndef FEDGBT_TESTS_TEST_UTIL_H_
#define FEDGBT_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "fedgbt/finite_field.h"

namespace fedgbt::testing {

// Modular arithmetic written independently of PrimeField, for oracles.
inline uint64_t MulMod(uint64_t a, uint64_t b, uint64_t p) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

inline uint64_t PowMod(uint64_t a, uint64_t e, uint64_t p) {
  uint64_t r = 1;
  a %= p;
  while (e) {
    if (e & 1) r = MulMod(r, a, p);
    a = MulMod(a, a, p);
    e >>= 1;
  }
  return r;
}

// Lagrange interpolation at zero by the textbook product formula.
inline uint64_t InterpolateAtZero(std::span<const Share> shares, uint64_t p) {
  uint64_t acc = 0;
  for (size_t i = 0; i < shares.size(); ++i) {
    uint64_t num = 1, den = 1;
    for (size_t j = 0; j < shares.size(); ++j) {
      if (i == j) continue;
      num = MulMod(num, shares[j].holder, p);
      den = MulMod(den, (shares[j].holder + p - shares[i].holder) % p, p);
    }
    const uint64_t term = MulMod(MulMod(shares[i].value.value, num, p), PowMod(den, p - 2, p), p);
    acc = (acc + term) % p;
  }
  return acc;
}

inline std::vector<uint32_t> Roster(uint32_t n) {
  std::vector<uint32_t> r(n);
  std::iota(r.begin(), r.end(), 1u);
  return r;
}

// Calls fn(subset) for every k-subset of {0..n-1}.
template <typename Fn>
void ForEachSubset(uint32_t n, uint32_t k, Fn fn) {
  std::vector<uint32_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0u);
  while (true) {
    fn(idx);
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (uint32_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace fedgbt::testing

#endif  // FEDGBT_TESTS_TEST_UTIL_H_
