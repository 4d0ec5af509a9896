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

#ifndef FEDGBT_RANDOM_H_
#define FEDGBT_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace fedgbt {

// Seeded, portable random stream. Every random draw in a run comes from one
// of these, so a run is a pure function of its seed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Independent child stream keyed by (seed, label, index).
  static Rng Derive(uint64_t seed, std::string_view label, uint64_t index = 0);

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, bound). bound must be nonzero.
  uint64_t UniformBelow(uint64_t bound);

  // Uniform in [0, 1).
  double UniformDouble();

  void FillBytes(std::span<uint8_t> out);

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(UniformBelow(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<size_t> SampleWithoutReplacement(size_t n, size_t k);

 private:
  std::mt19937_64 engine_;
};

uint64_t MixSeed(uint64_t seed, std::string_view label, uint64_t index);

}  // namespace fedgbt

#endif  // FEDGBT_RANDOM_H_
