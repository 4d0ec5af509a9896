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

#ifndef FEDGBT_DATA_IO_H_
#define FEDGBT_DATA_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "fedgbt/dataset.h"
#include "fedgbt/finite_field.h"

namespace fedgbt {

// Sparse "label idx:value ..." text. Labels -1/+1 become 0/1, other
// integral labels are kept as class indices; 1-based ids become 0-based.
// Malformed lines raise kParse with the line number.
Dataset ParseLibsvm(std::istream& in, const std::string& name = "libsvm");
Dataset LoadLibsvm(const std::filesystem::path& path);
// Binary labels are written as -1/+1.
void WriteLibsvm(const Dataset& data, std::ostream& out);

// IDX image/label pair (magic 0x00000803 / 0x00000801). Pixels are scaled
// to [0, 1]. kFormat on magic, size or count mismatch.
Dataset LoadIdx(const std::filesystem::path& images, const std::filesystem::path& labels);

// Owner -> instance indices: seeded shuffle, then round-robin. kConfiguration
// when there are more users than instances.
std::vector<std::vector<size_t>> Partition(size_t instance_count, size_t users, uint64_t seed);

// Up to `total` instances, split across classes in proportion to their
// frequency, each class keeping its earliest instances in file order.
Dataset StratifiedSubsample(const Dataset& data, size_t total);
// The instance indices StratifiedSubsample keeps, ascending.
std::vector<size_t> StratifiedSubsampleIndices(const Dataset& data, size_t total);

// Snaps every feature value onto the codec grid.
void QuantizeFeatures(Dataset& data, const FixedPointCodec& codec);

// Seeded binary task: a noisy linear rule over `features` dense features
// in [0, 1].
Dataset MakeSynthetic(size_t instances, uint32_t features, uint64_t seed,
                      double label_noise = 0.05);

}  // namespace fedgbt

#endif  // FEDGBT_DATA_IO_H_
