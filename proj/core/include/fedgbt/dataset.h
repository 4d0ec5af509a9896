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

#ifndef FEDGBT_DATASET_H_
#define FEDGBT_DATASET_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fedgbt {

// Sparse instance; absent features read as 0.
struct Instance {
  std::vector<std::pair<uint32_t, double>> features;  // sorted by id
  double label = 0.0;  // 0/1 for binary tasks, class index otherwise

  double Get(uint32_t feature) const;
};

struct Dataset {
  std::string name;
  std::vector<Instance> instances;
  uint32_t feature_count = 0;
  uint32_t class_count = 2;

  size_t size() const { return instances.size(); }
  Dataset Subset(const std::vector<size_t>& indices) const;
};

// Row-major dense copy of a dataset's features (missing entries are 0).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(const Dataset& data);

  size_t rows() const { return rows_; }
  uint32_t cols() const { return cols_; }
  double at(size_t row, uint32_t col) const { return values_[row * cols_ + col]; }

 private:
  size_t rows_ = 0;
  uint32_t cols_ = 0;
  std::vector<double> values_;
};

}  // namespace fedgbt

#endif  // FEDGBT_DATASET_H_
