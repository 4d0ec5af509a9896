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

#ifndef FEDGBT_MODEL_IO_H_
#define FEDGBT_MODEL_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "fedgbt/cart.h"

namespace fedgbt {

inline constexpr int kModelFormatVersion = 1;

// Versioned JSON: loss, class count, eta and the tree list with topology,
// feature ids, thresholds and leaf weights. Thresholds are included; a
// dump is the central server's own artifact.
std::string ModelToJson(const Model& model);
// kFormat on malformed input, wrong version or inconsistent trees.
Model ModelFromJson(std::string_view json);

// Writes `contents` next to `path` and renames it into place, so readers
// never see a partial file. kRuntime on I/O failure.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);

void SaveModel(const Model& model, const std::filesystem::path& path);
Model LoadModel(const std::filesystem::path& path);

}  // namespace fedgbt

#endif  // FEDGBT_MODEL_IO_H_
