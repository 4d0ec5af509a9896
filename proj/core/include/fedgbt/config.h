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

#ifndef FEDGBT_CONFIG_H_
#define FEDGBT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedgbt/harness.h"

namespace fedgbt {

enum class DatasetKind { kAdult, kMnist, kSynthetic };
DatasetKind ParseDatasetKind(std::string_view name);
std::string DatasetKindName(DatasetKind kind);

// Everything one experiment needs. Defaults follow the reference setup:
// 300 users over 10 edges, eta 0.3, gamma 0.1, lambda 1, depth 3.
struct ExperimentSpec {
  DatasetKind dataset = DatasetKind::kAdult;
  std::filesystem::path data_dir = "data";
  // Stratified sizes of the training and test sets; 0 keeps everything.
  size_t train_size = 2000;
  size_t test_size = 1000;
  // Synthetic data only.
  uint32_t synthetic_features = 10;
  double synthetic_noise = 0.05;

  RunConfig run;
  std::filesystem::path out_dir = "out";

  std::vector<uint32_t> sweep_users = {60, 120, 180, 240, 300};
  std::vector<uint32_t> sweep_edges = {2, 4, 6, 8, 10};
  std::vector<double> sweep_dropout = {0.0, 0.1, 0.2, 0.3};

  ExperimentSpec();
  // kConfiguration describing the first invalid setting.
  void Validate() const;
};

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr std::string_view kEnvPrefix = "FEDGBT_";

// Sets one key from its text form; kConfiguration for unknown keys or
// unparsable values. `origin` is prepended to error messages.
void ApplySetting(ExperimentSpec& spec, std::string_view key, std::string_view value,
                  std::string_view origin);

// Reads "key = value" lines ('#' starts a comment). The file must declare
// schema_version = 1 before any other key.
void ApplyConfigFile(ExperimentSpec& spec, const std::filesystem::path& path);
void ApplyConfigText(ExperimentSpec& spec, std::string_view text, std::string_view origin);

// For every known key, looks up FEDGBT_<KEY> (upper case) through `getenv`
// and applies it when set.
void ApplyEnvironment(ExperimentSpec& spec,
                      const std::function<std::optional<std::string>(const std::string&)>& getenv);
void ApplyEnvironment(ExperimentSpec& spec);

// Every key, in a stable order.
std::vector<std::string> ConfigKeys();

// Renders the experiment settings in the file format; ApplyConfigText reads it back.
std::string FormatConfig(const ExperimentSpec& spec);

}  // namespace fedgbt

#endif  // FEDGBT_CONFIG_H_
