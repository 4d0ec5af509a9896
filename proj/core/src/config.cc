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

#include "fedgbt/config.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fedgbt/error.h"
#include "fedgbt/loss.h"

namespace fedgbt {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void Bad(std::string_view what) {
  throw Error(ErrorCode::kConfiguration, std::string(what));
}

template <typename T>
T ParseNumber(std::string_view text) {
  T value{};
  text = Trim(text);
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    Bad("'" + std::string(text) + "' is not a valid number");
  }
  return value;
}

template <typename T>
std::vector<T> ParseList(std::string_view text) {
  std::vector<T> out;
  while (!text.empty()) {
    const size_t comma = text.find(',');
    out.push_back(ParseNumber<T>(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) Bad("empty list");
  return out;
}

template <typename T>
std::string FormatList(const std::vector<T>& values) {
  std::ostringstream out;
  out.precision(17);
  for (size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
  return out.str();
}

template <typename T>
std::string Format(T value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

DropoutCase ParseScope(std::string_view text) {
  if (text == "before_upload") return DropoutCase::kBeforeUpload;
  if (text == "during_secfind") return DropoutCase::kDuringSecFind;
  if (text == "during_secpred") return DropoutCase::kDuringSecPred;
  Bad("unknown dropout scope '" + std::string(text) +
      "' (before_upload, during_secfind, during_secpred)");
}

std::string ScopeName(DropoutCase c) {
  switch (c) {
    case DropoutCase::kBeforeUpload: return "before_upload";
    case DropoutCase::kDuringSecFind: return "during_secfind";
    case DropoutCase::kDuringSecPred: return "during_secpred";
  }
  return "?";
}

SelectionPolicy ParsePolicy(std::string_view text) {
  if (text == "all") return SelectionPolicy::kAll;
  if (text == "uptime") return SelectionPolicy::kUptime;
  Bad("unknown selection policy '" + std::string(text) + "' (all, uptime)");
}

struct Entry {
  const char* key;
  std::function<void(ExperimentSpec&, std::string_view)> set;
  std::function<std::string(const ExperimentSpec&)> get;
};

#define FEDGBT_NUMBER(name, field)                                                      \
  Entry {                                                                               \
    name, [](ExperimentSpec& s, std::string_view v) {                                   \
      s.field = ParseNumber<std::remove_reference_t<decltype(s.field)>>(v);             \
    },                                                                                  \
        [](const ExperimentSpec& s) { return Format(s.field); }                         \
  }

const std::vector<Entry>& Entries() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e = {
        {"dataset", [](ExperimentSpec& s, std::string_view v) { s.dataset = ParseDatasetKind(v); },
         [](const ExperimentSpec& s) { return DatasetKindName(s.dataset); }},
        {"data_dir", [](ExperimentSpec& s, std::string_view v) { s.data_dir = std::string(v); },
         [](const ExperimentSpec& s) { return s.data_dir.string(); }},
        FEDGBT_NUMBER("train_size", train_size),
        FEDGBT_NUMBER("test_size", test_size),
        FEDGBT_NUMBER("synthetic_features", synthetic_features),
        FEDGBT_NUMBER("synthetic_noise", synthetic_noise),
        {"out", [](ExperimentSpec& s, std::string_view v) { s.out_dir = std::string(v); },
         [](const ExperimentSpec& s) { return s.out_dir.string(); }},
        FEDGBT_NUMBER("seed", run.federation.seed),
        FEDGBT_NUMBER("users", run.users),
        FEDGBT_NUMBER("edges", run.federation.edges),
        FEDGBT_NUMBER("user_threshold", run.federation.user_threshold),
        FEDGBT_NUMBER("edge_threshold", run.federation.edge_threshold),
        FEDGBT_NUMBER("eta", run.federation.boost.eta),
        FEDGBT_NUMBER("gamma", run.federation.boost.gamma),
        FEDGBT_NUMBER("lambda", run.federation.boost.lambda),
        FEDGBT_NUMBER("max_depth", run.federation.boost.max_depth),
        FEDGBT_NUMBER("rounds", run.federation.boost.rounds),
        FEDGBT_NUMBER("feature_subsample", run.federation.boost.feature_subsample),
        FEDGBT_NUMBER("min_instances", run.federation.boost.min_instances),
        {"loss",
         [](ExperimentSpec& s, std::string_view v) { s.run.federation.loss = ParseLossKind(v); },
         [](const ExperimentSpec& s) { return LossKindName(s.run.federation.loss); }},
        FEDGBT_NUMBER("security_parameter", run.federation.security_parameter),
        FEDGBT_NUMBER("field_modulus", run.federation.field_modulus),
        FEDGBT_NUMBER("fractional_bits", run.federation.fractional_bits),
        {"selection",
         [](ExperimentSpec& s, std::string_view v) { s.run.federation.policy = ParsePolicy(v); },
         [](const ExperimentSpec& s) {
           return std::string(s.run.federation.policy == SelectionPolicy::kAll ? "all"
                                                                               : "uptime");
         }},
        FEDGBT_NUMBER("select_fraction", run.federation.select_fraction),
        FEDGBT_NUMBER("min_uptime", run.min_uptime),
        FEDGBT_NUMBER("max_candidates", run.max_candidates),
        FEDGBT_NUMBER("dropout_rate", run.dropout.rate),
        FEDGBT_NUMBER("dropout_period", run.dropout.period),
        {"dropout_scope",
         [](ExperimentSpec& s, std::string_view v) { s.run.dropout.scope = ParseScope(v); },
         [](const ExperimentSpec& s) { return ScopeName(s.run.dropout.scope); }},
        {"sweep_users",
         [](ExperimentSpec& s, std::string_view v) { s.sweep_users = ParseList<uint32_t>(v); },
         [](const ExperimentSpec& s) { return FormatList(s.sweep_users); }},
        {"sweep_edges",
         [](ExperimentSpec& s, std::string_view v) { s.sweep_edges = ParseList<uint32_t>(v); },
         [](const ExperimentSpec& s) { return FormatList(s.sweep_edges); }},
        {"sweep_dropout",
         [](ExperimentSpec& s, std::string_view v) { s.sweep_dropout = ParseList<double>(v); },
         [](const ExperimentSpec& s) { return FormatList(s.sweep_dropout); }},
    };
    // Cost weights are addressable as cost_<primitive>.
    for (size_t p = 0; p < kPrimitiveCount; ++p) {
      e.push_back({nullptr,
                   [p](ExperimentSpec& s, std::string_view v) {
                     s.run.cost.weight_us[p] = ParseNumber<double>(v);
                   },
                   [p](const ExperimentSpec& s) { return Format(s.run.cost.weight_us[p]); }});
    }
    return e;
  }();
  return entries;
}

#undef FEDGBT_NUMBER

std::string KeyOf(size_t i) {
  const Entry& e = Entries()[i];
  if (e.key != nullptr) return e.key;
  const size_t first_cost = Entries().size() - kPrimitiveCount;
  return "cost_" + std::string(PrimitiveName(static_cast<Primitive>(i - first_cost)));
}

}  // namespace

DatasetKind ParseDatasetKind(std::string_view name) {
  if (name == "adult") return DatasetKind::kAdult;
  if (name == "mnist") return DatasetKind::kMnist;
  if (name == "synthetic") return DatasetKind::kSynthetic;
  Bad("unknown dataset '" + std::string(name) + "' (adult, mnist, synthetic)");
}

std::string DatasetKindName(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kAdult: return "adult";
    case DatasetKind::kMnist: return "mnist";
    case DatasetKind::kSynthetic: return "synthetic";
  }
  return "?";
}

ExperimentSpec::ExperimentSpec() {
  run.users = 300;
  run.federation.edges = 10;
  run.federation.boost.rounds = 50;
}

void ExperimentSpec::Validate() const {
  run.federation.boost.Validate();
  run.dropout.Validate();
  if (run.users == 0) Bad("users must be >= 1");
  if (run.federation.edges == 0) Bad("edges must be >= 1");
  if (run.users < run.federation.edges) Bad("every edge needs at least one user");
  if (run.max_candidates == 0) Bad("max_candidates must be >= 1");
  if (!(run.min_uptime >= 0 && run.min_uptime <= 1)) Bad("min_uptime must be in [0, 1]");
  if (dataset == DatasetKind::kSynthetic && (synthetic_features == 0 || train_size == 0)) {
    Bad("synthetic data needs train_size and synthetic_features >= 1");
  }
  for (double r : sweep_dropout) {
    DropoutSchedule d = run.dropout;
    d.rate = r;
    d.Validate();
  }
  for (double w : run.cost.weight_us) {
    if (!(w >= 0)) Bad("cost weights must be non-negative");
  }
}

void ApplySetting(ExperimentSpec& spec, std::string_view key, std::string_view value,
                  std::string_view origin) {
  const auto& entries = Entries();
  for (size_t i = 0; i < entries.size(); ++i) {
    if (KeyOf(i) != key) continue;
    try {
      entries[i].set(spec, Trim(value));
    } catch (const Error& e) {
      Bad(std::string(origin) + ": " + std::string(key) + ": " + e.what());
    }
    return;
  }
  Bad(std::string(origin) + ": unknown key '" + std::string(key) + "'");
}

void ApplyConfigText(ExperimentSpec& spec, std::string_view text, std::string_view origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  bool versioned = false;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    view = Trim(view.substr(0, view.find('#')));
    if (view.empty()) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(number);
    const size_t eq = view.find('=');
    if (eq == std::string_view::npos) Bad(where + ": expected key = value");
    const std::string_view key = Trim(view.substr(0, eq));
    const std::string_view value = Trim(view.substr(eq + 1));
    if (key == "schema_version") {
      int version = 0;
      try {
        version = ParseNumber<int>(value);
      } catch (const Error&) {
        Bad(where + ": schema_version must be an integer");
      }
      if (version != kConfigSchemaVersion) {
        Bad(where + ": unsupported schema_version " + std::string(value) + " (expected " +
            std::to_string(kConfigSchemaVersion) + ")");
      }
      versioned = true;
      continue;
    }
    if (!versioned) Bad(where + ": schema_version must come first");
    ApplySetting(spec, key, value, where);
  }
  if (!versioned) Bad(std::string(origin) + ": missing schema_version");
}

void ApplyConfigFile(ExperimentSpec& spec, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Bad("cannot read config file " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  ApplyConfigText(spec, text.str(), path.string());
}

void ApplyEnvironment(ExperimentSpec& spec,
                      const std::function<std::optional<std::string>(const std::string&)>& getenv) {
  for (const auto& key : ConfigKeys()) {
    std::string name(kEnvPrefix);
    for (char c : key) name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (auto value = getenv(name)) ApplySetting(spec, key, *value, name);
  }
}

void ApplyEnvironment(ExperimentSpec& spec) {
  ApplyEnvironment(spec, [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  });
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> out;
  for (size_t i = 0; i < Entries().size(); ++i) out.push_back(KeyOf(i));
  return out;
}

std::string FormatConfig(const ExperimentSpec& spec) {
  std::string out = "schema_version = " + std::to_string(kConfigSchemaVersion) + "\n";
  const auto& entries = Entries();
  for (size_t i = 0; i < entries.size(); ++i) {
    out += KeyOf(i) + " = " + entries[i].get(spec) + "\n";
  }
  return out;
}

}  // namespace fedgbt
