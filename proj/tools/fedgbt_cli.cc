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

// Command line driver: train, compare and sweep.
//
// Settings are resolved as defaults < --config file < FEDGBT_* environment
// variables < command line flags.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedgbt/config.h"
#include "fedgbt/error.h"
#include "fedgbt/experiment.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Flags {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> dataset;
  std::optional<size_t> subsample;
  std::optional<double> dropout_rate;
  std::optional<uint32_t> users;
  std::optional<uint32_t> edges;
  std::vector<std::string> set;
  std::string axis = "users";
};

void AddCommonFlags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Config file (key = value, schema_version = 1)");
  cmd->add_option("--seed", f.seed, "Seed for data partitioning, keys and sampling");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--dataset", f.dataset, "adult, mnist or synthetic")
      ->check(CLI::IsMember({"adult", "mnist", "synthetic"}));
  cmd->add_option("--subsample", f.subsample,
                  "Stratified training set size; the test set gets half as many (0 = all)");
  cmd->add_option("--dropout-rate", f.dropout_rate, "Share of each domain dropped per event");
  cmd->add_option("--users", f.users, "Number of users");
  cmd->add_option("--edges", f.edges, "Number of edge servers");
  cmd->add_option("--set", f.set, "Any config key as key=value (repeatable)");
}

fedgbt::ExperimentSpec Resolve(const Flags& f) {
  using fedgbt::ApplySetting;
  fedgbt::ExperimentSpec spec;
  spec.data_dir = FEDGBT_DEFAULT_DATA_DIR;
  if (!f.config.empty()) fedgbt::ApplyConfigFile(spec, f.config);
  fedgbt::ApplyEnvironment(spec);
  if (f.seed) spec.run.federation.seed = *f.seed;
  if (f.out) spec.out_dir = *f.out;
  if (f.dataset) spec.dataset = fedgbt::ParseDatasetKind(*f.dataset);
  if (f.subsample) {
    spec.train_size = *f.subsample;
    spec.test_size = *f.subsample / 2;
  }
  if (f.dropout_rate) spec.run.dropout.rate = *f.dropout_rate;
  if (f.users) spec.run.users = *f.users;
  if (f.edges) spec.run.federation.edges = *f.edges;
  for (const auto& kv : f.set) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw fedgbt::Error(fedgbt::ErrorCode::kConfiguration, "--set expects key=value: " + kv);
    }
    ApplySetting(spec, kv.substr(0, eq), kv.substr(eq + 1), "--set");
  }
  spec.Validate();
  return spec;
}

void PrintTrain(const fedgbt::RunResult& r, const fedgbt::ExperimentSpec& spec) {
  const auto& m = r.metrics;
  if (!m.rounds.empty()) {
    std::printf("rounds %zu  accuracy %.4f  loss %.4f\n", m.rounds.size(),
                m.rounds.back().accuracy, m.rounds.back().loss);
  }
  std::printf("messages %llu  transcript %s\n", static_cast<unsigned long long>(m.messages_sent),
              m.transcript_hash.c_str());
  std::printf("wrote %s\n", spec.out_dir.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated gradient boosting over users, edge servers and a central server"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* train = app.add_subcommand("train", "Train and write model, metrics and summary");
  CLI::App* compare = app.add_subcommand("compare", "Federated vs plaintext training curves");
  CLI::App* sweep = app.add_subcommand("sweep", "One run per value along an axis");
  for (CLI::App* cmd : {train, compare, sweep}) AddCommonFlags(cmd, flags);
  sweep->add_option("--axis", flags.axis, "users, edges or dropout")
      ->check(CLI::IsMember({"users", "edges", "dropout"}));
  app.footer(
      "Every config key can also be set through an environment variable named FEDGBT_<KEY>,\n"
      "e.g. FEDGBT_ROUNDS=20. Exit codes: 0 success, 2 configuration error, 3 runtime error.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const fedgbt::ExperimentSpec spec = Resolve(flags);
    if (train->parsed()) {
      PrintTrain(fedgbt::CmdTrain(spec), spec);
    } else if (compare->parsed()) {
      const auto report = fedgbt::CmdCompare(spec);
      if (!report.complete()) {
        std::fprintf(stderr, "partial report: %s\n", report.failure.c_str());
        return kExitRuntime;
      }
      std::printf("federated %.4f  plaintext %.4f  gap %.2f pp (max over rounds %.2f pp)\n",
                  report.federated.back().accuracy, report.plaintext.back().accuracy,
                  100 * report.final_gap, 100 * report.max_gap);
      std::printf("wrote %s\n", spec.out_dir.string().c_str());
    } else {
      const auto axis = fedgbt::ParseSweepAxis(flags.axis);
      for (const auto& p : fedgbt::CmdSweep(spec, axis)) {
        if (p.ok) {
          std::printf("%s=%g  user %.0f B %.0f us  edge %.0f B %.0f us  acc %.4f\n",
                      flags.axis.c_str(), p.value, p.per_user_bytes, p.per_user_us,
                      p.per_edge_bytes, p.per_edge_us, p.final_accuracy);
        } else {
          std::printf("%s=%g  failed: %s\n", flags.axis.c_str(), p.value, p.error.c_str());
        }
      }
      std::printf("wrote %s\n", spec.out_dir.string().c_str());
    }
  } catch (const fedgbt::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    const bool config = e.code() == fedgbt::ErrorCode::kConfiguration ||
                        e.code() == fedgbt::ErrorCode::kThreshold ||
                        e.code() == fedgbt::ErrorCode::kParse ||
                        e.code() == fedgbt::ErrorCode::kFormat;
    return config ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
