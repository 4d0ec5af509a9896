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

#include "fedgbt/experiment.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedgbt/data_io.h"
#include "fedgbt/error.h"
#include "fedgbt/model_io.h"
#include "fedgbt/plaintext_trainer.h"
#include "fedgbt/split.h"

namespace fedgbt {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path Require(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kConfiguration, "dataset file not found: " + path.string());
  }
  return path;
}

// Stratified train/test selection; unused training instances become the
// reserve for replacement users.
RunInputs Select(const Dataset& train, const Dataset& test, const ExperimentSpec& spec) {
  RunInputs out;
  if (spec.train_size == 0 || spec.train_size >= train.size()) {
    out.train = train;
    out.reserve = train.Subset({});
  } else {
    const auto keep = StratifiedSubsampleIndices(train, spec.train_size);
    std::vector<size_t> rest;
    size_t k = 0;
    for (size_t i = 0; i < train.size(); ++i) {
      if (k < keep.size() && keep[k] == i) {
        ++k;
      } else {
        rest.push_back(i);
      }
    }
    out.train = train.Subset(keep);
    out.reserve = train.Subset(rest);
  }
  out.test = spec.test_size == 0 || spec.test_size >= test.size()
                 ? test
                 : StratifiedSubsample(test, spec.test_size);
  return out;
}

void AlignFeatureCounts(RunInputs& in) {
  const uint32_t q =
      std::max({in.train.feature_count, in.test.feature_count, in.reserve.feature_count});
  in.train.feature_count = in.test.feature_count = in.reserve.feature_count = q;
}

std::string FormatDouble(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

json RoleJson(const RoleTotals& t) {
  json stages = json::object();
  for (size_t s = 0; s < kStageCount; ++s) {
    stages[std::string(StageName(static_cast<Stage>(s)))] =
        t.participants ? t.stage_us[s] / t.participants : 0.0;
  }
  return {{"participants", t.participants},
          {"messages_sent", t.messages_sent},
          {"bytes_sent", t.bytes_sent},
          {"messages_received", t.messages_received},
          {"bytes_received", t.bytes_received},
          {"mean_bytes", t.mean_bytes()},
          {"mean_simulated_us", t.mean_us()},
          {"mean_stage_us", std::move(stages)}};
}

std::string RoleName(Role r) {
  switch (r) {
    case Role::kUser: return "user";
    case Role::kEdge: return "edge";
    case Role::kCentral: return "central";
  }
  return "?";
}

json MetricsJson(const RunMetrics& m) {
  json roles = json::object();
  for (const auto& [role, totals] : m.roles) roles[RoleName(role)] = RoleJson(totals);
  json out = {{"rounds", m.rounds.size()},
              {"messages_sent", m.messages_sent},
              {"messages_delivered", m.messages_delivered},
              {"messages_discarded", m.messages_discarded},
              {"auth_failures", m.auth_failures},
              {"wall_seconds", m.wall_seconds},
              {"transcript_hash", m.transcript_hash},
              {"privacy_audit",
               {{"messages", m.audit.messages},
                {"user_to_edge", m.audit.user_to_edge},
                {"edge_to_central", m.audit.edge_to_central},
                {"raw_payloads", m.audit.raw_payloads},
                {"untagged_numeric", m.audit.untagged_numeric},
                {"clean", m.audit.clean()}}},
              {"roles", std::move(roles)},
              {"log", m.log}};
  if (!m.rounds.empty()) {
    out["final_accuracy"] = m.rounds.back().accuracy;
    out["final_loss"] = m.rounds.back().loss;
  }
  return out;
}

json ConfusionJson(const ConfusionMatrix& c) { return json(c); }

void PrepareOutDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kRuntime, "cannot create output directory " + dir.string());
}

json DataJson(const ExperimentSpec& spec, const RunInputs& in) {
  return {{"dataset", DatasetKindName(spec.dataset)},
          {"train", in.train.size()},
          {"test", in.test.size()},
          {"reserve", in.reserve.size()},
          {"features", in.train.feature_count},
          {"classes", in.train.class_count}};
}

}  // namespace

RunInputs LoadExperimentData(const ExperimentSpec& spec) {
  spec.Validate();
  RunInputs in;
  switch (spec.dataset) {
    case DatasetKind::kAdult: {
      const fs::path dir = spec.data_dir / "adult";
      in = Select(LoadLibsvm(Require(dir / "adult.train.libsvm")),
                  LoadLibsvm(Require(dir / "adult.test.libsvm")), spec);
      break;
    }
    case DatasetKind::kMnist: {
      const fs::path dir = spec.data_dir / "mnist";
      in = Select(LoadIdx(Require(dir / "train-images-idx3-ubyte"),
                          Require(dir / "train-labels-idx1-ubyte")),
                  LoadIdx(Require(dir / "t10k-images-idx3-ubyte"),
                          Require(dir / "t10k-labels-idx1-ubyte")),
                  spec);
      break;
    }
    case DatasetKind::kSynthetic: {
      const size_t test = spec.test_size == 0 ? spec.train_size / 2 : spec.test_size;
      // The reserve is as large as the training set.
      Dataset all = MakeSynthetic(2 * spec.train_size + test, spec.synthetic_features,
                                  spec.run.federation.seed, spec.synthetic_noise);
      std::vector<size_t> a(spec.train_size), b(test), c(spec.train_size);
      for (size_t i = 0; i < a.size(); ++i) a[i] = i;
      for (size_t i = 0; i < b.size(); ++i) b[i] = spec.train_size + i;
      for (size_t i = 0; i < c.size(); ++i) c[i] = spec.train_size + test + i;
      in.train = all.Subset(a);
      in.test = all.Subset(b);
      in.reserve = all.Subset(c);
      break;
    }
  }
  AlignFeatureCounts(in);
  const uint32_t classes = std::max(in.train.class_count, in.test.class_count);
  in.train.class_count = in.test.class_count = in.reserve.class_count = classes;
  if (spec.run.federation.loss == LossKind::kLogistic && classes > 2) {
    throw Error(ErrorCode::kConfiguration, DatasetKindName(spec.dataset) + " has " +
                                               std::to_string(classes) +
                                               " classes; set loss = softmax");
  }
  if (spec.run.users > in.train.size()) {
    throw Error(ErrorCode::kConfiguration, "more users than training instances");
  }
  return in;
}

ConfusionMatrix Confusion(const Model& model, const Dataset& data) {
  const size_t k = static_cast<size_t>(std::max(model.class_count, 2));
  ConfusionMatrix c(k, std::vector<uint64_t>(k, 0));
  for (const auto& x : data.instances) {
    const auto actual = static_cast<size_t>(x.label);
    const auto predicted = static_cast<size_t>(model.PredictClass(x));
    if (actual < k && predicted < k) ++c[actual][predicted];
  }
  return c;
}

double AccuracyFromConfusion(const ConfusionMatrix& confusion) {
  uint64_t total = 0, correct = 0;
  for (size_t i = 0; i < confusion.size(); ++i) {
    for (size_t j = 0; j < confusion[i].size(); ++j) {
      total += confusion[i][j];
      if (i == j) correct += confusion[i][j];
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

std::string StagesCsv(const RunMetrics& metrics) {
  std::ostringstream out;
  out.precision(10);
  out << "role,participants";
  for (size_t s = 0; s < kStageCount; ++s) out << ',' << StageName(static_cast<Stage>(s)) << "_us";
  out << ",total_us,mean_bytes\n";
  for (const auto& [role, t] : metrics.roles) {
    out << RoleName(role) << ',' << t.participants;
    for (size_t s = 0; s < kStageCount; ++s) {
      out << ',' << (t.participants ? t.stage_us[s] / t.participants : 0.0);
    }
    out << ',' << t.mean_us() << ',' << t.mean_bytes() << '\n';
  }
  return out.str();
}

RunResult CmdTrain(const ExperimentSpec& spec) {
  const RunInputs inputs = LoadExperimentData(spec);
  PrepareOutDir(spec.out_dir);
  RunResult result = Run(spec.run, inputs);
  SaveModel(result.model, spec.out_dir / "model.json");
  WriteFileAtomic(spec.out_dir / "rounds.csv", RoundsCsv(result.metrics));
  WriteFileAtomic(spec.out_dir / "stages.csv", StagesCsv(result.metrics));
  WriteFileAtomic(spec.out_dir / "config.txt", FormatConfig(spec));
  json summary = {{"command", "train"},
                  {"data", DataJson(spec, inputs)},
                  {"metrics", MetricsJson(result.metrics)},
                  {"confusion", ConfusionJson(Confusion(result.model, inputs.test))}};
  WriteFileAtomic(spec.out_dir / "summary.json", summary.dump(2) + "\n");
  return result;
}

ComparisonReport CmdCompare(const ExperimentSpec& spec) {
  RunInputs inputs = LoadExperimentData(spec);
  PrepareOutDir(spec.out_dir);
  ComparisonReport report;
  const auto& fc = spec.run.federation;

  try {
    RunResult fed = Run(spec.run, inputs);
    for (const auto& r : fed.metrics.rounds) {
      report.federated.push_back({r.round, r.accuracy, r.loss});
    }
    report.federated_confusion = Confusion(fed.model, inputs.test);
    report.metrics = std::move(fed.metrics);
    report.federated_ok = true;
  } catch (const Error& e) {
    report.failure = std::string("federated arm: ") + e.what();
  }

  try {
    // Same quantized inputs and candidates the federated arm sees.
    const PrimeField field(fc.field_modulus);
    const FixedPointCodec codec(field, fc.fractional_bits);
    Dataset train = inputs.train;
    Dataset test = inputs.test;
    QuantizeFeatures(train, codec);
    QuantizeFeatures(test, codec);
    const CandidateSchema schema = CandidateSchema::Build(train, spec.run.max_candidates);
    PlaintextOptions options;
    options.loss = fc.loss;
    options.seed = fc.seed;
    options.on_round = [&](int round, const Model& model) {
      const Evaluation ev = Evaluate(model, test);
      report.plaintext.push_back({round, ev.accuracy, ev.loss});
    };
    const Model plain = TrainPlaintext(train, schema, fc.boost, options);
    report.plaintext_confusion = Confusion(plain, test);
    report.plaintext_ok = true;
  } catch (const Error& e) {
    if (report.failure.empty()) report.failure = std::string("plaintext arm: ") + e.what();
  }

  const size_t common = std::min(report.federated.size(), report.plaintext.size());
  for (size_t i = 0; i < common; ++i) {
    report.max_gap = std::max(report.max_gap, std::abs(report.federated[i].accuracy -
                                                       report.plaintext[i].accuracy));
  }
  if (report.complete()) {
    report.final_gap = std::abs(AccuracyFromConfusion(report.federated_confusion) -
                                AccuracyFromConfusion(report.plaintext_confusion));
  }

  std::ostringstream csv;
  csv.precision(17);
  csv << "round,federated_accuracy,federated_loss,plaintext_accuracy,plaintext_loss\n";
  const size_t rows = std::max(report.federated.size(), report.plaintext.size());
  for (size_t i = 0; i < rows; ++i) {
    csv << i + 1;
    for (const auto* arm : {&report.federated, &report.plaintext}) {
      if (i < arm->size()) {
        csv << ',' << (*arm)[i].accuracy << ',' << (*arm)[i].loss;
      } else {
        csv << ",,";
      }
    }
    csv << '\n';
  }
  WriteFileAtomic(spec.out_dir / "compare.csv", csv.str());
  WriteFileAtomic(spec.out_dir / "stages.csv", StagesCsv(report.metrics));
  WriteFileAtomic(spec.out_dir / "config.txt", FormatConfig(spec));
  json summary = {{"command", "compare"},
                  {"data", DataJson(spec, inputs)},
                  {"complete", report.complete()},
                  {"federated_ok", report.federated_ok},
                  {"plaintext_ok", report.plaintext_ok},
                  {"failure", report.failure},
                  {"final_gap", report.final_gap},
                  {"max_gap", report.max_gap},
                  {"federated_confusion", ConfusionJson(report.federated_confusion)},
                  {"plaintext_confusion", ConfusionJson(report.plaintext_confusion)},
                  {"metrics", MetricsJson(report.metrics)}};
  WriteFileAtomic(spec.out_dir / "compare.json", summary.dump(2) + "\n");
  return report;
}

SweepAxis ParseSweepAxis(std::string_view name) {
  if (name == "users") return SweepAxis::kUsers;
  if (name == "edges") return SweepAxis::kEdges;
  if (name == "dropout") return SweepAxis::kDropout;
  throw Error(ErrorCode::kConfiguration,
              "unknown sweep axis '" + std::string(name) + "' (users, edges, dropout)");
}

std::string SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kUsers: return "users";
    case SweepAxis::kEdges: return "edges";
    case SweepAxis::kDropout: return "dropout";
  }
  return "?";
}

std::vector<SweepPoint> CmdSweep(const ExperimentSpec& spec, SweepAxis axis) {
  std::vector<double> values;
  switch (axis) {
    case SweepAxis::kUsers:
      values.assign(spec.sweep_users.begin(), spec.sweep_users.end());
      break;
    case SweepAxis::kEdges:
      values.assign(spec.sweep_edges.begin(), spec.sweep_edges.end());
      break;
    case SweepAxis::kDropout:
      values = spec.sweep_dropout;
      break;
  }
  spec.Validate();
  PrepareOutDir(spec.out_dir);
  std::vector<SweepPoint> points;
  for (double v : values) {
    ExperimentSpec point_spec = spec;
    if (axis == SweepAxis::kUsers) point_spec.run.users = static_cast<uint32_t>(v);
    if (axis == SweepAxis::kEdges) point_spec.run.federation.edges = static_cast<uint32_t>(v);
    if (axis == SweepAxis::kDropout) point_spec.run.dropout.rate = v;
    SweepPoint p;
    p.value = v;
    p.users = point_spec.run.users;
    p.edges = point_spec.run.federation.edges;
    try {
      const RunResult r = Run(point_spec.run, LoadExperimentData(point_spec));
      const auto& roles = r.metrics.roles;
      auto role = [&](Role k) { return roles.count(k) ? roles.at(k) : RoleTotals{}; };
      p.per_user_bytes = role(Role::kUser).mean_bytes();
      p.per_user_us = role(Role::kUser).mean_us();
      p.per_edge_bytes = role(Role::kEdge).mean_bytes();
      p.per_edge_us = role(Role::kEdge).mean_us();
      p.central_us = role(Role::kCentral).mean_us();
      p.final_accuracy = r.metrics.rounds.empty() ? 0.0 : r.metrics.rounds.back().accuracy;
      p.messages = r.metrics.messages_sent;
      p.ok = true;
    } catch (const Error& e) {
      p.error = e.what();
    }
    points.push_back(std::move(p));
  }
  WriteFileAtomic(spec.out_dir / ("sweep_" + SweepAxisName(axis) + ".csv"),
                  SweepCsv(axis, points));
  return points;
}

std::string SweepCsv(SweepAxis axis, const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out.precision(12);
  out << SweepAxisName(axis)
      << ",users,edges,status,per_user_bytes,per_user_us,per_edge_bytes,per_edge_us,central_us,"
         "final_accuracy,messages,error\n";
  for (const auto& p : points) {
    std::string error = p.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    out << FormatDouble(p.value) << ',' << p.users << ',' << p.edges << ','
        << (p.ok ? "ok" : "failed") << ',' << p.per_user_bytes << ',' << p.per_user_us << ','
        << p.per_edge_bytes << ',' << p.per_edge_us << ',' << p.central_us << ','
        << p.final_accuracy << ',' << p.messages << ',' << error << '\n';
  }
  return out.str();
}

}  // namespace fedgbt
