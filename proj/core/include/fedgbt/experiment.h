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

#ifndef FEDGBT_EXPERIMENT_H_
#define FEDGBT_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fedgbt/cart.h"
#include "fedgbt/config.h"
#include "fedgbt/harness.h"

namespace fedgbt {

// Train/test/reserve sets for a spec. ADULT reads
// <data_dir>/adult/adult.{train,test}.libsvm and MNIST reads the four IDX
// files under <data_dir>/mnist; both are stratified down to train_size and
// test_size, and the training instances left over become the reserve.
// kConfiguration when files are missing or the loss does not fit the
// class count.
RunInputs LoadExperimentData(const ExperimentSpec& spec);

// confusion[actual][predicted].
using ConfusionMatrix = std::vector<std::vector<uint64_t>>;
ConfusionMatrix Confusion(const Model& model, const Dataset& data);
double AccuracyFromConfusion(const ConfusionMatrix& confusion);

// Writes model.json, rounds.csv, stages.csv, summary.json and the resolved
// config.txt into spec.out_dir.
RunResult CmdTrain(const ExperimentSpec& spec);

struct CurvePoint {
  int round = 0;
  double accuracy = 0.0;
  double loss = 0.0;
};

struct ComparisonReport {
  std::vector<CurvePoint> federated;
  std::vector<CurvePoint> plaintext;
  bool federated_ok = false;
  bool plaintext_ok = false;
  std::string failure;  // first arm failure, if any
  double final_gap = 0.0;  // |acc_fed - acc_plain| after the last round
  double max_gap = 0.0;    // over all rounds both arms completed
  ConfusionMatrix federated_confusion;
  ConfusionMatrix plaintext_confusion;
  RunMetrics metrics;  // federated arm

  bool complete() const { return federated_ok && plaintext_ok; }
};

// Trains the federated pipeline and the plaintext reference (same seed,
// data and candidates, floating-point gradients) and writes compare.csv,
// stages.csv and compare.json into spec.out_dir. An arm that throws leaves
// a partial report with the failure recorded.
ComparisonReport CmdCompare(const ExperimentSpec& spec);

enum class SweepAxis { kUsers, kEdges, kDropout };
SweepAxis ParseSweepAxis(std::string_view name);
std::string SweepAxisName(SweepAxis axis);

struct SweepPoint {
  double value = 0.0;
  bool ok = false;
  std::string error;
  uint32_t users = 0;
  uint32_t edges = 0;
  double per_user_bytes = 0.0;
  double per_user_us = 0.0;
  double per_edge_bytes = 0.0;
  double per_edge_us = 0.0;
  double central_us = 0.0;
  double final_accuracy = 0.0;
  uint64_t messages = 0;
};

// One run per value of the axis, writing sweep_<axis>.csv. Failed points
// are recorded and the sweep continues.
std::vector<SweepPoint> CmdSweep(const ExperimentSpec& spec, SweepAxis axis);
std::string SweepCsv(SweepAxis axis, const std::vector<SweepPoint>& points);

// Mean simulated microseconds per participant, by role and stage.
std::string StagesCsv(const RunMetrics& metrics);

}  // namespace fedgbt

#endif  // FEDGBT_EXPERIMENT_H_
