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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedgbt/config.h"
#include "fedgbt/data_io.h"
#include "fedgbt/error.h"
#include "fedgbt/experiment.h"
#include "fedgbt/federation.h"
#include "fedgbt/harness.h"
#include "fedgbt/loss.h"
#include "fedgbt/masking.h"
#include "fedgbt/plaintext_trainer.h"
#include "fedgbt/seccmp.h"

namespace fedgbt {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path data_dir;
  fs::path scratch;
  // Filled by criterion 2 and reused by criteria 3 and 10.
  bool have_baseline = false;
  double baseline_accuracy = 0.0;
  PrivacyAudit baseline_audit;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fixed(double v, int digits = 4) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentSpec AdultSubsample(const Context& ctx) {
  ExperimentSpec spec;
  spec.dataset = DatasetKind::kAdult;
  spec.data_dir = ctx.data_dir;
  spec.train_size = 2000;
  spec.test_size = 1000;
  return spec;
}

// ---------------------------------------------------------------------------
// 1. Federated training reproduces the plaintext trainer.

struct OracleConfig {
  DatasetKind dataset;
  size_t instances;
  uint32_t features;  // synthetic only
  uint32_t users;
  uint32_t edges;
};

std::string CompareModels(const Model& fed, const Model& oracle) {
  if (fed.trees.size() != oracle.trees.size()) return "tree count differs";
  const double tolerance = std::ldexp(1.0, -10);
  for (size_t t = 0; t < fed.trees.size(); ++t) {
    const auto& a = fed.trees[t].nodes();
    const auto& b = oracle.trees[t].nodes();
    if (fed.trees[t].output() != oracle.trees[t].output()) return "tree output differs";
    if (a.size() != b.size()) return "tree " + std::to_string(t) + " topology differs";
    for (size_t n = 0; n < a.size(); ++n) {
      if (a[n].leaf != b[n].leaf || a[n].left != b[n].left || a[n].right != b[n].right) {
        return "tree " + std::to_string(t) + " node " + std::to_string(n) + " topology differs";
      }
      if (!a[n].leaf && (a[n].feature != b[n].feature || a[n].threshold != b[n].threshold)) {
        return "tree " + std::to_string(t) + " node " + std::to_string(n) + " split differs";
      }
      if (a[n].leaf && std::fabs(a[n].weight - b[n].weight) > tolerance) {
        return "tree " + std::to_string(t) + " node " + std::to_string(n) + " weight off by " +
               std::to_string(std::fabs(a[n].weight - b[n].weight));
      }
    }
  }
  return "";
}

Outcome OracleEquivalence(Context& ctx) {
  const std::vector<OracleConfig> configs = {
      {DatasetKind::kSynthetic, 100, 5, 5, 1},   {DatasetKind::kSynthetic, 600, 20, 20, 1},
      {DatasetKind::kSynthetic, 1000, 8, 5, 3},  {DatasetKind::kSynthetic, 2000, 40, 20, 3},
      {DatasetKind::kAdult, 400, 0, 5, 1},       {DatasetKind::kAdult, 2000, 0, 20, 3},
  };
  Outcome out{true, ""};
  double slowest = 0;
  for (size_t i = 0; i < configs.size(); ++i) {
    const OracleConfig& c = configs[i];
    ExperimentSpec spec = AdultSubsample(ctx);
    spec.dataset = c.dataset;
    spec.train_size = c.instances;
    spec.test_size = 200;
    spec.synthetic_features = c.features;
    spec.run.users = c.users;
    spec.run.federation.edges = c.edges;
    spec.run.federation.boost.rounds = 10;
    spec.run.federation.boost.max_depth = 3;
    spec.run.federation.seed = 100 + i;
    spec.run.dropout.rate = 0.0;
    const RunInputs inputs = LoadExperimentData(spec);

    const auto start = Clock::now();
    const RunResult fed = Run(spec.run, inputs);
    const double elapsed = Seconds(start);
    slowest = std::max(slowest, elapsed);

    const FederationConfig& fc = spec.run.federation;
    const PrimeField field(fc.field_modulus);
    const FixedPointCodec codec(field, fc.fractional_bits);
    Dataset train = inputs.train;
    QuantizeFeatures(train, codec);
    PlaintextOptions opt;
    opt.loss = fc.loss;
    opt.seed = fc.seed;
    opt.quantize = &codec;
    const Model oracle = TrainPlaintext(
        train, CandidateSchema::Build(train, spec.run.max_candidates), fc.boost, opt);

    const std::string diff = CompareModels(fed.model, oracle);
    const std::string name = DatasetKindName(c.dataset) + "/" + std::to_string(c.instances) +
                             "x" + std::to_string(train.feature_count) + "/n" +
                             std::to_string(c.users) + "/e" + std::to_string(c.edges);
    if (!diff.empty()) {
      out.pass = false;
      out.detail += name + ": " + diff + "; ";
    }
    if (elapsed >= 120.0) {
      out.pass = false;
      out.detail += name + ": took " + Fixed(elapsed, 1) + " s; ";
    }
  }
  out.detail += std::to_string(configs.size()) + " configs, slowest " + Fixed(slowest, 1) + " s";
  return out;
}

// ---------------------------------------------------------------------------
// 2. Accuracy gap to the plaintext trainer on the ADULT subsample.

Outcome AccuracyGap(Context& ctx) {
  ExperimentSpec spec = AdultSubsample(ctx);
  spec.out_dir = ctx.scratch / "compare";
  const ComparisonReport report = CmdCompare(spec);
  if (!report.complete()) return {false, "run failed: " + report.failure};
  ctx.have_baseline = true;
  ctx.baseline_accuracy = AccuracyFromConfusion(report.federated_confusion);
  ctx.baseline_audit = report.metrics.audit;
  const double plain = AccuracyFromConfusion(report.plaintext_confusion);
  const double gap_pp = 100.0 * report.final_gap;
  return {gap_pp < 1.0, "federated " + Fixed(ctx.baseline_accuracy) + " plaintext " +
                            Fixed(plain) + " gap " + Fixed(gap_pp, 2) + " pp (limit 1 pp), " +
                            std::to_string(report.federated.size()) + " rounds"};
}

// ---------------------------------------------------------------------------
// 3. Dropout robustness with replacements.

Outcome DropoutRobustness(Context& ctx) {
  ExperimentSpec spec = AdultSubsample(ctx);
  const RunInputs inputs = LoadExperimentData(spec);
  if (!ctx.have_baseline) {
    const RunResult base = Run(spec.run, inputs);
    ctx.have_baseline = true;
    ctx.baseline_accuracy = base.metrics.rounds.back().accuracy;
  }
  Outcome out{true, "0%: " + Fixed(ctx.baseline_accuracy)};
  for (double rate : {0.1, 0.2, 0.3}) {
    RunConfig config = spec.run;
    config.dropout = {rate, 10, DropoutCase::kDuringSecFind};
    std::string label = std::to_string(static_cast<int>(std::lround(rate * 100))) + "%";
    try {
      const RunResult r = Run(config, inputs);
      size_t dropped = 0, replaced = 0;
      for (const auto& m : r.metrics.rounds) {
        dropped += m.dropped;
        replaced += m.replaced;
      }
      const double acc = r.metrics.rounds.back().accuracy;
      const double diff_pp = 100.0 * std::fabs(acc - ctx.baseline_accuracy);
      out.detail += ", " + label + ": " + Fixed(acc) + " (" + Fixed(diff_pp, 2) + " pp, " +
                    std::to_string(dropped) + " dropped, " + std::to_string(replaced) +
                    " replaced)";
      if (diff_pp >= 2.0 || dropped == 0) out.pass = false;
    } catch (const Error& e) {
      out.pass = false;
      out.detail += ", " + label + ": run failed: " + e.what();
    }
  }
  out.detail += " (limit 2 pp)";
  return out;
}

// ---------------------------------------------------------------------------
// 4. Shamir reconstruction.

template <typename Fn>
void ForEachSubset(uint32_t n, uint32_t k, Fn fn) {
  std::vector<uint32_t> idx(k);
  for (uint32_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (uint32_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool RefusesBelowThreshold(const ShamirScheme& scheme, std::span<const Share> shares,
                           uint32_t t) {
  try {
    scheme.Reconstruct(shares, t);
  } catch (const Error& e) {
    return e.code() == ErrorCode::kThreshold;
  }
  return false;
}

Outcome SecretSharing(Context&) {
  const auto start = Clock::now();
  const PrimeField field;
  const ShamirScheme scheme(field);
  Rng rng(4);
  uint64_t checked = 0, wrong = 0, accepted_below = 0;
  for (uint32_t n = 2; n <= 6; ++n) {
    std::vector<uint32_t> roster(n);
    for (uint32_t i = 0; i < n; ++i) roster[i] = i + 1;
    for (uint32_t t = 2; t <= n; ++t) {
      const FieldElement secret = field.Random(rng);
      const auto shares = scheme.Split(secret, t, roster, rng);
      ForEachSubset(n, t, [&](const std::vector<uint32_t>& idx) {
        std::vector<Share> pick;
        for (uint32_t i : idx) pick.push_back(shares[i]);
        ++checked;
        if (scheme.Reconstruct(pick, t) != secret) ++wrong;
      });
      ForEachSubset(n, t - 1, [&](const std::vector<uint32_t>& idx) {
        std::vector<Share> pick;
        for (uint32_t i : idx) pick.push_back(shares[i]);
        ++checked;
        if (!RefusesBelowThreshold(scheme, pick, t)) ++accepted_below;
      });
    }
  }
  std::vector<uint32_t> roster(30);
  for (uint32_t i = 0; i < 30; ++i) roster[i] = i + 1;
  for (int trial = 0; trial < 2000; ++trial) {
    const uint32_t t = 2 + static_cast<uint32_t>(rng.UniformBelow(29));
    const FieldElement secret = field.Random(rng);
    auto shares = scheme.Split(secret, t, roster, rng);
    rng.Shuffle(shares);
    ++checked;
    if (scheme.Reconstruct(std::span<const Share>(shares).first(t), t) != secret) ++wrong;
    ++checked;
    if (!RefusesBelowThreshold(scheme, std::span<const Share>(shares).first(t - 1), t)) {
      ++accepted_below;
    }
  }
  const double elapsed = Seconds(start);
  return {wrong == 0 && accepted_below == 0 && elapsed < 10.0,
          std::to_string(checked) + " reconstructions, " + std::to_string(wrong) + " wrong, " +
              std::to_string(accepted_below) + " below-threshold accepted, " +
              Fixed(elapsed, 2) + " s (limit 10 s)"};
}

// ---------------------------------------------------------------------------
// 5. Mask cancellation, with and without one dropout per domain.

Outcome MaskCancellation(Context&) {
  const auto start = Clock::now();
  const PublicParams params = KeySetup(256);
  const PrimeField field;
  const ShamirScheme scheme(field);
  Rng rng(5);
  int mismatches = 0, recovery_mismatches = 0, recoveries = 0;
  for (int config = 0; config < 1000; ++config) {
    const uint32_t n = 1 + static_cast<uint32_t>(rng.UniformBelow(30));
    const uint32_t t = DefaultUserThreshold(n);
    const uint64_t round = rng.UniformBelow(1000);
    const std::string tag = "level-" + std::to_string(config % 7);
    std::vector<uint32_t> roster(n);
    for (uint32_t i = 0; i < n; ++i) roster[i] = i + 1;
    std::map<uint32_t, MaskKeyring> rings;
    std::map<uint32_t, Bytes> publics;
    for (uint32_t u : roster) {
      rings[u].owner = u;
      rings[u].mask_key = KeyGen(params, KeyPurpose::kMask, rng);
      publics[u] = rings[u].mask_key.public_key;
    }
    // One agreement per unordered pair; both sides hold the same key.
    for (uint32_t u : roster) {
      for (uint32_t v = u + 1; v <= n; ++v) {
        const SharedKey key = KeyAgree(params, rings[u].mask_key.private_key, publics[v]);
        rings[u].pairwise_keys[v] = key;
        rings[v].pairwise_keys[u] = key;
      }
    }
    std::map<uint32_t, uint64_t> secret;
    std::map<uint32_t, FieldElement> self_mask;
    std::map<uint32_t, FieldElement> masked;
    for (uint32_t u : roster) {
      secret[u] = rng.UniformBelow(uint64_t{1} << 40);
      self_mask[u] = field.Random(rng);
      std::vector<PeerMask> peers;
      for (const auto& [v, key] : rings[u].pairwise_keys) {
        peers.push_back({v, DerivePairwiseMask(field, key, round, tag)});
      }
      masked[u] = SecMask(field, u, field.FromUint(secret[u]), self_mask[u], peers, roster);
    }
    // Independent oracle: the plain sum reduced with 128-bit arithmetic.
    unsigned __int128 plain = 0;
    for (const auto& [u, s] : secret) plain += s;
    const uint64_t expect = static_cast<uint64_t>(plain % field.modulus());
    if (UnmaskDomainAggregate(field, masked, self_mask).value != expect) ++mismatches;

    // One user drops after the others uploaded; survivors must be able to
    // reach the threshold, which needs n - 1 >= t.
    if (n < 2 || n - 1 < t) continue;
    const uint32_t dropped = roster[rng.UniformBelow(n)];
    const auto key_shares = ShareBytes(scheme, rings[dropped].mask_key.private_key, t, roster, rng);
    std::map<uint32_t, FieldElement> survivor_masked, survivor_self;
    std::map<uint32_t, std::vector<Share>> survivor_shares;
    std::map<uint32_t, Bytes> survivor_publics;
    unsigned __int128 survivor_plain = 0;
    for (uint32_t u : roster) {
      if (u == dropped) continue;
      survivor_masked[u] = masked[u];
      survivor_self[u] = self_mask[u];
      survivor_shares[u] = key_shares.at(u);
      survivor_publics[u] = publics[u];
      survivor_plain += secret[u];
    }
    FieldElement agg = UnmaskDomainAggregate(field, survivor_masked, survivor_self);
    agg = field.Add(agg, RecoverDropoutPairwise(params, scheme, dropped, survivor_shares, t,
                                                survivor_publics, round, tag));
    ++recoveries;
    if (agg.value != static_cast<uint64_t>(survivor_plain % field.modulus())) {
      ++recovery_mismatches;
    }
  }
  const double elapsed = Seconds(start);
  return {mismatches == 0 && recovery_mismatches == 0 && elapsed < 30.0,
          "1000 domains: " + std::to_string(mismatches) + " mismatches; " +
              std::to_string(recoveries) + " dropout recoveries: " +
              std::to_string(recovery_mismatches) + " mismatches; " + Fixed(elapsed, 2) +
              " s (limit 30 s)"};
}

// ---------------------------------------------------------------------------
// 6. Secure comparison contract.

Outcome SecureComparison(Context&) {
  const auto start = Clock::now();
  const PrimeField field;
  const FixedPointCodec codec(field);
  const ShamirScheme scheme(field);
  Rng rng(6);
  uint64_t checked = 0, wrong = 0, ties = 0;
  auto check = [&](double a, double b, uint32_t t, uint32_t parties) {
    // Compare the values the protocol actually sees: the fixed-point grid.
    const int64_t qa = codec.ToFixed(a), qb = codec.ToFixed(b);
    const bool expect = !(qa > qb);
    CmpRequest req{ShareValue(codec, a, t, parties, rng), ShareValue(codec, b, t, parties, rng), t};
    const bool got = CmpRecon(scheme, SecCmp(req, codec, rng), t);
    ++checked;
    ties += qa == qb;
    if (got != expect) ++wrong;
  };
  const double span = std::min(codec.range_bound(), 1e6);
  for (int i = 0; i < 10000; ++i) {
    const uint32_t t = 1 + static_cast<uint32_t>(rng.UniformBelow(3));
    const uint32_t parties = PartiesRequired(t) + static_cast<uint32_t>(rng.UniformBelow(2));
    double a = (2 * rng.UniformDouble() - 1) * span;
    double b = (2 * rng.UniformDouble() - 1) * span;
    switch (i % 4) {
      case 1: b = a; break;                                    // exact tie
      case 2: b = a + codec.resolution(); break;               // one grid step apart
      case 3: a *= 1e-4; b *= 1e-4; break;                     // small magnitudes
      default: break;
    }
    check(a, b, t, parties);
  }
  std::vector<double> grid;
  for (int k = -8; k <= 8; ++k) grid.push_back(k * 0.25);
  grid.push_back(codec.resolution());
  grid.push_back(-codec.resolution());
  for (double a : grid) {
    for (double b : grid) check(a, b, 2, 3);
  }
  const double elapsed = Seconds(start);
  return {wrong == 0 && elapsed < 10.0,
          std::to_string(checked) + " comparisons (" + std::to_string(ties) + " ties), " +
              std::to_string(wrong) + " disagreements, " + Fixed(elapsed, 2) +
              " s (limit 10 s)"};
}

// ---------------------------------------------------------------------------
// 7. Analytic gradients against central finite differences.

bool Close(double analytic, double numeric, double& worst) {
  const double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-6});
  const double rel = std::fabs(analytic - numeric) / scale;
  worst = std::max(worst, rel);
  return rel <= 1e-5;
}

Outcome GradientChecks(Context&) {
  const auto start = Clock::now();
  Rng rng(7);
  int failures = 0;
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double m = (2 * rng.UniformDouble() - 1) * 8;
    const double y = static_cast<double>(rng.UniformBelow(2));
    const double e = 1e-5;
    const double g_num = (LogisticLoss(m + e, y) - LogisticLoss(m - e, y)) / (2 * e);
    const double h_num =
        (LogisticGradient(m + e, y).g - LogisticGradient(m - e, y).g) / (2 * e);
    const GradientPair gp = LogisticGradient(m, y);
    failures += !Close(gp.g, g_num, worst);
    failures += !Close(gp.h, h_num, worst);
  }
  for (int i = 0; i < 1000; ++i) {
    const int classes = 2 + static_cast<int>(rng.UniformBelow(9));
    std::vector<double> z(classes);
    for (auto& v : z) v = (2 * rng.UniformDouble() - 1) * 5;
    const int label = static_cast<int>(rng.UniformBelow(classes));
    const auto grads = SoftmaxGradients(z, label);
    const int k = static_cast<int>(rng.UniformBelow(classes));
    const double e = 1e-5;
    auto shifted = [&](double d) {
      std::vector<double> w = z;
      w[k] += d;
      return w;
    };
    const double g_num = (SoftmaxLoss(shifted(e), label) - SoftmaxLoss(shifted(-e), label)) / (2 * e);
    const double h_num =
        (SoftmaxGradients(shifted(e), label)[k].g - SoftmaxGradients(shifted(-e), label)[k].g) /
        (2 * e);
    failures += !Close(grads[k].g, g_num, worst);
    failures += !Close(grads[k].h, h_num, worst);
  }
  const double elapsed = Seconds(start);
  return {failures == 0 && elapsed < 5.0,
          "2000 points, " + std::to_string(failures) + " outside tolerance, worst relative " +
              "error " + std::to_string(worst) + ", " + Fixed(elapsed, 2) + " s (limit 5 s)"};
}

// ---------------------------------------------------------------------------
// 8. Cost shape over the swept grid.

std::string Series(const std::vector<SweepPoint>& points, double SweepPoint::*field) {
  std::string s;
  for (const auto& p : points) {
    if (!s.empty()) s += " ";
    s += std::to_string(static_cast<long long>(p.value)) + ":" +
         (p.ok ? std::to_string(static_cast<long long>(std::llround(p.*field))) : "failed");
  }
  return s;
}

bool NonIncreasing(const std::vector<SweepPoint>& points, double SweepPoint::*field) {
  for (size_t i = 0; i < points.size(); ++i) {
    if (!points[i].ok) return false;
    if (i > 0 && points[i].*field > points[i - 1].*field) return false;
  }
  return true;
}

Outcome CostShape(Context& ctx) {
  // Full ADULT training set, default 300 users and 10 edges, three rounds.
  ExperimentSpec spec = AdultSubsample(ctx);
  spec.train_size = 0;
  spec.test_size = 1000;
  spec.run.federation.boost.rounds = 3;
  spec.sweep_users = {60, 120, 180, 240, 300};
  spec.sweep_edges = {2, 4, 6, 8, 10};
  spec.out_dir = ctx.scratch / "sweep";
  const auto users = CmdSweep(spec, SweepAxis::kUsers);
  const auto edges = CmdSweep(spec, SweepAxis::kEdges);
  const bool users_ok = NonIncreasing(users, &SweepPoint::per_user_bytes);
  const bool edges_ok = NonIncreasing(edges, &SweepPoint::per_edge_us);
  return {users_ok && edges_ok,
          std::string("per-user bytes vs users [") + (users_ok ? "ok" : "not monotone") + "] " +
              Series(users, &SweepPoint::per_user_bytes) + "; per-edge us vs edges [" +
              (edges_ok ? "ok" : "not monotone") + "] " +
              Series(edges, &SweepPoint::per_edge_us)};
}

// ---------------------------------------------------------------------------
// 9. Determinism.

Outcome Determinism(Context& ctx) {
  ExperimentSpec spec = AdultSubsample(ctx);
  spec.run.users = 30;
  spec.run.federation.edges = 3;
  spec.run.federation.boost.rounds = 10;
  spec.run.dropout = {0.2, 5, DropoutCase::kDuringSecFind};
  std::vector<std::string> hashes;
  for (const char* name : {"a", "b"}) {
    spec.out_dir = ctx.scratch / "determinism" / name;
    hashes.push_back(CmdTrain(spec).metrics.transcript_hash);
  }
  const fs::path a = ctx.scratch / "determinism" / "a";
  const fs::path b = ctx.scratch / "determinism" / "b";
  std::string detail;
  bool pass = hashes[0] == hashes[1];
  for (const char* file : {"rounds.csv", "stages.csv", "model.json"}) {
    const bool same = Slurp(a / file) == Slurp(b / file) && !Slurp(a / file).empty();
    pass &= same;
    detail += std::string(file) + (same ? " identical, " : " DIFFERS, ");
  }
  detail += "transcript " + hashes[0].substr(0, 16) + (hashes[0] == hashes[1] ? " identical" : " DIFFERS");
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 10. Privacy structure of the transcript.

bool IsRaw(PayloadClass c) {
  return c == PayloadClass::kRawGradient || c == PayloadClass::kRawThreshold;
}

bool IsProtected(PayloadClass c) {
  return c == PayloadClass::kShare || c == PayloadClass::kMaskedValue ||
         c == PayloadClass::kCiphertext;
}

Outcome PrivacyStructure(Context& ctx) {
  // Independent observer over a run with every dropout case.
  ExperimentSpec spec = AdultSubsample(ctx);
  spec.run.users = 30;
  spec.run.federation.edges = 3;
  spec.run.federation.boost.rounds = 6;
  const RunInputs inputs = LoadExperimentData(spec);
  const FederationConfig& fc = spec.run.federation;
  const PrimeField field(fc.field_modulus);
  const FixedPointCodec codec(field, fc.fractional_bits);
  Dataset train = inputs.train;
  QuantizeFeatures(train, codec);
  Federation fed(fc, CandidateSchema::Build(train, spec.run.max_candidates), train.feature_count,
                 train.class_count, spec.run.cost);

  uint64_t raw = 0, upstream = 0, protected_count = 0, key_adverts = 0, other = 0;
  std::map<std::string, uint64_t> offenders;
  fed.bus().SetObserver([&](const Envelope& e) {
    if (IsRaw(e.payload_class) || IsRaw(e.inner_class)) ++raw;
    const bool user_to_edge = e.sender.role == Role::kUser && e.receiver.role == Role::kEdge;
    const bool edge_to_central = e.sender.role == Role::kEdge && e.receiver.role == Role::kCentral;
    if (!user_to_edge && !edge_to_central) return;
    ++upstream;
    if (IsProtected(e.payload_class)) {
      ++protected_count;
    } else if (e.payload_class == PayloadClass::kPublicKey &&
               e.kind == MessageKind::kKeyAdvertise) {
      ++key_adverts;  // public keys and a signature, no private data
    } else {
      ++other;
      ++offenders[std::string(MessageKindName(e.kind)) + "/" +
                  std::string(PayloadClassName(e.payload_class))];
    }
  });
  const auto parts = Partition(train.size(), spec.run.users, fc.seed);
  for (uint32_t u = 0; u < spec.run.users; ++u) {
    fed.AddUser(u % fc.edges + 1, train.Subset(parts[u]));
  }
  fed.SetupRun();
  const DropoutCase cases[] = {DropoutCase::kBeforeUpload, DropoutCase::kDuringSecFind,
                               DropoutCase::kDuringSecPred};
  for (int k = 0; k < fc.boost.rounds; ++k) {
    std::map<ParticipantId, DropoutCase> drops;
    if (k % 2 == 1) {
      const auto live = fed.live_users();
      drops[live[k % live.size()]] = cases[(k / 2) % 3];
    }
    if (!fed.TrainRound(k, drops).completed) return {false, "round failed"};
  }

  bool pass = raw == 0 && other == 0;
  std::string detail = std::to_string(upstream) + " upstream messages: " +
                       std::to_string(protected_count) + " share/masked/ciphertext, " +
                       std::to_string(key_adverts) + " public-key adverts, " +
                       std::to_string(other) + " other; " + std::to_string(raw) +
                       " raw payloads anywhere";
  for (const auto& [what, n] : offenders) detail += "; " + what + " x" + std::to_string(n);
  if (ctx.have_baseline) {
    pass &= ctx.baseline_audit.clean();
    detail += "; criterion-2 run audit " + std::string(ctx.baseline_audit.clean() ? "clean" : "NOT clean");
  }
  return {pass, detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome(Context&)> run;
};

}  // namespace
}  // namespace fedgbt

int main(int argc, char** argv) {
  using namespace fedgbt;
  CLI::App app("fedgbt acceptance checks");
  std::string data_dir = "data";
  std::vector<int> only;
  app.add_option("--data-dir", data_dir, "directory holding adult/");
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  Context ctx;
  ctx.data_dir = data_dir;
  ctx.scratch = fs::temp_directory_path() / "fedgbt_acceptance";
  fs::remove_all(ctx.scratch);
  fs::create_directories(ctx.scratch);

  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence", OracleEquivalence},
      {2, "accuracy gap", AccuracyGap},
      {3, "dropout robustness", DropoutRobustness},
      {4, "secret sharing", SecretSharing},
      {5, "mask cancellation", MaskCancellation},
      {6, "secure comparison", SecureComparison},
      {7, "gradient checks", GradientChecks},
      {8, "cost shape", CostShape},
      {9, "determinism", Determinism},
      {10, "privacy structure", PrivacyStructure},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("AC%-2d %s  %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), Seconds(start));
    std::fflush(stdout);
  }
  fs::remove_all(ctx.scratch);
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
