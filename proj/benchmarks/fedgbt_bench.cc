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

// Microbenchmarks for the primitives the cost model charges for. Each
// benchmark reports items_per_second in the unit the model uses, so
// 1e6 / items_per_second is the per-unit weight in microseconds;
// tools/calibrate_costs.py does that conversion.

#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "fedgbt/bus.h"
#include "fedgbt/crypto_suite.h"
#include "fedgbt/finite_field.h"
#include "fedgbt/masking.h"
#include "fedgbt/random.h"
#include "fedgbt/seccmp.h"

namespace fedgbt {
namespace {

const PublicParams& Params() {
  static const PublicParams params = KeySetup(256);
  return params;
}

std::vector<uint32_t> Roster(uint32_t n) {
  std::vector<uint32_t> r(n);
  std::iota(r.begin(), r.end(), 1u);
  return r;
}

void BM_KeyGen(benchmark::State& state) {
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(KeyGen(Params(), KeyPurpose::kMask, rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_KeyGen);

void BM_KeyAgree(benchmark::State& state) {
  Rng rng(2);
  const KeyPair a = KeyGen(Params(), KeyPurpose::kMask, rng);
  const KeyPair b = KeyGen(Params(), KeyPurpose::kMask, rng);
  for (auto _ : state) benchmark::DoNotOptimize(KeyAgree(Params(), a.private_key, b.public_key));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_KeyAgree);

void BM_Sign(benchmark::State& state) {
  Rng rng(3);
  const KeyPair key = KeyGen(Params(), KeyPurpose::kSign, rng);
  const Bytes message(160, 7);
  for (auto _ : state) benchmark::DoNotOptimize(Sign(key, message));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Sign);

void BM_Verify(benchmark::State& state) {
  Rng rng(4);
  const KeyPair key = KeyGen(Params(), KeyPurpose::kSign, rng);
  const Bytes message(160, 7);
  const Bytes sig = Sign(key, message);
  for (auto _ : state) benchmark::DoNotOptimize(Verify(key.public_key, message, sig));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Verify);

// Per-call cost is the 0-byte point; per-byte cost is the slope.
void BM_AeadEncrypt(benchmark::State& state) {
  Rng rng(5);
  SharedKey key;
  key.bytes.fill(9);
  const Bytes plain(static_cast<size_t>(state.range(0)), 1);
  const Bytes context(40, 2);
  for (auto _ : state) benchmark::DoNotOptimize(AeadEncrypt(key, plain, context, rng));
  state.SetItemsProcessed(state.iterations());
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AeadEncrypt)->Arg(0)->Arg(16384);

// Units: secrets * holders * t.
void BM_ShareTerm(benchmark::State& state) {
  const PrimeField field;
  const ShamirScheme scheme(field);
  Rng rng(6);
  const uint32_t n = 30, t = 16;
  std::vector<FieldElement> secrets(256);
  for (auto& s : secrets) s = field.FromUint(rng.NextU64());
  const auto roster = Roster(n);
  for (auto _ : state) benchmark::DoNotOptimize(scheme.SplitBatch(secrets, t, roster, rng));
  state.SetItemsProcessed(state.iterations() * secrets.size() * n * t);
}
BENCHMARK(BM_ShareTerm);

// Units: m * t + t * t for m secrets reconstructed from t holders.
void BM_LagrangeTerm(benchmark::State& state) {
  const PrimeField field;
  const ShamirScheme scheme(field);
  const uint32_t t = 16;
  const size_t m = 256;
  Rng rng(7);
  const auto points = Roster(t);
  std::vector<std::vector<FieldElement>> values(t, std::vector<FieldElement>(m));
  for (auto& row : values) {
    for (auto& v : row) v = field.FromUint(rng.NextU64());
  }
  for (auto _ : state) {
    const auto basis = scheme.LagrangeAtZero(points);
    std::vector<FieldElement> out(m);
    for (uint32_t h = 0; h < t; ++h) {
      for (size_t i = 0; i < m; ++i) out[i] = field.Add(out[i], field.Mul(basis[h], values[h][i]));
    }
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * (m * t + t * t));
}
BENCHMARK(BM_LagrangeTerm);

void BM_PrgWord(benchmark::State& state) {
  const PrimeField field;
  Seed seed{};
  seed[0] = 1;
  std::vector<FieldElement> acc(4096);
  for (auto _ : state) {
    AccumulateExpansion(field, seed, 1, acc);
    benchmark::DoNotOptimize(acc.data());
  }
  state.SetItemsProcessed(state.iterations() * acc.size());
}
BENCHMARK(BM_PrgWord);

void BM_FieldOp(benchmark::State& state) {
  const PrimeField field;
  Rng rng(8);
  std::vector<FieldElement> a(4096), b(4096);
  for (size_t i = 0; i < a.size(); ++i) {
    a[i] = field.FromUint(rng.NextU64());
    b[i] = field.FromUint(rng.NextU64());
  }
  for (auto _ : state) {
    for (size_t i = 0; i < a.size(); ++i) a[i] = field.Add(field.Mul(a[i], b[i]), b[i]);
    benchmark::DoNotOptimize(a.data());
  }
  state.SetItemsProcessed(state.iterations() * a.size() * 2);
}
BENCHMARK(BM_FieldOp);

// Send plus delivery through the bus, including transcript hashing. Per
// message cost is the 0-byte point; per-byte cost is the slope.
void BM_Message(benchmark::State& state) {
  MessageBus bus;
  const ParticipantId a = ParticipantId::User(1, 1), b = ParticipantId::Edge(1);
  bus.Register(a, [](const Envelope&) {});
  bus.Register(b, [](const Envelope& e) { benchmark::DoNotOptimize(e.payload.data()); });
  const Bytes payload(static_cast<size_t>(state.range(0)), 3);
  for (auto _ : state) {
    Envelope e;
    e.sender = a;
    e.receiver = b;
    e.payload = payload;
    bus.Send(std::move(e));
    bus.DeliverAll();
  }
  state.SetItemsProcessed(state.iterations());
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Message)->Arg(0)->Arg(16384);

// End-to-end comparison among 2t-1 parties, for context.
void BM_SecCmp(benchmark::State& state) {
  const PrimeField field;
  const FixedPointCodec codec(field);
  Rng rng(9);
  const uint32_t t = static_cast<uint32_t>(state.range(0));
  const uint32_t n = PartiesRequired(t);
  CmpRequest req{ShareValue(codec, 0.25, t, n, rng), ShareValue(codec, 0.5, t, n, rng), t};
  for (auto _ : state) benchmark::DoNotOptimize(SecCmp(req, codec, rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SecCmp)->Arg(1)->Arg(2)->Arg(5);

}  // namespace
}  // namespace fedgbt

BENCHMARK_MAIN();
