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

#include "fedgbt/masking.h"

#include <gtest/gtest.h>

#include "fedgbt/error.h"
#include "test_util.h"

namespace fedgbt {
namespace {

using testing::Roster;

const PublicParams& Params() {
  static const PublicParams params = KeySetup(256);
  return params;
}

// A domain of n users with mask keys, pairwise keys and shares of every
// private mask key at threshold t.
struct Domain {
  PrimeField field;
  ShamirScheme scheme{field};
  std::vector<uint32_t> roster;
  std::map<uint32_t, MaskKeyring> rings;
  uint32_t t;

  Domain(uint32_t n, uint32_t threshold, Rng& rng) : roster(Roster(n)), t(threshold) {
    std::map<uint32_t, Bytes> publics;
    for (uint32_t u : roster) {
      rings[u].owner = u;
      rings[u].mask_key = KeyGen(Params(), KeyPurpose::kMask, rng);
      publics[u] = rings[u].mask_key.public_key;
    }
    for (uint32_t u : roster) {
      std::map<uint32_t, Bytes> peers = publics;
      peers.erase(u);
      rings[u].AgreeWithPeers(Params(), peers);
      rings[u].mask_key_shares_out = ShareBytes(scheme, rings[u].mask_key.private_key, t, roster, rng);
    }
  }

  std::vector<PeerMask> Masks(uint32_t u, uint64_t round, const std::string& tag) const {
    std::vector<PeerMask> out;
    for (const auto& [v, key] : rings.at(u).pairwise_keys) {
      out.push_back({v, DerivePairwiseMask(field, key, round, tag)});
    }
    return out;
  }

  std::map<uint32_t, std::vector<Share>> SharesOf(uint32_t owner,
                                                  const std::vector<uint32_t>& holders) const {
    std::map<uint32_t, std::vector<Share>> out;
    for (uint32_t h : holders) out[h] = rings.at(owner).mask_key_shares_out.at(h);
    return out;
  }
};

TEST(PairwiseMaskTest, DeterministicAndSymmetric) {
  Rng rng(1);
  Domain d(2, 2, rng);
  const auto& k12 = d.rings[1].pairwise_keys.at(2);
  const auto& k21 = d.rings[2].pairwise_keys.at(1);
  EXPECT_EQ(k12, k21);
  EXPECT_EQ(DerivePairwiseMask(d.field, k12, 3, "g"), DerivePairwiseMask(d.field, k21, 3, "g"));
  EXPECT_NE(DerivePairwiseMask(d.field, k12, 3, "g"), DerivePairwiseMask(d.field, k12, 4, "g"));
  EXPECT_NE(DerivePairwiseMask(d.field, k12, 3, "g"), DerivePairwiseMask(d.field, k12, 3, "h"));
}

TEST(PairwiseMaskTest, UniformOverBuckets) {
  const PrimeField f;
  SharedKey key;
  key.bytes[0] = 7;
  constexpr int kBuckets = 32;
  constexpr int kDraws = 100000;
  std::vector<int> counts(kBuckets, 0);
  for (int i = 0; i < kDraws; ++i) {
    const FieldElement m = DerivePairwiseMask(f, key, static_cast<uint64_t>(i), "u");
    ++counts[static_cast<size_t>(static_cast<unsigned __int128>(m.value) * kBuckets / f.modulus())];
  }
  double chi2 = 0;
  const double e = static_cast<double>(kDraws) / kBuckets;
  for (int c : counts) chi2 += (c - e) * (c - e) / e;
  // 31 degrees of freedom; 61.1 is the 0.999 quantile.
  EXPECT_LT(chi2, 61.1);
}

TEST(SecMaskTest, SingleUserIsSecretPlusSelfMask) {
  const PrimeField f;
  const std::vector<uint32_t> roster = {1};
  EXPECT_EQ(SecMask(f, 1, f.FromUint(10), f.FromUint(5), {}, roster).value, 15u);
}

TEST(SecMaskTest, TwoUsersPairwiseTermsCancel) {
  Rng rng(2);
  Domain d(2, 2, rng);
  const auto s1 = d.field.FromUint(100), s2 = d.field.FromUint(23);
  const auto r1 = d.field.Random(rng), r2 = d.field.Random(rng);
  const auto m1 = SecMask(d.field, 1, s1, r1, d.Masks(1, 0, "x"), d.roster);
  const auto m2 = SecMask(d.field, 2, s2, r2, d.Masks(2, 0, "x"), d.roster);
  const auto expect = d.field.Add(d.field.Add(s1, s2), d.field.Add(r1, r2));
  EXPECT_EQ(d.field.Add(m1, m2), expect);
}

TEST(SecMaskTest, ThirtyUserDomainUnmasksToPlainSum) {
  Rng rng(3);
  Domain d(30, 16, rng);
  std::map<uint32_t, FieldElement> masked, selfs;
  uint64_t plain = 0;
  for (uint32_t u : d.roster) {
    const uint64_t s = rng.UniformBelow(1u << 30);
    plain += s;
    selfs[u] = d.field.Random(rng);
    masked[u] = SecMask(d.field, u, d.field.FromUint(s), selfs[u], d.Masks(u, 9, "H"), d.roster);
  }
  EXPECT_EQ(UnmaskDomainAggregate(d.field, masked, selfs).value, plain % d.field.modulus());
}

TEST(SecMaskTest, PeerSetMismatchIsRosterError) {
  Rng rng(4);
  Domain d(3, 2, rng);
  auto masks = d.Masks(1, 0, "x");
  masks.pop_back();
  try {
    SecMask(d.field, 1, FieldElement{1}, FieldElement{2}, masks, d.roster);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRoster);
  }
}

TEST(SelfMaskTest, AnyTSubsetRecovers) {
  const PrimeField f;
  const ShamirScheme scheme(f);
  Rng rng(5);
  const FieldElement r = f.Random(rng);
  const auto shares = ShareSelfMask(scheme, r, 3, Roster(6), rng);
  testing::ForEachSubset(6, 3, [&](const std::vector<uint32_t>& idx) {
    std::vector<Share> pick;
    for (uint32_t i : idx) pick.push_back(shares[i]);
    EXPECT_EQ(scheme.Reconstruct(pick, 3), r);
  });
  std::vector<Share> two(shares.begin(), shares.begin() + 2);
  EXPECT_THROW(scheme.Reconstruct(two, 3), Error);
}

TEST(UnmaskTest, MissingSelfMaskIsIncompleteRound) {
  const PrimeField f;
  std::map<uint32_t, FieldElement> masked = {{1, {5}}, {2, {6}}};
  std::map<uint32_t, FieldElement> selfs = {{1, {1}}};
  try {
    UnmaskDomainAggregate(f, masked, selfs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompleteRound);
  }
  EXPECT_EQ(UnmaskDomainAggregate(f, {}, {}).value, 0u);
}

TEST(DropoutRecoveryTest, ThirtyPercentOfTenWithThresholdFive) {
  Rng rng(6);
  Domain d(10, 5, rng);
  const std::vector<uint32_t> dropped = {2, 5, 9};
  std::vector<uint32_t> survivors;
  for (uint32_t u : d.roster) {
    if (std::find(dropped.begin(), dropped.end(), u) == dropped.end()) survivors.push_back(u);
  }
  std::map<uint32_t, FieldElement> masked, selfs;
  uint64_t plain = 0;
  for (uint32_t u : survivors) {
    const uint64_t s = rng.UniformBelow(1000000);
    plain += s;
    selfs[u] = d.field.Random(rng);
    masked[u] = SecMask(d.field, u, d.field.FromUint(s), selfs[u], d.Masks(u, 1, "G"), d.roster);
  }
  FieldElement agg = UnmaskDomainAggregate(d.field, masked, selfs);
  EXPECT_NE(agg.value, plain);
  std::map<uint32_t, Bytes> publics;
  for (uint32_t v : survivors) publics[v] = d.rings[v].mask_key.public_key;
  for (uint32_t u : dropped) {
    agg = d.field.Add(agg, RecoverDropoutPairwise(Params(), d.scheme, u, d.SharesOf(u, survivors),
                                                  d.t, publics, 1, "G"));
  }
  EXPECT_EQ(agg.value, plain);
}

TEST(DropoutRecoveryTest, TooFewSurvivorsIsThresholdError) {
  Rng rng(7);
  Domain d(6, 4, rng);
  std::map<uint32_t, Bytes> publics = {{1, d.rings[1].mask_key.public_key}};
  try {
    RecoverDropoutPairwise(Params(), d.scheme, 6, d.SharesOf(6, {1, 2, 3}), d.t, publics, 0, "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kThreshold);
  }
}

TEST(VectorMaskTest, VectorAggregateWithDropout) {
  Rng rng(8);
  Domain d(6, 3, rng);
  constexpr size_t kWidth = 40;
  const std::vector<uint32_t> survivors = {1, 3, 4, 6};
  std::map<uint32_t, std::vector<FieldElement>> masked;
  std::map<uint32_t, Seed> seeds;
  std::vector<uint64_t> plain(kWidth, 0);
  for (uint32_t u : survivors) {
    std::vector<FieldElement> secrets(kWidth);
    for (size_t i = 0; i < kWidth; ++i) {
      const uint64_t s = rng.UniformBelow(1u << 20);
      secrets[i] = d.field.FromUint(s);
      plain[i] += s;
    }
    for (auto& b : seeds[u]) b = static_cast<uint8_t>(rng.UniformBelow(256));
    masked[u] = SecMaskVector(d.field, u, secrets, seeds[u], d.rings[u].pairwise_keys, d.roster,
                              4, "lvl");
  }
  auto agg = UnmaskDomainAggregateVector(d.field, masked, seeds);
  std::map<uint32_t, Bytes> publics;
  for (uint32_t v : survivors) publics[v] = d.rings[v].mask_key.public_key;
  for (uint32_t u : {2u, 5u}) {
    const auto c = RecoverDropoutPairwiseVector(Params(), d.scheme, u, d.SharesOf(u, survivors),
                                                d.t, publics, 4, "lvl", kWidth);
    for (size_t i = 0; i < kWidth; ++i) agg[i] = d.field.Add(agg[i], c[i]);
  }
  for (size_t i = 0; i < kWidth; ++i) EXPECT_EQ(agg[i].value, plain[i]);
}

TEST(VectorMaskTest, ExpansionIsFreshPerRoundAndTag) {
  Rng rng(9);
  Domain d(2, 2, rng);
  const auto& key = d.rings[1].pairwise_keys.at(2);
  EXPECT_NE(PairwiseMaskSeed(key, 1, "a"), PairwiseMaskSeed(key, 2, "a"));
  EXPECT_NE(PairwiseMaskSeed(key, 1, "a"), PairwiseMaskSeed(key, 1, "b"));
  const auto e = ExpandSeed(d.field, PairwiseMaskSeed(key, 1, "a"), 100);
  for (const auto& x : e) EXPECT_LT(x.value, d.field.modulus());
}

TEST(ShareBytesTest, RoundTripFromAnyThreshold) {
  const PrimeField f;
  const ShamirScheme scheme(f);
  Rng rng(10);
  Bytes secret(32);
  for (auto& b : secret) b = static_cast<uint8_t>(rng.UniformBelow(256));
  const auto shares = ShareBytes(scheme, secret, 3, Roster(5), rng);
  std::map<uint32_t, std::vector<Share>> pick = {{2, shares.at(2)}, {4, shares.at(4)}, {5, shares.at(5)}};
  EXPECT_EQ(RecoverBytes(scheme, pick, 3, 32), secret);
  pick.erase(5);
  EXPECT_THROW(RecoverBytes(scheme, pick, 3, 32), Error);
}

}  // namespace
}  // namespace fedgbt
