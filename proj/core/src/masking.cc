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

#include <algorithm>
#include <bit>
#include <set>

#include "fedgbt/error.h"

namespace fedgbt {
namespace {

constexpr size_t kPrivateKeyBytes = 32;

Bytes MaskPreimage(const SharedKey& key, uint64_t round, std::string_view tag) {
  Bytes buf(key.bytes.begin(), key.bytes.end());
  for (int i = 7; i >= 0; --i) buf.push_back(static_cast<uint8_t>(round >> (8 * i)));
  buf.insert(buf.end(), tag.begin(), tag.end());
  return buf;
}

void CheckPeersCoverRoster(uint32_t owner, std::span<const uint32_t> peers,
                           std::span<const uint32_t> roster) {
  std::set<uint32_t> expected(roster.begin(), roster.end());
  if (expected.erase(owner) != 1) {
    throw Error(ErrorCode::kRoster, "owner " + std::to_string(owner) + " not in roster");
  }
  std::set<uint32_t> seen;
  for (uint32_t v : peers) {
    if (!seen.insert(v).second || !expected.contains(v)) {
      throw Error(ErrorCode::kRoster, "peer " + std::to_string(v) + " not a roster peer");
    }
  }
  if (seen.size() != expected.size()) {
    throw Error(ErrorCode::kRoster, "peer masks do not cover the roster");
  }
}

// Pairwise terms `owner` contributes, given the private key it masked with.
template <typename Fn>
void ForEachPeerKey(const PublicParams& params, std::span<const uint8_t> private_key,
                    const std::map<uint32_t, Bytes>& publics, Fn fn) {
  for (const auto& [peer, pub] : publics) fn(peer, KeyAgree(params, private_key, pub));
}

}  // namespace

FieldElement DerivePairwiseMask(const PrimeField& field, const SharedKey& key,
                                uint64_t round, std::string_view tag) {
  auto digest = Sha256(MaskPreimage(key, round, tag));
  // Horner over the 32 bytes; the 256-bit value mod p is uniform up to 2^-190.
  FieldElement acc{0};
  const FieldElement base = field.FromUint(256);
  for (uint8_t b : digest) acc = field.Add(field.Mul(acc, base), field.FromUint(b));
  return acc;
}

Seed PairwiseMaskSeed(const SharedKey& key, uint64_t round, std::string_view tag) {
  Bytes pre = MaskPreimage(key, round, tag);
  pre.push_back('#');
  return Sha256(pre);
}

std::vector<FieldElement> ExpandSeed(const PrimeField& field, const Seed& seed,
                                     size_t count) {
  std::vector<FieldElement> out(count);
  AccumulateExpansion(field, seed, +1, out);
  return out;
}

void AccumulateExpansion(const PrimeField& field, const Seed& seed, int sign,
                         std::span<FieldElement> acc) {
  StreamCipherPrg prg(seed);
  const uint64_t p = field.modulus();
  const int width = std::bit_width(p);
  const uint64_t bits_mask = width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
  std::vector<uint64_t> words(std::min<size_t>(acc.size() + 8, 4096));
  size_t pos = words.size();
  for (auto& slot : acc) {
    uint64_t w;
    do {
      if (pos == words.size()) {
        prg.Fill(words);
        pos = 0;
      }
      w = words[pos++] & bits_mask;
    } while (w >= p);
    slot = sign > 0 ? field.Add(slot, FieldElement{w}) : field.Sub(slot, FieldElement{w});
  }
}

FieldElement SecMask(const PrimeField& field, uint32_t owner, FieldElement secret,
                     FieldElement self_mask, std::span<const PeerMask> peers,
                     std::span<const uint32_t> roster) {
  std::vector<uint32_t> ids;
  ids.reserve(peers.size());
  for (const auto& pm : peers) ids.push_back(pm.peer);
  CheckPeersCoverRoster(owner, ids, roster);
  FieldElement out = field.Add(secret, self_mask);
  for (const auto& pm : peers) {
    out = pm.peer < owner ? field.Add(out, pm.mask) : field.Sub(out, pm.mask);
  }
  return out;
}

std::vector<FieldElement> SecMaskVector(const PrimeField& field, uint32_t owner,
                                        std::span<const FieldElement> secrets,
                                        const Seed& self_seed,
                                        const std::map<uint32_t, SharedKey>& peer_keys,
                                        std::span<const uint32_t> roster, uint64_t round,
                                        std::string_view tag) {
  std::vector<uint32_t> ids;
  for (const auto& [peer, key] : peer_keys) ids.push_back(peer);
  CheckPeersCoverRoster(owner, ids, roster);
  std::vector<FieldElement> out(secrets.begin(), secrets.end());
  AccumulateExpansion(field, self_seed, +1, out);
  for (const auto& [peer, key] : peer_keys) {
    AccumulateExpansion(field, PairwiseMaskSeed(key, round, tag), peer < owner ? +1 : -1, out);
  }
  return out;
}

void MaskKeyring::AgreeWithPeers(const PublicParams& params,
                                 const std::map<uint32_t, Bytes>& peer_publics) {
  pairwise_keys.clear();
  for (const auto& [peer, pub] : peer_publics) {
    if (peer == owner) continue;
    pairwise_keys[peer] = KeyAgree(params, mask_key.private_key, pub);
  }
}

std::vector<Share> ShareSelfMask(const ShamirScheme& scheme, FieldElement self_mask,
                                 uint32_t t, std::span<const uint32_t> roster, Rng& rng) {
  return scheme.Split(self_mask, t, roster, rng);
}

std::map<uint32_t, std::vector<Share>> ShareBytes(const ShamirScheme& scheme,
                                                  std::span<const uint8_t> secret,
                                                  uint32_t t,
                                                  std::span<const uint32_t> roster,
                                                  Rng& rng) {
  auto limbs = BytesToLimbs(scheme.field(), secret);
  auto batch = scheme.SplitBatch(limbs, t, roster, rng);
  std::map<uint32_t, std::vector<Share>> out;
  for (size_t h = 0; h < roster.size(); ++h) {
    auto& shares = out[roster[h]];
    for (const auto& v : batch[h]) shares.push_back({roster[h], v});
  }
  return out;
}

Bytes RecoverBytes(const ShamirScheme& scheme,
                   const std::map<uint32_t, std::vector<Share>>& holder_shares,
                   uint32_t t, size_t byte_count) {
  if (t == 0 || holder_shares.size() < t) {
    throw Error(ErrorCode::kThreshold, "need " + std::to_string(t) + " holders, have " +
                                           std::to_string(holder_shares.size()));
  }
  const size_t limb_count = holder_shares.begin()->second.size();
  std::vector<uint32_t> points;
  for (const auto& [holder, shares] : holder_shares) {
    if (shares.size() != limb_count) {
      throw Error(ErrorCode::kAggregationConsistency, "holders disagree on limb count");
    }
    points.push_back(holder);
    if (points.size() == t) break;
  }
  auto basis = scheme.LagrangeAtZero(points);
  const PrimeField& field = scheme.field();
  std::vector<FieldElement> limbs(limb_count);
  for (size_t i = 0; i < t; ++i) {
    const auto& shares = holder_shares.at(points[i]);
    for (size_t l = 0; l < limb_count; ++l) {
      limbs[l] = field.Add(limbs[l], field.Mul(basis[i], shares[l].value));
    }
  }
  return LimbsToBytes(field, limbs, byte_count);
}

FieldElement UnmaskDomainAggregate(const PrimeField& field,
                                   const std::map<uint32_t, FieldElement>& masked,
                                   const std::map<uint32_t, FieldElement>& self_masks) {
  FieldElement sum{0};
  for (const auto& [user, value] : masked) {
    auto it = self_masks.find(user);
    if (it == self_masks.end()) {
      throw Error(ErrorCode::kIncompleteRound,
                  "no self mask recovered for contributor " + std::to_string(user));
    }
    sum = field.Add(sum, field.Sub(value, it->second));
  }
  return sum;
}

std::vector<FieldElement> UnmaskDomainAggregateVector(
    const PrimeField& field, const std::map<uint32_t, std::vector<FieldElement>>& masked,
    const std::map<uint32_t, Seed>& self_seeds) {
  if (masked.empty()) return {};
  const size_t width = masked.begin()->second.size();
  std::vector<FieldElement> sum(width);
  for (const auto& [user, values] : masked) {
    auto it = self_seeds.find(user);
    if (it == self_seeds.end()) {
      throw Error(ErrorCode::kIncompleteRound,
                  "no self mask recovered for contributor " + std::to_string(user));
    }
    if (values.size() != width) {
      throw Error(ErrorCode::kAggregationConsistency, "masked vectors differ in length");
    }
    for (size_t i = 0; i < width; ++i) sum[i] = field.Add(sum[i], values[i]);
    AccumulateExpansion(field, it->second, -1, sum);
  }
  return sum;
}

FieldElement RecoverDropoutPairwise(const PublicParams& params, const ShamirScheme& scheme,
                                    uint32_t dropped,
                                    const std::map<uint32_t, std::vector<Share>>& survivor_shares,
                                    uint32_t t, const std::map<uint32_t, Bytes>& survivor_publics,
                                    uint64_t round, std::string_view tag) {
  Bytes private_key = RecoverBytes(scheme, survivor_shares, t, kPrivateKeyBytes);
  const PrimeField& field = scheme.field();
  FieldElement correction{0};
  ForEachPeerKey(params, private_key, survivor_publics,
                 [&](uint32_t peer, const SharedKey& key) {
                   FieldElement m = DerivePairwiseMask(field, key, round, tag);
                   correction = peer < dropped ? field.Add(correction, m)
                                               : field.Sub(correction, m);
                 });
  return correction;
}

std::vector<FieldElement> RecoverDropoutPairwiseVector(
    const PublicParams& params, const ShamirScheme& scheme, uint32_t dropped,
    const std::map<uint32_t, std::vector<Share>>& survivor_shares, uint32_t t,
    const std::map<uint32_t, Bytes>& survivor_publics, uint64_t round, std::string_view tag,
    size_t count) {
  Bytes private_key = RecoverBytes(scheme, survivor_shares, t, kPrivateKeyBytes);
  std::vector<FieldElement> correction(count);
  ForEachPeerKey(params, private_key, survivor_publics,
                 [&](uint32_t peer, const SharedKey& key) {
                   AccumulateExpansion(scheme.field(), PairwiseMaskSeed(key, round, tag),
                                       peer < dropped ? +1 : -1, correction);
                 });
  return correction;
}

}  // namespace fedgbt
