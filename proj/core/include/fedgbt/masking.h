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

#ifndef FEDGBT_MASKING_H_
#define FEDGBT_MASKING_H_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "fedgbt/crypto_suite.h"
#include "fedgbt/finite_field.h"
#include "fedgbt/random.h"

namespace fedgbt {

using Seed = std::array<uint8_t, 32>;

// Pairwise mask for one use: SHA-256(key || round || tag) reduced mod p.
FieldElement DerivePairwiseMask(const PrimeField& field, const SharedKey& key,
                                uint64_t round, std::string_view tag);

// Seed for the vector form of the pairwise mask with the same binding.
Seed PairwiseMaskSeed(const SharedKey& key, uint64_t round, std::string_view tag);

// Expands a seed into `count` uniform field elements (AES-CTR keystream with
// rejection of words >= p after masking to the modulus bit width).
std::vector<FieldElement> ExpandSeed(const PrimeField& field, const Seed& seed,
                                     size_t count);

// Adds sign * ExpandSeed(seed) to acc element-wise. sign is +1 or -1.
void AccumulateExpansion(const PrimeField& field, const Seed& seed, int sign,
                         std::span<FieldElement> acc);

struct PeerMask {
  uint32_t peer = 0;
  FieldElement mask;
};

// s + r + sum_{v < owner} m_v - sum_{v > owner} m_v. `peers` must cover
// exactly roster minus owner, otherwise kRoster.
FieldElement SecMask(const PrimeField& field, uint32_t owner, FieldElement secret,
                     FieldElement self_mask, std::span<const PeerMask> peers,
                     std::span<const uint32_t> roster);

// Vector form: every slot masked with an independent expansion of the
// self-mask seed and of each pairwise key.
std::vector<FieldElement> SecMaskVector(const PrimeField& field, uint32_t owner,
                                        std::span<const FieldElement> secrets,
                                        const Seed& self_seed,
                                        const std::map<uint32_t, SharedKey>& peer_keys,
                                        std::span<const uint32_t> roster, uint64_t round,
                                        std::string_view tag);

// Everything one user needs to mask values inside its domain.
struct MaskKeyring {
  uint32_t owner = 0;
  KeyPair mask_key;
  std::map<uint32_t, SharedKey> pairwise_keys;
  // Holder -> shares (one per limb) of this user's private mask key.
  std::map<uint32_t, std::vector<Share>> mask_key_shares_out;
  // Peer -> this user's shares (one per limb) of the peer's private mask key.
  std::map<uint32_t, std::vector<Share>> mask_key_shares_held;
  FieldElement self_mask;
  std::vector<Share> self_mask_shares_out;

  // Agrees a pairwise key with every roster peer's public mask key.
  void AgreeWithPeers(const PublicParams& params,
                      const std::map<uint32_t, Bytes>& peer_publics);
};

std::vector<Share> ShareSelfMask(const ShamirScheme& scheme, FieldElement self_mask,
                                 uint32_t t, std::span<const uint32_t> roster, Rng& rng);

// Shares an arbitrary byte string limb by limb. Result: holder -> limb shares.
std::map<uint32_t, std::vector<Share>> ShareBytes(const ShamirScheme& scheme,
                                                  std::span<const uint8_t> secret,
                                                  uint32_t t,
                                                  std::span<const uint32_t> roster,
                                                  Rng& rng);

// Inverse of ShareBytes from at least t holders' limb shares.
Bytes RecoverBytes(const ShamirScheme& scheme,
                   const std::map<uint32_t, std::vector<Share>>& holder_shares,
                   uint32_t t, size_t byte_count);

// sum(masked) - sum(self masks). Every contributor needs its self mask,
// otherwise kIncompleteRound.
FieldElement UnmaskDomainAggregate(const PrimeField& field,
                                   const std::map<uint32_t, FieldElement>& masked,
                                   const std::map<uint32_t, FieldElement>& self_masks);

std::vector<FieldElement> UnmaskDomainAggregateVector(
    const PrimeField& field, const std::map<uint32_t, std::vector<FieldElement>>& masked,
    const std::map<uint32_t, Seed>& self_seeds);

// Reconstructs a dropped user's private mask key from survivors' shares and
// returns the pairwise terms that user would have contributed; adding it to
// the survivors' aggregate cancels their residual masks. kThreshold when
// fewer than t survivors hold shares.
FieldElement RecoverDropoutPairwise(const PublicParams& params, const ShamirScheme& scheme,
                                    uint32_t dropped,
                                    const std::map<uint32_t, std::vector<Share>>& survivor_shares,
                                    uint32_t t, const std::map<uint32_t, Bytes>& survivor_publics,
                                    uint64_t round, std::string_view tag);

std::vector<FieldElement> RecoverDropoutPairwiseVector(
    const PublicParams& params, const ShamirScheme& scheme, uint32_t dropped,
    const std::map<uint32_t, std::vector<Share>>& survivor_shares, uint32_t t,
    const std::map<uint32_t, Bytes>& survivor_publics, uint64_t round, std::string_view tag,
    size_t count);

}  // namespace fedgbt

#endif  // FEDGBT_MASKING_H_
