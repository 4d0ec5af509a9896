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

#ifndef FEDGBT_CRYPTO_SUITE_H_
#define FEDGBT_CRYPTO_SUITE_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedgbt/random.h"

namespace fedgbt {

using Bytes = std::vector<uint8_t>;

// Public parameters shared by every participant of a run: the key-agreement
// group, its generator, the hash, and the symmetric/signature schemes.
struct PublicParams {
  int security_parameter = 0;
  std::string group;
  int order_bits = 0;
  std::string generator;
  std::string hash;
  std::string aead;
  std::string signature;

  friend bool operator==(const PublicParams&, const PublicParams&) = default;
};

// Only 256 is supported (P-256 / SHA-256 / AES-128-GCM / Ed25519).
PublicParams KeySetup(int security_parameter);

enum class KeyPurpose { kMask, kEncrypt, kSign };

struct KeyPair {
  KeyPurpose purpose = KeyPurpose::kEncrypt;
  Bytes private_key;  // 32-byte scalar (mask/encrypt) or Ed25519 seed (sign)
  Bytes public_key;   // 65-byte SEC1 point (mask/encrypt) or 32-byte Ed25519 key
};

KeyPair KeyGen(const PublicParams& params, KeyPurpose purpose, Rng& rng);

// Recomputes the public half of a mask/encrypt key from its private scalar.
Bytes DerivePublicKey(const PublicParams& params, std::span<const uint8_t> private_key);

struct SharedKey {
  std::array<uint8_t, 32> bytes{};

  friend bool operator==(const SharedKey&, const SharedKey&) = default;
};

// ECDH over the params' group; the shared x-coordinate is hashed to 32 bytes.
// Throws kKey on malformed, off-curve or identity public points.
SharedKey KeyAgree(const PublicParams& params, std::span<const uint8_t> my_private,
                   std::span<const uint8_t> their_public);

struct Ciphertext {
  std::array<uint8_t, 12> nonce{};
  Bytes body;
  std::array<uint8_t, 16> tag{};

  Bytes Serialize() const;
  // Throws kFormat if the buffer is too short.
  static Ciphertext Parse(std::span<const uint8_t> bytes);
};

// AES-128-GCM keyed by the first 16 bytes of `key`; `context` is bound as
// associated data. The nonce is drawn from `rng`.
Ciphertext AeadEncrypt(const SharedKey& key, std::span<const uint8_t> plaintext,
                       std::span<const uint8_t> context, Rng& rng);
// Throws kAuthentication on any tag mismatch.
Bytes AeadDecrypt(const SharedKey& key, const Ciphertext& ciphertext,
                  std::span<const uint8_t> context);

Bytes Sign(const KeyPair& sign_key, std::span<const uint8_t> message);
// Never throws; malformed keys or signatures verify as false.
bool Verify(std::span<const uint8_t> verify_key, std::span<const uint8_t> message,
            std::span<const uint8_t> signature);

std::array<uint8_t, 32> Sha256(std::span<const uint8_t> data);

// Incremental SHA-256.
class Sha256Hasher {
 public:
  Sha256Hasher();
  ~Sha256Hasher();
  Sha256Hasher(const Sha256Hasher&) = delete;
  Sha256Hasher& operator=(const Sha256Hasher&) = delete;

  void Update(std::span<const uint8_t> data);
  std::array<uint8_t, 32> Finish();
  // Digest of everything so far, leaving the running state untouched.
  std::array<uint8_t, 32> Peek() const;

 private:
  struct Impl;
  Impl* impl_;
};

// Keystream generator (AES-128-CTR) used to expand a 32-byte seed into masks.
class StreamCipherPrg {
 public:
  explicit StreamCipherPrg(const std::array<uint8_t, 32>& seed);
  ~StreamCipherPrg();
  StreamCipherPrg(const StreamCipherPrg&) = delete;
  StreamCipherPrg& operator=(const StreamCipherPrg&) = delete;

  void Fill(std::span<uint64_t> out);

 private:
  struct Impl;
  Impl* impl_;
};

std::string HexEncode(std::span<const uint8_t> bytes);

}  // namespace fedgbt

#endif  // FEDGBT_CRYPTO_SUITE_H_
