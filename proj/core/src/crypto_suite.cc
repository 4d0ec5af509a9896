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

#include "fedgbt/crypto_suite.h"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/obj_mac.h>

#include <cstring>
#include <memory>

#include "fedgbt/error.h"

namespace fedgbt {
namespace {

constexpr size_t kScalarBytes = 32;
constexpr size_t kPointBytes = 65;
constexpr size_t kEd25519Bytes = 32;
constexpr size_t kSignatureBytes = 64;

struct BnCtxDeleter { void operator()(BN_CTX* c) const { BN_CTX_free(c); } };
struct BnDeleter { void operator()(BIGNUM* b) const { BN_clear_free(b); } };
struct PointDeleter { void operator()(EC_POINT* p) const { EC_POINT_free(p); } };
struct PkeyDeleter { void operator()(EVP_PKEY* k) const { EVP_PKEY_free(k); } };
struct MdCtxDeleter { void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); } };
struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};

using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using PointPtr = std::unique_ptr<EC_POINT, PointDeleter>;
using CtxPtr = std::unique_ptr<BN_CTX, BnCtxDeleter>;

const EC_GROUP* P256() {
  static const EC_GROUP* group = EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1);
  return group;
}

const EVP_CIPHER* Aes128Gcm() {
  static EVP_CIPHER* cipher = EVP_CIPHER_fetch(nullptr, "AES-128-GCM", nullptr);
  return cipher;
}

const EVP_CIPHER* Aes128Ctr() {
  static EVP_CIPHER* cipher = EVP_CIPHER_fetch(nullptr, "AES-128-CTR", nullptr);
  return cipher;
}

const EVP_MD* Sha256Md() {
  static EVP_MD* md = EVP_MD_fetch(nullptr, "SHA256", nullptr);
  return md;
}

void CheckParams(const PublicParams& params) {
  if (params.security_parameter != 256) {
    throw Error(ErrorCode::kConfiguration, "unsupported public parameters");
  }
}

BnPtr ScalarFromBytes(std::span<const uint8_t> bytes) {
  if (bytes.size() != kScalarBytes) {
    throw Error(ErrorCode::kKey, "private scalar must be 32 bytes");
  }
  BnPtr scalar(BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr));
  const BIGNUM* order = EC_GROUP_get0_order(P256());
  if (!scalar || BN_is_zero(scalar.get()) || BN_cmp(scalar.get(), order) >= 0) {
    throw Error(ErrorCode::kKey, "private scalar out of range");
  }
  return scalar;
}

Bytes EncodePoint(const EC_POINT* point, BN_CTX* ctx) {
  Bytes out(kPointBytes);
  size_t written = EC_POINT_point2oct(P256(), point, POINT_CONVERSION_UNCOMPRESSED,
                                      out.data(), out.size(), ctx);
  if (written != kPointBytes) throw Error(ErrorCode::kKey, "point encoding failed");
  return out;
}

}  // namespace

PublicParams KeySetup(int security_parameter) {
  if (security_parameter != 256) {
    throw Error(ErrorCode::kConfiguration,
                "unsupported security parameter " + std::to_string(security_parameter));
  }
  return PublicParams{
      .security_parameter = 256,
      .group = "NIST P-256",
      .order_bits = 256,
      .generator = "P-256 base point",
      .hash = "SHA-256",
      .aead = "AES-128-GCM",
      .signature = "Ed25519",
  };
}

Bytes DerivePublicKey(const PublicParams& params, std::span<const uint8_t> private_key) {
  CheckParams(params);
  BnPtr scalar = ScalarFromBytes(private_key);
  CtxPtr ctx(BN_CTX_new());
  PointPtr pub(EC_POINT_new(P256()));
  if (!EC_POINT_mul(P256(), pub.get(), scalar.get(), nullptr, nullptr, ctx.get())) {
    throw Error(ErrorCode::kKey, "public key derivation failed");
  }
  return EncodePoint(pub.get(), ctx.get());
}

KeyPair KeyGen(const PublicParams& params, KeyPurpose purpose, Rng& rng) {
  CheckParams(params);
  KeyPair pair;
  pair.purpose = purpose;
  if (purpose == KeyPurpose::kSign) {
    pair.private_key.resize(kEd25519Bytes);
    rng.FillBytes(pair.private_key);
    std::unique_ptr<EVP_PKEY, PkeyDeleter> key(EVP_PKEY_new_raw_private_key(
        EVP_PKEY_ED25519, nullptr, pair.private_key.data(), pair.private_key.size()));
    if (!key) throw Error(ErrorCode::kKey, "Ed25519 key construction failed");
    size_t len = kEd25519Bytes;
    pair.public_key.resize(len);
    if (!EVP_PKEY_get_raw_public_key(key.get(), pair.public_key.data(), &len)) {
      throw Error(ErrorCode::kKey, "Ed25519 public key extraction failed");
    }
    return pair;
  }
  const BIGNUM* order = EC_GROUP_get0_order(P256());
  Bytes candidate(kScalarBytes);
  while (true) {
    rng.FillBytes(candidate);
    BnPtr scalar(BN_bin2bn(candidate.data(), kScalarBytes, nullptr));
    if (!BN_is_zero(scalar.get()) && BN_cmp(scalar.get(), order) < 0) break;
  }
  pair.private_key = candidate;
  pair.public_key = DerivePublicKey(params, candidate);
  return pair;
}

SharedKey KeyAgree(const PublicParams& params, std::span<const uint8_t> my_private,
                   std::span<const uint8_t> their_public) {
  CheckParams(params);
  BnPtr scalar = ScalarFromBytes(my_private);
  CtxPtr ctx(BN_CTX_new());
  PointPtr peer(EC_POINT_new(P256()));
  if (their_public.size() != kPointBytes ||
      !EC_POINT_oct2point(P256(), peer.get(), their_public.data(), their_public.size(),
                          ctx.get()) ||
      EC_POINT_is_at_infinity(P256(), peer.get()) ||
      EC_POINT_is_on_curve(P256(), peer.get(), ctx.get()) != 1) {
    throw Error(ErrorCode::kKey, "degenerate or malformed public key");
  }
  PointPtr shared(EC_POINT_new(P256()));
  if (!EC_POINT_mul(P256(), shared.get(), nullptr, peer.get(), scalar.get(), ctx.get()) ||
      EC_POINT_is_at_infinity(P256(), shared.get())) {
    throw Error(ErrorCode::kKey, "key agreement produced the identity");
  }
  BnPtr x(BN_new());
  if (!EC_POINT_get_affine_coordinates(P256(), shared.get(), x.get(), nullptr, ctx.get())) {
    throw Error(ErrorCode::kKey, "key agreement failed");
  }
  uint8_t x_bytes[kScalarBytes];
  BN_bn2binpad(x.get(), x_bytes, sizeof(x_bytes));
  SharedKey key;
  key.bytes = Sha256(x_bytes);
  return key;
}

Bytes Ciphertext::Serialize() const {
  Bytes out;
  out.reserve(nonce.size() + tag.size() + body.size());
  out.insert(out.end(), nonce.begin(), nonce.end());
  out.insert(out.end(), tag.begin(), tag.end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Ciphertext Ciphertext::Parse(std::span<const uint8_t> bytes) {
  Ciphertext c;
  if (bytes.size() < c.nonce.size() + c.tag.size()) {
    throw Error(ErrorCode::kFormat, "ciphertext too short");
  }
  std::memcpy(c.nonce.data(), bytes.data(), c.nonce.size());
  std::memcpy(c.tag.data(), bytes.data() + c.nonce.size(), c.tag.size());
  c.body.assign(bytes.begin() + c.nonce.size() + c.tag.size(), bytes.end());
  return c;
}

Ciphertext AeadEncrypt(const SharedKey& key, std::span<const uint8_t> plaintext,
                       std::span<const uint8_t> context, Rng& rng) {
  Ciphertext out;
  rng.FillBytes(out.nonce);
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  out.body.resize(plaintext.size());
  bool ok = EVP_EncryptInit_ex2(ctx.get(), Aes128Gcm(), key.bytes.data(), out.nonce.data(),
                                nullptr) == 1;
  ok = ok && EVP_EncryptUpdate(ctx.get(), nullptr, &len, context.data(),
                               static_cast<int>(context.size())) == 1;
  ok = ok && EVP_EncryptUpdate(ctx.get(), out.body.data(), &len, plaintext.data(),
                               static_cast<int>(plaintext.size())) == 1;
  ok = ok && EVP_EncryptFinal_ex(ctx.get(), out.body.data() + len, &len) == 1;
  ok = ok && EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG,
                                 static_cast<int>(out.tag.size()), out.tag.data()) == 1;
  if (!ok) throw Error(ErrorCode::kRuntime, "AES-GCM encryption failed");
  return out;
}

Bytes AeadDecrypt(const SharedKey& key, const Ciphertext& ciphertext,
                  std::span<const uint8_t> context) {
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
  Bytes plain(ciphertext.body.size());
  int len = 0;
  auto tag = ciphertext.tag;
  bool ok = EVP_DecryptInit_ex2(ctx.get(), Aes128Gcm(), key.bytes.data(),
                                ciphertext.nonce.data(), nullptr) == 1;
  ok = ok && EVP_DecryptUpdate(ctx.get(), nullptr, &len, context.data(),
                               static_cast<int>(context.size())) == 1;
  ok = ok && EVP_DecryptUpdate(ctx.get(), plain.data(), &len, ciphertext.body.data(),
                               static_cast<int>(ciphertext.body.size())) == 1;
  ok = ok && EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG,
                                 static_cast<int>(tag.size()), tag.data()) == 1;
  ok = ok && EVP_DecryptFinal_ex(ctx.get(), plain.data() + len, &len) == 1;
  if (!ok) throw Error(ErrorCode::kAuthentication, "ciphertext failed authentication");
  return plain;
}

Bytes Sign(const KeyPair& sign_key, std::span<const uint8_t> message) {
  if (sign_key.purpose != KeyPurpose::kSign) {
    throw Error(ErrorCode::kKey, "key pair is not a signature key");
  }
  std::unique_ptr<EVP_PKEY, PkeyDeleter> key(EVP_PKEY_new_raw_private_key(
      EVP_PKEY_ED25519, nullptr, sign_key.private_key.data(), sign_key.private_key.size()));
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  Bytes signature(kSignatureBytes);
  size_t len = signature.size();
  if (!key || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1 ||
      EVP_DigestSign(ctx.get(), signature.data(), &len, message.data(), message.size()) != 1) {
    throw Error(ErrorCode::kKey, "signing failed");
  }
  return signature;
}

bool Verify(std::span<const uint8_t> verify_key, std::span<const uint8_t> message,
            std::span<const uint8_t> signature) {
  if (verify_key.size() != kEd25519Bytes || signature.size() != kSignatureBytes) {
    return false;
  }
  std::unique_ptr<EVP_PKEY, PkeyDeleter> key(EVP_PKEY_new_raw_public_key(
      EVP_PKEY_ED25519, nullptr, verify_key.data(), verify_key.size()));
  if (!key) return false;
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                          message.size()) == 1;
}

std::array<uint8_t, 32> Sha256(std::span<const uint8_t> data) {
  std::array<uint8_t, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, Sha256Md(), nullptr) != 1) {
    throw Error(ErrorCode::kRuntime, "SHA-256 failed");
  }
  return out;
}

struct Sha256Hasher::Impl {
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx{EVP_MD_CTX_new()};
};

Sha256Hasher::Sha256Hasher() : impl_(new Impl) {
  EVP_DigestInit_ex(impl_->ctx.get(), Sha256Md(), nullptr);
}

Sha256Hasher::~Sha256Hasher() { delete impl_; }

void Sha256Hasher::Update(std::span<const uint8_t> data) {
  EVP_DigestUpdate(impl_->ctx.get(), data.data(), data.size());
}

std::array<uint8_t, 32> Sha256Hasher::Finish() {
  std::array<uint8_t, 32> out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(impl_->ctx.get(), out.data(), &len);
  return out;
}

std::array<uint8_t, 32> Sha256Hasher::Peek() const {
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> copy(EVP_MD_CTX_new());
  EVP_MD_CTX_copy_ex(copy.get(), impl_->ctx.get());
  std::array<uint8_t, 32> out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(copy.get(), out.data(), &len);
  return out;
}

struct StreamCipherPrg::Impl {
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx{EVP_CIPHER_CTX_new()};
  std::vector<uint8_t> zeros;
};

StreamCipherPrg::StreamCipherPrg(const std::array<uint8_t, 32>& seed) : impl_(new Impl) {
  if (EVP_EncryptInit_ex2(impl_->ctx.get(), Aes128Ctr(), seed.data(), seed.data() + 16,
                          nullptr) != 1) {
    delete impl_;
    throw Error(ErrorCode::kRuntime, "AES-CTR init failed");
  }
}

StreamCipherPrg::~StreamCipherPrg() { delete impl_; }

void StreamCipherPrg::Fill(std::span<uint64_t> out) {
  const size_t bytes = out.size() * sizeof(uint64_t);
  if (impl_->zeros.size() < bytes) impl_->zeros.assign(bytes, 0);
  int len = 0;
  auto* dst = reinterpret_cast<unsigned char*>(out.data());
  if (EVP_EncryptUpdate(impl_->ctx.get(), dst, &len, impl_->zeros.data(),
                        static_cast<int>(bytes)) != 1) {
    throw Error(ErrorCode::kRuntime, "AES-CTR keystream failed");
  }
}

std::string HexEncode(std::span<const uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

}  // namespace fedgbt
