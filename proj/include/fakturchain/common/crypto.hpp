// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "fakturchain/common/bytes.hpp"
#include "fakturchain/common/digest.hpp"

namespace fakturchain::crypto {

constexpr std::size_t kPublicKeySize = 32;
constexpr std::size_t kSignatureSize = 64;
constexpr std::size_t kBoxNonceSize = 24;

using BoxNonce = std::array<std::uint8_t, kBoxNonceSize>;

// Ed25519 signing identity. The same key pair doubles as an X25519
// encryption key (via the standard birational map), so one certificate key
// serves both signing and private-exchange encryption.
class KeyPair {
 public:
  // Deterministic derivation; identical seeds give identical keys.
  static KeyPair from_seed(const Digest& seed);

  const Bytes& public_key() const { return public_; }
  Bytes sign(ByteView message) const;

  // X25519 secret scalar for box operations.
  std::array<std::uint8_t, 32> box_secret() const;

 private:
  std::array<std::uint8_t, 64> secret_{};
  Bytes public_;
};

bool verify(ByteView public_key, ByteView message, ByteView signature);

// Authenticated public-key encryption (X25519 + XSalsa20-Poly1305).
Bytes box_seal(ByteView plaintext, ByteView receiver_public_key,
               const KeyPair& sender, const BoxNonce& nonce);
std::optional<Bytes> box_open(ByteView ciphertext, ByteView sender_public_key,
                              const KeyPair& receiver, const BoxNonce& nonce);

BoxNonce derive_nonce(ByteView context);

}  // namespace fakturchain::crypto
