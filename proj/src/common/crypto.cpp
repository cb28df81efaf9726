// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/common/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <mutex>

#include "fakturchain/common/error.hpp"

namespace fakturchain {

namespace detail {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) {
      throw std::runtime_error("libsodium initialisation failed");
    }
  });
}

}  // namespace detail

namespace crypto {

KeyPair KeyPair::from_seed(const Digest& seed) {
  detail::ensure_sodium();
  KeyPair kp;
  kp.public_.resize(crypto_sign_PUBLICKEYBYTES);
  crypto_sign_seed_keypair(kp.public_.data(), kp.secret_.data(),
                           seed.raw().data());
  return kp;
}

Bytes KeyPair::sign(ByteView message) const {
  Bytes sig(crypto_sign_BYTES);
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(),
                       secret_.data());
  return sig;
}

std::array<std::uint8_t, 32> KeyPair::box_secret() const {
  std::array<std::uint8_t, 32> out{};
  crypto_sign_ed25519_sk_to_curve25519(out.data(), secret_.data());
  return out;
}

bool verify(ByteView public_key, ByteView message, ByteView signature) {
  detail::ensure_sodium();
  if (public_key.size() != crypto_sign_PUBLICKEYBYTES ||
      signature.size() != crypto_sign_BYTES) {
    return false;
  }
  return crypto_sign_verify_detached(signature.data(), message.data(),
                                     message.size(), public_key.data()) == 0;
}

namespace {

std::optional<std::array<std::uint8_t, 32>> box_public(ByteView ed_public) {
  if (ed_public.size() != crypto_sign_PUBLICKEYBYTES) return std::nullopt;
  std::array<std::uint8_t, 32> out{};
  if (crypto_sign_ed25519_pk_to_curve25519(out.data(), ed_public.data()) != 0) {
    return std::nullopt;
  }
  return out;
}

}  // namespace

Bytes box_seal(ByteView plaintext, ByteView receiver_public_key,
               const KeyPair& sender, const BoxNonce& nonce) {
  detail::ensure_sodium();
  auto pk = box_public(receiver_public_key);
  if (!pk) throw Error(Errc::AuthFailure, "receiver key is not usable");
  auto sk = sender.box_secret();
  Bytes out(plaintext.size() + crypto_box_MACBYTES);
  if (crypto_box_easy(out.data(), plaintext.data(), plaintext.size(),
                      nonce.data(), pk->data(), sk.data()) != 0) {
    throw Error(Errc::AuthFailure, "encryption failed");
  }
  sodium_memzero(sk.data(), sk.size());
  return out;
}

std::optional<Bytes> box_open(ByteView ciphertext, ByteView sender_public_key,
                              const KeyPair& receiver, const BoxNonce& nonce) {
  detail::ensure_sodium();
  if (ciphertext.size() < crypto_box_MACBYTES) return std::nullopt;
  auto pk = box_public(sender_public_key);
  if (!pk) return std::nullopt;
  auto sk = receiver.box_secret();
  Bytes out(ciphertext.size() - crypto_box_MACBYTES);
  int rc = crypto_box_open_easy(out.data(), ciphertext.data(),
                                ciphertext.size(), nonce.data(), pk->data(),
                                sk.data());
  sodium_memzero(sk.data(), sk.size());
  if (rc != 0) return std::nullopt;
  return out;
}

BoxNonce derive_nonce(ByteView context) {
  auto d = Digest::of(context);
  BoxNonce n{};
  std::copy_n(d.raw().begin(), n.size(), n.begin());
  return n;
}

}  // namespace crypto
}  // namespace fakturchain
