// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "fakturchain/common/codec.hpp"
#include "fakturchain/common/crypto.hpp"
#include "fakturchain/common/digest.hpp"
#include "fakturchain/common/error.hpp"

namespace fakturchain {
namespace {

TEST(Hex, RoundTrip) {
  Bytes b{0x00, 0x01, 0xab, 0xff};
  EXPECT_EQ(to_hex(b), "0001abff");
  EXPECT_EQ(from_hex("0001ABff"), b);
  EXPECT_THROW(from_hex("abc"), Error);
  EXPECT_THROW(from_hex("zz"), Error);
}

TEST(Digest, KnownVector) {
  EXPECT_EQ(Digest::of("abc").hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_TRUE(Digest::zero().is_zero());
  auto d = Digest::of("x");
  EXPECT_EQ(Digest::from_hex(d.hex()), d);
  EXPECT_THROW(Digest::from_hex("00"), Error);
}

TEST(Codec, RoundTripsEveryType) {
  Encoder enc;
  auto d = Digest::of("payload");
  enc.u8(7).u16(0xbeef).u32(0xdeadbeef).u64(1ULL << 60).i64(-5).boolean(true).str("halo").digest(d);
  Bytes buf = enc.take();
  Decoder dec(buf);
  EXPECT_EQ(dec.u8(), 7);
  EXPECT_EQ(dec.u16(), 0xbeef);
  EXPECT_EQ(dec.u32(), 0xdeadbeefU);
  EXPECT_EQ(dec.u64(), 1ULL << 60);
  EXPECT_EQ(dec.i64(), -5);
  EXPECT_TRUE(dec.boolean());
  EXPECT_EQ(dec.str(), "halo");
  EXPECT_EQ(dec.digest(), d);
  EXPECT_TRUE(dec.done());
  EXPECT_NO_THROW(dec.expect_done());
}

TEST(Codec, BigEndianLayout) {
  Encoder enc;
  enc.u32(0x01020304);
  EXPECT_EQ(enc.buffer(), (Bytes{1, 2, 3, 4}));
}

TEST(Codec, TruncationIsMalformed) {
  Encoder enc;
  enc.str("abcdef");
  Bytes buf = enc.take();
  buf.pop_back();
  Decoder dec(buf);
  try {
    dec.str();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Malformed);
  }
}

TEST(Codec, TrailingBytesRejected) {
  Bytes buf{0, 1};
  Decoder dec(buf);
  dec.u8();
  EXPECT_THROW(dec.expect_done(), Error);
}

TEST(Crypto, DeterministicKeysAndSignatures) {
  auto a = crypto::KeyPair::from_seed(Digest::of("seed"));
  auto b = crypto::KeyPair::from_seed(Digest::of("seed"));
  auto c = crypto::KeyPair::from_seed(Digest::of("other"));
  EXPECT_EQ(a.public_key(), b.public_key());
  EXPECT_NE(a.public_key(), c.public_key());
  auto msg = to_bytes("faktur");
  auto sig = a.sign(msg);
  EXPECT_EQ(sig.size(), crypto::kSignatureSize);
  EXPECT_EQ(sig, b.sign(msg));
  EXPECT_TRUE(crypto::verify(a.public_key(), msg, sig));
  EXPECT_FALSE(crypto::verify(c.public_key(), msg, sig));
}

TEST(Crypto, AnyBitFlipBreaksSignature) {
  auto k = crypto::KeyPair::from_seed(Digest::of("k"));
  auto msg = to_bytes("pesan yang ditandatangani");
  auto sig = k.sign(msg);
  for (std::size_t i = 0; i < msg.size() * 8; ++i) {
    auto m = msg;
    m[i / 8] ^= static_cast<std::uint8_t>(1u << (i % 8));
    EXPECT_FALSE(crypto::verify(k.public_key(), m, sig)) << "bit " << i;
  }
  for (std::size_t i = 0; i < sig.size(); ++i) {
    auto s = sig;
    s[i] ^= 0x01;
    EXPECT_FALSE(crypto::verify(k.public_key(), msg, s)) << "sig byte " << i;
  }
}

TEST(Crypto, BoxRoundTripAndTamper) {
  auto alice = crypto::KeyPair::from_seed(Digest::of("alice"));
  auto bob = crypto::KeyPair::from_seed(Digest::of("bob"));
  auto eve = crypto::KeyPair::from_seed(Digest::of("eve"));
  auto nonce = crypto::derive_nonce(to_bytes("ctx"));
  auto plain = to_bytes("rahasia dagang");
  auto ct = crypto::box_seal(plain, bob.public_key(), alice, nonce);
  auto opened = crypto::box_open(ct, alice.public_key(), bob, nonce);
  ASSERT_TRUE(opened);
  EXPECT_EQ(*opened, plain);
  EXPECT_FALSE(crypto::box_open(ct, alice.public_key(), eve, nonce));
  ct[ct.size() / 2] ^= 1;
  EXPECT_FALSE(crypto::box_open(ct, alice.public_key(), bob, nonce));
}

// Brute-force reference for shares_fragment.
bool shares_naive(const Bytes& hay, const Bytes& needle, std::size_t w) {
  if (hay.size() < w || needle.size() < w) return false;
  for (std::size_t i = 0; i + w <= hay.size(); ++i)
    for (std::size_t j = 0; j + w <= needle.size(); ++j)
      if (std::equal(hay.begin() + i, hay.begin() + i + w, needle.begin() + j)) return true;
  return false;
}

TEST(SharesFragment, MatchesBruteForce) {
  std::mt19937_64 rng(42);
  for (int round = 0; round < 300; ++round) {
    std::uniform_int_distribution<int> len(0, 60);
    std::uniform_int_distribution<int> sym(0, 3);  // small alphabet forces matches
    Bytes hay(len(rng)), needle(len(rng));
    for (auto& b : hay) b = static_cast<std::uint8_t>(sym(rng));
    for (auto& b : needle) b = static_cast<std::uint8_t>(sym(rng));
    std::size_t w = 1 + round % 6;
    EXPECT_EQ(shares_fragment(hay, needle, w), shares_naive(hay, needle, w)) << round;
  }
}

TEST(Error, CodeAndMessage) {
  Error e(Errc::NotFound, "missing thing");
  EXPECT_EQ(e.code(), Errc::NotFound);
  EXPECT_NE(std::string(e.what()).find("missing thing"), std::string::npos);
}

}  // namespace
}  // namespace fakturchain
