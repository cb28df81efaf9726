// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/common/codec.hpp"

#include <limits>

#include "fakturchain/common/error.hpp"

namespace fakturchain {

Encoder& Encoder::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

Encoder& Encoder::u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
  return *this;
}

Encoder& Encoder::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

Encoder& Encoder::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

Encoder& Encoder::bytes(ByteView v) {
  if (v.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(Errc::InvalidArgument, "field exceeds 4 GiB");
  }
  u32(static_cast<std::uint32_t>(v.size()));
  return raw(v);
}

Encoder& Encoder::digest(const Digest& d) { return raw(d.view()); }

Encoder& Encoder::raw(ByteView v) {
  out_.insert(out_.end(), v.begin(), v.end());
  return *this;
}

ByteView Decoder::take(std::size_t n) {
  if (n > in_.size() - pos_) {
    throw Error(Errc::Malformed, "truncated input");
  }
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t Decoder::u8() { return take(1)[0]; }

std::uint16_t Decoder::u16() {
  auto b = take(2);
  return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
}

std::uint32_t Decoder::u32() {
  auto b = take(4);
  std::uint32_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t Decoder::u64() {
  auto b = take(8);
  std::uint64_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

bool Decoder::boolean() {
  auto v = u8();
  if (v > 1) throw Error(Errc::Malformed, "boolean out of range");
  return v == 1;
}

Bytes Decoder::bytes() {
  auto n = u32();
  auto b = take(n);
  return Bytes(b.begin(), b.end());
}

std::string Decoder::str() {
  auto n = u32();
  auto b = take(n);
  return std::string(b.begin(), b.end());
}

Digest Decoder::digest() { return Digest::from_bytes(take(Digest::kSize)); }

void Decoder::expect_done() const {
  if (!done()) throw Error(Errc::Malformed, "trailing bytes");
}

}  // namespace fakturchain
