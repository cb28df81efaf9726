// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "fakturchain/common/bytes.hpp"
#include "fakturchain/common/digest.hpp"

namespace fakturchain {

// Canonical binary encoding shared by hashing, signing, the wire and the
// block store. Integers are big-endian and fixed width; byte strings carry a
// u32 length prefix; digests are raw 32 bytes. Structures are encoded field
// by field in declaration order.
class Encoder {
 public:
  Encoder& u8(std::uint8_t v);
  Encoder& u16(std::uint16_t v);
  Encoder& u32(std::uint32_t v);
  Encoder& u64(std::uint64_t v);
  Encoder& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
  Encoder& boolean(bool v) { return u8(v ? 1 : 0); }
  Encoder& bytes(ByteView v);
  Encoder& str(std::string_view v) { return bytes(as_view(v)); }
  Encoder& digest(const Digest& d);
  Encoder& raw(ByteView v);

  const Bytes& buffer() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Decoder {
 public:
  explicit Decoder(ByteView in) : in_(in) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  bool boolean();
  Bytes bytes();
  std::string str();
  Digest digest();

  bool done() const { return pos_ == in_.size(); }
  std::size_t position() const { return pos_; }
  // Throws Error(Malformed) if unread bytes remain.
  void expect_done() const;

 private:
  ByteView take(std::size_t n);

  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace fakturchain
