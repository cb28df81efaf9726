// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "fakturchain/common/bytes.hpp"

namespace fakturchain {

// 256-bit SHA-256 value.
class Digest {
 public:
  static constexpr std::size_t kSize = 32;

  Digest() { bytes_.fill(0); }
  explicit Digest(const std::array<std::uint8_t, kSize>& raw) : bytes_(raw) {}

  static Digest zero() { return Digest{}; }
  static Digest of(ByteView data);
  static Digest of(std::string_view data) { return of(as_view(data)); }
  static Digest from_hex(std::string_view hex);
  static Digest from_bytes(ByteView raw);

  bool is_zero() const;
  std::string hex() const { return to_hex(bytes_); }
  ByteView view() const { return bytes_; }
  const std::array<std::uint8_t, kSize>& raw() const { return bytes_; }

  auto operator<=>(const Digest&) const = default;

 private:
  std::array<std::uint8_t, kSize> bytes_;
};

}  // namespace fakturchain
