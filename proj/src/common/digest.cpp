// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/common/digest.hpp"

#include <sodium.h>

#include <algorithm>

#include "fakturchain/common/error.hpp"

namespace fakturchain {

namespace detail {
void ensure_sodium();
}

Digest Digest::of(ByteView data) {
  detail::ensure_sodium();
  std::array<std::uint8_t, kSize> out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return Digest(out);
}

Digest Digest::from_hex(std::string_view hex) {
  return from_bytes(fakturchain::from_hex(hex));
}

Digest Digest::from_bytes(ByteView raw) {
  if (raw.size() != kSize) {
    throw Error(Errc::Malformed, "digest must be 32 bytes");
  }
  std::array<std::uint8_t, kSize> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return Digest(out);
}

bool Digest::is_zero() const {
  return std::all_of(bytes_.begin(), bytes_.end(),
                     [](std::uint8_t b) { return b == 0; });
}

}  // namespace fakturchain
