// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fakturchain {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// Logical time: monotone integer ticks supplied by the caller or simulator.
using LogicalTime = std::uint64_t;

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);  // throws Error(Malformed)

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(ByteView b) { return std::string(b.begin(), b.end()); }
inline ByteView as_view(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// True if `haystack` contains any window of `window` consecutive bytes that
// also occurs in `needle`.
bool shares_fragment(ByteView haystack, ByteView needle, std::size_t window);

}  // namespace fakturchain
