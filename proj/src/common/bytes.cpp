// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/common/bytes.hpp"

#include <string_view>
#include <unordered_set>

#include "fakturchain/common/error.hpp"

namespace fakturchain {

namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(Errc::Malformed, "odd-length hex string");
  }
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(Errc::Malformed, "non-hex character");
    }
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

bool shares_fragment(ByteView haystack, ByteView needle, std::size_t window) {
  if (window == 0 || needle.size() < window || haystack.size() < window) {
    return false;
  }
  auto key = [](ByteView v) {
    return std::string_view(reinterpret_cast<const char*>(v.data()), v.size());
  };
  std::unordered_set<std::string_view> windows;
  for (std::size_t i = 0; i + window <= needle.size(); ++i) {
    windows.insert(key(needle.subspan(i, window)));
  }
  for (std::size_t i = 0; i + window <= haystack.size(); ++i) {
    if (windows.contains(key(haystack.subspan(i, window)))) return true;
  }
  return false;
}

}  // namespace fakturchain
