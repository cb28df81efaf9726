// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakturchain/common/codec.hpp"
#include "fakturchain/common/digest.hpp"

namespace fakturchain::chaincode {

// Tax invoice serial number. Sixteen digits laid out as
//   TT S BBB YY SSSSSSSS
// (transaction code, status digit, branch code, year suffix, sequence) and
// rendered as "TTS.BBB-YY.SSSSSSSS".
class NsfpSerial {
 public:
  static constexpr std::size_t kDigits = 16;
  static constexpr std::uint64_t kMaxSequence = 99'999'999;

  NsfpSerial() = default;
  // Throws Error(InvalidArgument) on out-of-range parts.
  static NsfpSerial make(std::string_view transaction_code, char status,
                         std::string_view branch_code, int year_suffix,
                         std::uint64_t sequence);
  // Accepts the 16 bare digits or the rendered form.
  static NsfpSerial parse(std::string_view text);
  static NsfpSerial from_number(std::uint64_t value);

  const std::string& digits() const { return digits_; }
  std::string formatted() const;
  int year_suffix() const;
  std::uint64_t sequence() const;
  std::uint64_t as_number() const;

  auto operator<=>(const NsfpSerial&) const = default;

 private:
  std::string digits_;
};

enum class SerialStatus : std::uint8_t { Available = 0, Used = 1, Revoked = 2 };

std::string_view to_string(SerialStatus s);
SerialStatus parse_serial_status(std::string_view s);

// A block of serials issued to one PKP for one tax year.
struct NsfpAllocation {
  std::string allocation_id;
  std::string owner_org;
  int tax_year = 0;
  std::vector<NsfpSerial> serials;
  std::vector<SerialStatus> statuses;  // parallel to serials
  Digest issued_tx_id;

  void encode(Encoder& enc) const;
  static NsfpAllocation decode(Decoder& dec);
  nlohmann::json to_json() const;

  bool operator==(const NsfpAllocation&) const = default;
};

}  // namespace fakturchain::chaincode
