// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakturchain/chaincode/money.hpp"
#include "fakturchain/chaincode/nsfp.hpp"
#include "fakturchain/common/bytes.hpp"
#include "fakturchain/common/digest.hpp"

namespace fakturchain::chaincode {

struct Date {
  int year = 0;
  int month = 1;
  int day = 1;

  // "YYYY-MM-DD"; throws Error(InvalidArgument).
  static Date parse(std::string_view text);
  std::string to_string() const;
  bool valid() const;

  auto operator<=>(const Date&) const = default;
};

// VAT invoice. The full body travels off-chain; only faktur_hash (the digest
// of body_bytes()) is anchored on-chain.
struct Faktur {
  NsfpSerial nsfp;
  std::string seller_org;
  std::string buyer_tax_id;
  Date transaction_date;
  std::vector<LineItem> line_items;
  Rupiah tax_base = 0;
  Rupiah vat_amount = 0;
  Digest faktur_hash;

  // Canonical encoding of every field except faktur_hash. This is the
  // private payload exchanged between seller and DJP.
  Bytes body_bytes() const;
  Digest compute_hash() const { return Digest::of(body_bytes()); }
  // Sets faktur_hash from the current fields.
  Faktur& seal();

  // Inverse of body_bytes(); the hash is recomputed from the input bytes.
  static Faktur decode_body(ByteView body);

  // JSON form used by the gateway API. faktur_hash is included when sealed.
  nlohmann::json to_json() const;
  // Missing faktur_hash leaves the digest zero.
  static Faktur from_json(const nlohmann::json& j);

  bool operator==(const Faktur&) const = default;
};

// Machine-readable rejection reason codes.
namespace reason {
inline constexpr std::string_view kUnknownNsfp = "unknown-nsfp";
inline constexpr std::string_view kOwnership = "ownership";
inline constexpr std::string_view kDuplicate = "duplicate";
inline constexpr std::string_view kSerialRevoked = "serial-revoked";
inline constexpr std::string_view kArithmetic = "arithmetic";
inline constexpr std::string_view kYearMismatch = "year-mismatch";
inline constexpr std::string_view kHashMismatch = "hash-mismatch";
inline constexpr std::string_view kNotEligible = "not-eligible";
inline constexpr std::string_view kUnauthorized = "unauthorized";
inline constexpr std::string_view kEndorsement = "endorsement";
inline constexpr std::string_view kVisibility = "visibility";
inline constexpr std::string_view kReplay = "replay";
inline constexpr std::string_view kMalformed = "malformed";
inline constexpr std::string_view kBadCount = "bad-count";
inline constexpr std::string_view kBadYear = "bad-year";
inline constexpr std::string_view kAlreadyRevoked = "already-revoked";
inline constexpr std::string_view kUnknownCert = "unknown-cert";
}  // namespace reason

struct ValidationResult {
  bool accepted = false;
  std::vector<std::string> reasons;
  std::optional<Digest> anchored_hash;

  bool has_reason(std::string_view code) const;
  nlohmann::json to_json() const;
};

}  // namespace fakturchain::chaincode
