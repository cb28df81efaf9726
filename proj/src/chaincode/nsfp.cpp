// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/chaincode/nsfp.hpp"

#include <algorithm>
#include <cstdio>

#include "fakturchain/common/error.hpp"

namespace fakturchain::chaincode {

namespace {

bool all_digits(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

std::string zero_pad(std::uint64_t v, int width) {
  auto s = std::to_string(v);
  if (s.size() < static_cast<std::size_t>(width)) {
    s.insert(0, width - s.size(), '0');
  }
  return s;
}

}  // namespace

NsfpSerial NsfpSerial::make(std::string_view transaction_code, char status,
                            std::string_view branch_code, int year_suffix,
                            std::uint64_t sequence) {
  if (transaction_code.size() != 2 || !all_digits(transaction_code) ||
      status < '0' || status > '9' || branch_code.size() != 3 ||
      !all_digits(branch_code) || year_suffix < 0 || year_suffix > 99 ||
      sequence > kMaxSequence) {
    throw Error(Errc::InvalidArgument, "NSFP component out of range");
  }
  NsfpSerial s;
  s.digits_ = std::string(transaction_code) + status + std::string(branch_code) +
              zero_pad(static_cast<std::uint64_t>(year_suffix), 2) +
              zero_pad(sequence, 8);
  return s;
}

NsfpSerial NsfpSerial::parse(std::string_view text) {
  std::string digits;
  for (char c : text) {
    if (c == '.' || c == '-') continue;
    digits.push_back(c);
  }
  if (digits.size() != kDigits || !all_digits(digits)) {
    throw Error(Errc::InvalidArgument,
                "NSFP must have 16 digits: '" + std::string(text) + "'");
  }
  NsfpSerial s;
  s.digits_ = std::move(digits);
  return s;
}

NsfpSerial NsfpSerial::from_number(std::uint64_t value) {
  if (value > 9'999'999'999'999'999ULL) {
    throw Error(Errc::InvalidArgument, "NSFP number exceeds 16 digits");
  }
  NsfpSerial s;
  s.digits_ = zero_pad(value, kDigits);
  return s;
}

std::string NsfpSerial::formatted() const {
  if (digits_.size() != kDigits) return digits_;
  return digits_.substr(0, 3) + "." + digits_.substr(3, 3) + "-" +
         digits_.substr(6, 2) + "." + digits_.substr(8, 8);
}

int NsfpSerial::year_suffix() const {
  if (digits_.size() != kDigits) return -1;
  return std::stoi(digits_.substr(6, 2));
}

std::uint64_t NsfpSerial::sequence() const {
  if (digits_.size() != kDigits) return 0;
  return std::stoull(digits_.substr(8, 8));
}

std::uint64_t NsfpSerial::as_number() const {
  if (digits_.empty()) return 0;
  return std::stoull(digits_);
}

std::string_view to_string(SerialStatus s) {
  switch (s) {
    case SerialStatus::Available: return "Available";
    case SerialStatus::Used: return "Used";
    case SerialStatus::Revoked: return "Revoked";
  }
  return "?";
}

SerialStatus parse_serial_status(std::string_view s) {
  for (auto v : {SerialStatus::Available, SerialStatus::Used,
                 SerialStatus::Revoked}) {
    if (to_string(v) == s) return v;
  }
  throw Error(Errc::InvalidArgument, "unknown serial status '" +
                                         std::string(s) + "'");
}

void NsfpAllocation::encode(Encoder& enc) const {
  enc.str(allocation_id).str(owner_org).i64(tax_year);
  enc.u32(static_cast<std::uint32_t>(serials.size()));
  for (std::size_t i = 0; i < serials.size(); ++i) {
    enc.u64(serials[i].as_number()).u8(static_cast<std::uint8_t>(statuses[i]));
  }
  enc.digest(issued_tx_id);
}

NsfpAllocation NsfpAllocation::decode(Decoder& dec) {
  NsfpAllocation a;
  a.allocation_id = dec.str();
  a.owner_org = dec.str();
  a.tax_year = static_cast<int>(dec.i64());
  auto n = dec.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    a.serials.push_back(NsfpSerial::from_number(dec.u64()));
    auto st = dec.u8();
    if (st > 2) throw Error(Errc::Malformed, "serial status");
    a.statuses.push_back(static_cast<SerialStatus>(st));
  }
  a.issued_tx_id = dec.digest();
  return a;
}

nlohmann::json NsfpAllocation::to_json() const {
  auto arr = nlohmann::json::array();
  for (std::size_t i = 0; i < serials.size(); ++i) {
    arr.push_back({{"nsfp", serials[i].formatted()},
                   {"status", std::string(to_string(statuses[i]))}});
  }
  return {{"allocation_id", allocation_id},
          {"owner_org", owner_org},
          {"tax_year", tax_year},
          {"serials", arr},
          {"issued_tx_id", issued_tx_id.hex()}};
}

}  // namespace fakturchain::chaincode
