// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/chaincode/money.hpp"

#include <limits>

#include "fakturchain/common/error.hpp"

namespace fakturchain::chaincode {

Quantity Quantity::units(std::int64_t whole) {
  if (whole < 0 || whole > std::numeric_limits<std::int64_t>::max() / kScale) {
    throw Error(Errc::InvalidArgument, "quantity out of range");
  }
  return from_scaled(whole * kScale);
}

Quantity Quantity::from_scaled(std::int64_t scaled) {
  if (scaled < 0) throw Error(Errc::InvalidArgument, "negative quantity");
  Quantity q;
  q.scaled_ = scaled;
  return q;
}

Quantity Quantity::parse(std::string_view text) {
  auto bad = [&] {
    return Error(Errc::InvalidArgument,
                 "bad quantity '" + std::string(text) + "'");
  };
  if (text.empty()) throw bad();
  auto dot = text.find('.');
  auto whole = text.substr(0, dot);
  auto frac = dot == std::string_view::npos ? std::string_view{}
                                            : text.substr(dot + 1);
  if (whole.empty() || (dot != std::string_view::npos && frac.empty()) ||
      frac.size() > kFractionDigits) {
    throw bad();
  }
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  std::int64_t value = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') throw bad();
    if (value > (kMax - (c - '0')) / 10) throw bad();
    value = value * 10 + (c - '0');
  }
  if (value > kMax / kScale) throw bad();
  value *= kScale;
  std::int64_t place = kScale / 10;
  for (char c : frac) {
    if (c < '0' || c > '9') throw bad();
    value += (c - '0') * place;
    place /= 10;
  }
  return from_scaled(value);
}

std::string Quantity::to_string() const {
  auto whole = std::to_string(scaled_ / kScale);
  auto frac = scaled_ % kScale;
  if (frac == 0) return whole;
  auto digits = std::to_string(frac);
  digits.insert(0, kFractionDigits - digits.size(), '0');
  while (digits.back() == '0') digits.pop_back();
  return whole + "." + digits;
}

namespace {

__extension__ typedef __int128 Wide;

// Non-negative numerator/denominator, half-up.
Wide round_half_up(Wide num, Wide den) { return (2 * num + den) / (2 * den); }

}  // namespace

VatBreakdown compute_vat(std::span<const LineItem> items, const VatRate& rate) {
  if (rate.den <= 0 || rate.num < 0) {
    throw Error(Errc::InvalidArgument, "VAT rate must be a non-negative ratio");
  }
  constexpr Wide kMaxScaled = static_cast<Wide>(kMaxRupiah) * Quantity::kScale +
                              Quantity::kScale / 2;
  Wide sum = 0;
  for (const auto& item : items) {
    if (item.unit_price < 0) {
      throw Error(Errc::InvalidArgument, "negative unit price");
    }
    if (item.unit_price > kMaxRupiah) {
      throw Error(Errc::Overflow, "unit price exceeds 18 digits");
    }
    sum += static_cast<Wide>(item.quantity.scaled()) * item.unit_price;
    if (sum >= kMaxScaled) {
      throw Error(Errc::Overflow, "tax base exceeds 18 digits");
    }
  }
  Wide base = round_half_up(sum, Quantity::kScale);
  Wide vat = round_half_up(base * rate.num, rate.den);
  if (vat > kMaxRupiah) throw Error(Errc::Overflow, "VAT exceeds 18 digits");
  return {static_cast<Rupiah>(base), static_cast<Rupiah>(vat)};
}

}  // namespace fakturchain::chaincode
