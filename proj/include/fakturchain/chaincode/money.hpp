// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace fakturchain::chaincode {

// Currency amounts are whole rupiah.
using Rupiah = std::int64_t;

// Largest amount representable: 18 decimal digits.
inline constexpr Rupiah kMaxRupiah = 999'999'999'999'999'999;

// Non-negative decimal quantity with up to four fractional digits, stored
// scaled by 10^4.
class Quantity {
 public:
  static constexpr std::int64_t kScale = 10'000;
  static constexpr int kFractionDigits = 4;

  Quantity() = default;
  static Quantity units(std::int64_t whole);
  static Quantity from_scaled(std::int64_t scaled);
  // Accepts "12", "1.5", "0.0025". Throws Error(InvalidArgument).
  static Quantity parse(std::string_view text);

  std::int64_t scaled() const { return scaled_; }
  std::string to_string() const;

  auto operator<=>(const Quantity&) const = default;

 private:
  std::int64_t scaled_ = 0;
};

struct LineItem {
  std::string description;
  Quantity quantity;
  Rupiah unit_price = 0;

  bool operator==(const LineItem&) const = default;
};

// Exact rational rate num/den.
struct VatRate {
  std::int64_t num = 11;
  std::int64_t den = 100;

  bool operator==(const VatRate&) const = default;
};

struct VatBreakdown {
  Rupiah tax_base = 0;
  Rupiah vat_amount = 0;

  bool operator==(const VatBreakdown&) const = default;
};

// tax_base = sum(quantity * unit_price), rounded half-up to whole rupiah when
// fractional quantities leave a sub-rupiah remainder; vat_amount =
// round_half_up(tax_base * rate). Integer arithmetic only. Throws
// Error(Overflow) beyond kMaxRupiah and Error(InvalidArgument) for negative
// inputs or a non-positive rate denominator.
VatBreakdown compute_vat(std::span<const LineItem> items, const VatRate& rate);

}  // namespace fakturchain::chaincode
