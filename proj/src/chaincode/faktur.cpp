// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/chaincode/faktur.hpp"

#include <algorithm>
#include <cstdio>

#include "fakturchain/common/codec.hpp"
#include "fakturchain/common/error.hpp"

namespace fakturchain::chaincode {

using nlohmann::json;

namespace {

// Field tags in the body encoding.
enum Tag : std::uint8_t {
  kTagHeader = 0xF1,
  kTagNsfp = 0x01,
  kTagSeller = 0x02,
  kTagBuyer = 0x03,
  kTagDate = 0x04,
  kTagItems = 0x05,
  kTagBase = 0x06,
  kTagVat = 0x07,
};

void expect_tag(Decoder& dec, std::uint8_t tag) {
  if (dec.u8() != tag) throw Error(Errc::Malformed, "faktur field tag");
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

Date Date::parse(std::string_view text) {
  Date d;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error(Errc::InvalidArgument, "date must be YYYY-MM-DD");
  }
  auto num = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') {
        throw Error(Errc::InvalidArgument, "date must be YYYY-MM-DD");
      }
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  d.year = num(0, 4);
  d.month = num(5, 2);
  d.day = num(8, 2);
  if (!d.valid()) throw Error(Errc::InvalidArgument, "no such calendar date");
  return d;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

bool Date::valid() const {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (year < 1 || year > 9999 || month < 1 || month > 12 || day < 1) return false;
  int limit = kDays[month - 1] + (month == 2 && is_leap(year) ? 1 : 0);
  return day <= limit;
}

Bytes Faktur::body_bytes() const {
  Encoder enc;
  enc.u8(kTagHeader);
  enc.u8(kTagNsfp).str(nsfp.digits());
  enc.u8(kTagSeller).str(seller_org);
  enc.u8(kTagBuyer).str(buyer_tax_id);
  enc.u8(kTagDate)
      .u16(static_cast<std::uint16_t>(transaction_date.year))
      .u8(static_cast<std::uint8_t>(transaction_date.month))
      .u8(static_cast<std::uint8_t>(transaction_date.day));
  enc.u8(kTagItems).u32(static_cast<std::uint32_t>(line_items.size()));
  for (const auto& item : line_items) {
    enc.str(item.description).i64(item.quantity.scaled()).i64(item.unit_price);
  }
  enc.u8(kTagBase).i64(tax_base);
  enc.u8(kTagVat).i64(vat_amount);
  return enc.take();
}

Faktur& Faktur::seal() {
  faktur_hash = compute_hash();
  return *this;
}

Faktur Faktur::decode_body(ByteView body) {
  Decoder dec(body);
  Faktur f;
  try {
    expect_tag(dec, kTagHeader);
    expect_tag(dec, kTagNsfp);
    f.nsfp = NsfpSerial::parse(dec.str());
    expect_tag(dec, kTagSeller);
    f.seller_org = dec.str();
    expect_tag(dec, kTagBuyer);
    f.buyer_tax_id = dec.str();
    expect_tag(dec, kTagDate);
    f.transaction_date.year = dec.u16();
    f.transaction_date.month = dec.u8();
    f.transaction_date.day = dec.u8();
    expect_tag(dec, kTagItems);
    auto n = dec.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      LineItem item;
      item.description = dec.str();
      item.quantity = Quantity::from_scaled(dec.i64());
      item.unit_price = dec.i64();
      f.line_items.push_back(std::move(item));
    }
    expect_tag(dec, kTagBase);
    f.tax_base = dec.i64();
    expect_tag(dec, kTagVat);
    f.vat_amount = dec.i64();
    dec.expect_done();
  } catch (const Error& e) {
    throw Error(Errc::Malformed, std::string("faktur body: ") + e.what());
  }
  f.faktur_hash = Digest::of(body);
  return f;
}

json Faktur::to_json() const {
  json items = json::array();
  for (const auto& item : line_items) {
    items.push_back({{"description", item.description},
                     {"quantity", item.quantity.to_string()},
                     {"unit_price", item.unit_price}});
  }
  json j{{"nsfp", nsfp.formatted()},
         {"seller_org", seller_org},
         {"buyer_tax_id", buyer_tax_id},
         {"transaction_date", transaction_date.to_string()},
         {"line_items", items},
         {"tax_base", tax_base},
         {"vat_amount", vat_amount}};
  if (!faktur_hash.is_zero()) j["faktur_hash"] = faktur_hash.hex();
  return j;
}

Faktur Faktur::from_json(const json& j) {
  try {
    Faktur f;
    f.nsfp = NsfpSerial::parse(j.at("nsfp").get<std::string>());
    f.seller_org = j.value("seller_org", std::string{});
    f.buyer_tax_id = j.at("buyer_tax_id").get<std::string>();
    f.transaction_date = Date::parse(j.at("transaction_date").get<std::string>());
    for (const auto& item : j.at("line_items")) {
      LineItem li;
      li.description = item.at("description").get<std::string>();
      const auto& q = item.at("quantity");
      li.quantity = q.is_string() ? Quantity::parse(q.get<std::string>())
                                  : Quantity::units(q.get<std::int64_t>());
      li.unit_price = item.at("unit_price").get<Rupiah>();
      if (li.unit_price < 0) {
        throw Error(Errc::InvalidArgument, "negative unit price");
      }
      f.line_items.push_back(std::move(li));
    }
    f.tax_base = j.at("tax_base").get<Rupiah>();
    f.vat_amount = j.at("vat_amount").get<Rupiah>();
    if (j.contains("faktur_hash")) {
      f.faktur_hash = Digest::from_hex(j.at("faktur_hash").get<std::string>());
    }
    return f;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("faktur: ") + e.what());
  }
}

bool ValidationResult::has_reason(std::string_view code) const {
  return std::find(reasons.begin(), reasons.end(), code) != reasons.end();
}

json ValidationResult::to_json() const {
  json j{{"accepted", accepted}, {"reasons", reasons}};
  if (anchored_hash) j["anchored_hash"] = anchored_hash->hex();
  return j;
}

}  // namespace fakturchain::chaincode
