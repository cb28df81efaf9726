// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "fakturchain/chaincode/chaincode.hpp"
#include "fakturchain/netsim/network.hpp"

namespace fakturchain::testing {

inline chaincode::Faktur make_faktur(const chaincode::NsfpSerial& serial,
                                     const std::string& seller,
                                     std::vector<chaincode::LineItem> items,
                                     int year = 2025,
                                     const std::string& buyer = "012345678901234") {
  chaincode::Faktur f;
  f.nsfp = serial;
  f.seller_org = seller;
  f.buyer_tax_id = buyer;
  f.transaction_date = {year, 3, 14};
  f.line_items = std::move(items);
  auto vat = chaincode::compute_vat(f.line_items, chaincode::VatRate{11, 100});
  f.tax_base = vat.tax_base;
  f.vat_amount = vat.vat_amount;
  f.seal();
  return f;
}

inline chaincode::Faktur simple_faktur(const chaincode::NsfpSerial& serial,
                                       const std::string& seller, chaincode::Rupiah price = 150000,
                                       int year = 2025) {
  return make_faktur(serial, seller,
                     {{"Kertas A4", chaincode::Quantity::units(3), price},
                      {"Tinta", chaincode::Quantity::parse("1.5"), 42000}},
                     year);
}

// Serials of `org` that are still Available at its own node.
inline std::vector<chaincode::NsfpSerial> available_serials(const netsim::OrgNode& n,
                                                            int year = 2025) {
  std::vector<chaincode::NsfpSerial> out;
  for (const auto& [id, alloc] : n.state.allocations) {
    if (alloc.owner_org != n.org || alloc.tax_year != year) continue;
    for (std::size_t i = 0; i < alloc.serials.size(); ++i)
      if (alloc.statuses[i] == chaincode::SerialStatus::Available)
        out.push_back(alloc.serials[i]);
  }
  return out;
}

// Same, read straight from a world state.
inline std::vector<chaincode::NsfpSerial> available_serials_of(const ledger::WorldState& s,
                                                               const std::string& org,
                                                               int year = 2025) {
  std::vector<chaincode::NsfpSerial> out;
  for (const auto& [id, alloc] : s.allocations) {
    if (alloc.owner_org != org || alloc.tax_year != year) continue;
    for (std::size_t i = 0; i < alloc.serials.size(); ++i)
      if (alloc.statuses[i] == chaincode::SerialStatus::Available)
        out.push_back(alloc.serials[i]);
  }
  return out;
}

}  // namespace fakturchain::testing
