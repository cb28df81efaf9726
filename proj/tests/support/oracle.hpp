// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

// Exact-rational reference for the VAT arithmetic and the faktur acceptance
// rules, plus the randomized trials that compare the chaincode against it.
// Written from the rules, sharing no code with the chaincode beyond the
// data types.

#pragma once

#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fakturchain/chaincode/chaincode.hpp"
#include "fakturchain/common/error.hpp"
#include "fakturchain/identity/identity.hpp"
#include "fakturchain/ledger/world_state.hpp"
#include "fixtures.hpp"

namespace fakturchain::testing {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

inline cpp_int round_half_up(const cpp_rational& r) {
  cpp_rational shifted = r + cpp_rational(1, 2);
  return cpp_int(numerator(shifted) / denominator(shifted));
}

struct OracleVat {
  bool overflow = false;
  cpp_int base, vat;
};

inline OracleVat oracle_vat(const std::vector<chaincode::LineItem>& items, const chaincode::VatRate& rate) {
  OracleVat out;
  cpp_rational sum = 0;
  for (const auto& it : items) {
    cpp_rational q(cpp_int(it.quantity.scaled()), cpp_int(chaincode::Quantity::kScale));
    sum += q * cpp_int(it.unit_price);
  }
  out.base = round_half_up(sum);
  out.vat = round_half_up(cpp_rational(out.base) * cpp_rational(rate.num, rate.den));
  out.overflow = out.base > cpp_int(chaincode::kMaxRupiah) || out.vat > cpp_int(chaincode::kMaxRupiah);
  return out;
}

// Independent decision procedure for post_faktur.
inline bool oracle_accepts(const ledger::WorldState& s, const identity::Certificate& caller,
                           const chaincode::Faktur& f, LogicalTime now) {
  using namespace chaincode;
  if (caller.org_role != identity::OrgRole::PKP || s.cert_revocations.contains(caller.cert_id)) return false;
  if (now < caller.issued_at || now >= caller.expires_at) return false;
  if (f.seller_org != caller.subject) return false;
  const NsfpAllocation* owner = nullptr;
  std::size_t pos = 0;
  for (const auto& [id, alloc] : s.allocations)
    for (std::size_t i = 0; i < alloc.serials.size(); ++i)
      if (alloc.serials[i] == f.nsfp) owner = &alloc, pos = i;
  if (!owner || owner->owner_org != caller.subject) return false;
  if (owner->statuses[pos] != SerialStatus::Available) return false;
  if (f.line_items.empty()) return false;
  for (const auto& li : f.line_items)
    if (li.unit_price < 0 || li.unit_price > kMaxRupiah) return false;
  auto o = oracle_vat(f.line_items, {11, 100});
  if (o.overflow || o.base != cpp_int(f.tax_base) || o.vat != cpp_int(f.vat_amount)) return false;
  static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const auto& d = f.transaction_date;
  bool leap = (d.year % 4 == 0 && d.year % 100 != 0) || d.year % 400 == 0;
  if (d.month < 1 || d.month > 12 || d.day < 1) return false;
  if (d.day > kDays[d.month - 1] + (d.month == 2 && leap ? 1 : 0)) return false;
  if (d.year % 100 != f.nsfp.year_suffix()) return false;
  return f.faktur_hash == Digest::of(f.body_bytes());
}

// compute_vat against the oracle on `n` random invoices, including rates
// other than 11% and prices large enough to overflow.
inline int vat_mismatches(int n, std::uint64_t seed) {
  using namespace chaincode;
  std::mt19937_64 rng(seed);
  int mismatches = 0;
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<int> n_items(1, 8);
    std::uniform_int_distribution<std::int64_t> qty(0, 5'000'000);  // up to 500 units, 4 decimals
    std::uniform_int_distribution<std::int64_t> price(0, i % 10 == 0 ? 4'000'000'000'000'000 : 50'000'000);
    std::uniform_int_distribution<std::int64_t> num(0, 40);
    std::vector<LineItem> items;
    for (int k = n_items(rng); k > 0; --k) items.push_back({"i", Quantity::from_scaled(qty(rng)), price(rng)});
    VatRate rate{num(rng), i % 3 == 0 ? 100 : 1000};
    auto o = oracle_vat(items, rate);
    try {
      auto got = compute_vat(items, rate);
      if (o.overflow || cpp_int(got.tax_base) != o.base || cpp_int(got.vat_amount) != o.vat) ++mismatches;
    } catch (const Error& e) {
      if (!(e.code() == Errc::Overflow && o.overflow)) ++mismatches;
    }
  }
  return mismatches;
}

// A DJP, two PKPs and a chaincode context for driving post_faktur directly.
struct OracleBench {
  identity::CertificateAuthority ca{"DJP", crypto::KeyPair::from_seed(Digest::of("root"))};
  identity::Certificate alpha = issue("PT Alpha", identity::OrgRole::PKP);
  identity::Certificate beta = issue("PT Beta", identity::OrgRole::PKP);
  identity::Certificate djp = issue("DJP", identity::OrgRole::DJP);
  chaincode::ChaincodeConfig config;
  chaincode::TxContext ctx{10, Digest::of("tx"), 1};

  identity::Certificate issue(const std::string& who, identity::OrgRole role) {
    return ca.issue_certificate(who, role, crypto::KeyPair::from_seed(Digest::of(who)).public_key(),
                                {0, 1'000'000}, {});
  }
  ledger::WorldState with_serials(ledger::WorldState s, const identity::Certificate& c, int year, int n) {
    chaincode::issue_nsfp(s, c, year, n, config, ctx);
    s.seal();
    return s;
  }
};

struct DecisionTrial {
  int invoices = 0;
  int mismatches = 0;
  int accepted = 0;
  // Accepted without an anchor, or rejected without a reason.
  int malformed_results = 0;
  std::vector<std::string> first_mismatches;
};

// post_faktur accept/reject against oracle_accepts on `n` random invoices
// mixing valid ones with wrong callers, foreign and used serials, off-by-one
// arithmetic, bad dates and stale hashes.
inline DecisionTrial decision_trial(int n, std::uint64_t seed) {
  using namespace chaincode;
  OracleBench b;
  auto s = b.with_serials({}, b.alpha, 2025, 40);
  s = b.with_serials(s, b.beta, 2025, 40);
  s = b.with_serials(s, b.alpha, 2024, 10);
  // Use up a few of Alpha's serials so duplicates are possible.
  for (int i = 0; i < 10; ++i) {
    auto serial = available_serials_of(s, "PT Alpha", 2025).front();
    s = post_faktur(s, b.alpha, simple_faktur(serial, "PT Alpha", 1000 + i), b.config, b.ctx).state;
  }
  std::vector<NsfpSerial> pool;
  for (const auto& [id, alloc] : s.allocations) pool.insert(pool.end(), alloc.serials.begin(), alloc.serials.end());
  pool.push_back(NsfpSerial::make("01", '0', "000", 25, 9'000'000));

  std::mt19937_64 rng(seed);
  auto pick = [&](int k) { return std::uniform_int_distribution<int>(0, k - 1)(rng); };
  DecisionTrial t;
  for (int i = 0; i < n; ++i) {
    Faktur f;
    f.nsfp = pool[pick(static_cast<int>(pool.size()))];
    const identity::Certificate& caller = pick(2) ? b.alpha : (pick(5) ? b.beta : b.djp);
    f.seller_org = pick(8) ? caller.subject : std::string("PT Gamma");
    f.buyer_tax_id = "0123456789012" + std::to_string(pick(100));
    f.transaction_date = {pick(6) ? 2025 : 2024, 1 + pick(12), 1 + pick(31)};
    for (int k = pick(5); k >= 0 && pick(12); --k)
      f.line_items.push_back({"barang " + std::to_string(k), Quantity::from_scaled(pick(300'000)),
                              static_cast<Rupiah>(pick(2'000'000))});
    auto o = oracle_vat(f.line_items, {11, 100});
    f.tax_base = static_cast<Rupiah>(o.base) + (pick(6) ? 0 : pick(3) - 1);
    f.vat_amount = static_cast<Rupiah>(o.vat) + (pick(6) ? 0 : pick(3) - 1);
    f.seal();
    if (!pick(15)) f.faktur_hash = Digest::of("tampered " + std::to_string(i));

    bool expect = oracle_accepts(s, caller, f, b.ctx.now);
    auto got = post_faktur(s, caller, f, b.config, b.ctx).result;
    ++t.invoices;
    if (got.accepted != expect) {
      ++t.mismatches;
      if (t.first_mismatches.size() < 5)
        t.first_mismatches.push_back("invoice " + std::to_string(i) + " oracle=" + std::to_string(expect) +
                                     " got=" + got.to_json().dump());
    }
    if (got.accepted) {
      ++t.accepted;
      if (!got.anchored_hash) ++t.malformed_results;
    } else if (got.reasons.empty()) {
      ++t.malformed_results;
    }
  }
  return t;
}

// Duplicate-serial and foreign-NSFP submissions; counts the cases rejected
// with the expected reason and no state change.
inline int adversarial_rejections(int n, std::uint64_t seed) {
  using namespace chaincode;
  OracleBench b;
  auto s = b.with_serials({}, b.alpha, 2025, 100);
  s = b.with_serials(s, b.beta, 2025, 100);
  std::vector<NsfpSerial> used;
  for (int i = 0; i < 50; ++i) {
    auto serial = available_serials_of(s, "PT Alpha").front();
    s = post_faktur(s, b.alpha, simple_faktur(serial, "PT Alpha", 100 + i), b.config, b.ctx).state;
    used.push_back(serial);
  }
  auto alpha_free = available_serials_of(s, "PT Alpha");
  std::mt19937_64 rng(seed);
  int rejected = 0;
  for (int i = 0; i < n; ++i) {
    Faktur f;
    const identity::Certificate* caller = &b.alpha;
    std::string want;
    switch (i % 4) {
      case 0:  // owner reuses a used serial with a fresh body
        f = simple_faktur(used[rng() % used.size()], "PT Alpha", 7 + i);
        want = "duplicate";
        break;
      case 1:  // another PKP claims a free serial it does not own
        f = simple_faktur(alpha_free[rng() % alpha_free.size()], "PT Beta", 7 + i);
        caller = &b.beta;
        want = "ownership";
        break;
      case 2:  // another PKP replays a used serial
        f = simple_faktur(used[rng() % used.size()], "PT Beta", 7 + i);
        caller = &b.beta;
        want = "ownership";
        break;
      default:  // impersonation: seller field names the owner, caller is not
        f = simple_faktur(alpha_free[rng() % alpha_free.size()], "PT Alpha", 7 + i);
        caller = &b.beta;
        want = "ownership";
        break;
    }
    auto r = post_faktur(s, *caller, f, b.config, b.ctx);
    if (!r.result.accepted && r.result.has_reason(want) && r.state == s) ++rejected;
  }
  return rejected;
}

}  // namespace fakturchain::testing
