// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/chaincode/chaincode.hpp"

#include <algorithm>
#include <cstdio>

#include "fakturchain/common/codec.hpp"
#include "fakturchain/common/error.hpp"

namespace fakturchain::chaincode {

using identity::Certificate;
using identity::OrgRole;
using ledger::WorldState;
using nlohmann::json;

json ChaincodeConfig::to_json() const {
  return {{"vat_rate", {vat_rate.num, vat_rate.den}},
          {"annual_quota", annual_quota},
          {"per_request_cap", per_request_cap},
          {"min_tax_year", min_tax_year},
          {"max_tax_year", max_tax_year},
          {"transaction_code", transaction_code},
          {"status_digit", std::string(1, status_digit)},
          {"branch_code", branch_code},
          {"authority_org", authority_org}};
}

ChaincodeConfig ChaincodeConfig::from_json(const json& j) {
  ChaincodeConfig c;
  try {
    if (j.contains("vat_rate")) {
      c.vat_rate = {j["vat_rate"].at(0).get<std::int64_t>(),
                    j["vat_rate"].at(1).get<std::int64_t>()};
    }
    c.annual_quota = j.value("annual_quota", c.annual_quota);
    c.per_request_cap = j.value("per_request_cap", c.per_request_cap);
    c.min_tax_year = j.value("min_tax_year", c.min_tax_year);
    c.max_tax_year = j.value("max_tax_year", c.max_tax_year);
    c.transaction_code = j.value("transaction_code", c.transaction_code);
    auto status = j.value("status_digit", std::string(1, c.status_digit));
    if (status.size() != 1) throw Error(Errc::BadConfig, "status_digit");
    c.status_digit = status[0];
    c.branch_code = j.value("branch_code", c.branch_code);
    c.authority_org = j.value("authority_org", c.authority_org);
  } catch (const json::exception& e) {
    throw Error(Errc::BadConfig, std::string("chaincode config: ") + e.what());
  }
  if (c.vat_rate.den <= 0 || c.vat_rate.num < 0 ||
      c.min_tax_year > c.max_tax_year || c.per_request_cap == 0) {
    throw Error(Errc::BadConfig, "chaincode config out of range");
  }
  return c;
}

// --- argument codecs ---

Bytes NsfpRequestArgs::encode() const {
  Encoder enc;
  enc.u8(0xA1).i64(tax_year).u32(count);
  return enc.take();
}

NsfpRequestArgs NsfpRequestArgs::decode(ByteView bytes) {
  Decoder dec(bytes);
  if (dec.u8() != 0xA1) throw Error(Errc::Malformed, "nsfp args tag");
  NsfpRequestArgs a;
  a.tax_year = static_cast<int>(dec.i64());
  a.count = dec.u32();
  dec.expect_done();
  return a;
}

Bytes FakturCommitment::encode() const {
  Encoder enc;
  enc.u8(0xA2)
      .u64(nsfp_number)
      .u16(static_cast<std::uint16_t>(transaction_year))
      .str(endorsement.endorser_cert_id)
      .bytes(endorsement.signature);
  return enc.take();
}

FakturCommitment FakturCommitment::decode(ByteView bytes) {
  Decoder dec(bytes);
  if (dec.u8() != 0xA2) throw Error(Errc::Malformed, "faktur args tag");
  FakturCommitment c;
  c.nsfp_number = dec.u64();
  c.transaction_year = dec.u16();
  c.endorsement.endorser_cert_id = dec.str();
  c.endorsement.signature = dec.bytes();
  dec.expect_done();
  return c;
}

Bytes FakturCommitment::endorsement_message(const Digest& faktur_hash,
                                            std::uint64_t nsfp_number,
                                            int transaction_year,
                                            std::string_view seller_org) {
  Encoder enc;
  enc.str("fakturchain/endorse/v1")
      .digest(faktur_hash)
      .u64(nsfp_number)
      .u16(static_cast<std::uint16_t>(transaction_year))
      .str(seller_org);
  return enc.take();
}

Bytes RevokeArgs::encode() const {
  Encoder enc;
  enc.u8(0xA3).str(cert_id).str(reason).boolean(revoke_serials);
  return enc.take();
}

RevokeArgs RevokeArgs::decode(ByteView bytes) {
  Decoder dec(bytes);
  if (dec.u8() != 0xA3) throw Error(Errc::Malformed, "revoke args tag");
  RevokeArgs a;
  a.cert_id = dec.str();
  a.reason = dec.str();
  a.revoke_serials = dec.boolean();
  dec.expect_done();
  return a;
}

Bytes ScenarioEventArgs::encode() const {
  Encoder enc;
  enc.u8(0xA4)
      .str(scenario)
      .str(phase)
      .str(subject)
      .str(detail)
      .u64(trace_ref)
      .digest(related);
  return enc.take();
}

ScenarioEventArgs ScenarioEventArgs::decode(ByteView bytes) {
  Decoder dec(bytes);
  if (dec.u8() != 0xA4) throw Error(Errc::Malformed, "event args tag");
  ScenarioEventArgs a;
  a.scenario = dec.str();
  a.phase = dec.str();
  a.subject = dec.str();
  a.detail = dec.str();
  a.trace_ref = dec.u64();
  a.related = dec.digest();
  dec.expect_done();
  return a;
}

json ScenarioEventArgs::to_json() const {
  return {{"scenario", scenario}, {"phase", phase},         {"subject", subject},
          {"detail", detail},     {"trace_ref", trace_ref}, {"related", related.hex()}};
}

// --- operations ---

std::optional<std::string> eligibility_problem(const WorldState& state,
                                               const Certificate& caller,
                                               LogicalTime now) {
  if (caller.org_role != OrgRole::PKP) return "caller is not a PKP";
  if (state.cert_revocations.contains(caller.cert_id)) {
    return "certificate " + caller.cert_id + " is revoked";
  }
  if (now < caller.issued_at || now >= caller.expires_at) {
    return "certificate " + caller.cert_id + " is not valid at this time";
  }
  return std::nullopt;
}

NsfpAllocation issue_nsfp(WorldState& state, const Certificate& caller,
                          int tax_year, int count, const ChaincodeConfig& config,
                          const TxContext& ctx) {
  if (count < 1 || static_cast<std::uint32_t>(count) > config.per_request_cap) {
    throw Error(Errc::BadCount, "count must be in [1, " +
                                    std::to_string(config.per_request_cap) + "]");
  }
  if (tax_year < config.min_tax_year || tax_year > config.max_tax_year) {
    throw Error(Errc::BadYear, "tax year " + std::to_string(tax_year) +
                                   " outside configured window");
  }
  if (auto problem = eligibility_problem(state, caller, ctx.now)) {
    throw Error(Errc::NotEligible, *problem);
  }
  auto quota_key = std::make_pair(caller.subject, tax_year);
  auto used_it = state.quota_used.find(quota_key);
  std::uint32_t used = used_it == state.quota_used.end() ? 0 : used_it->second;
  if (used + static_cast<std::uint32_t>(count) > config.annual_quota) {
    throw Error(Errc::NotEligible,
                "annual quota exhausted (" + std::to_string(used) + " of " +
                    std::to_string(config.annual_quota) + " used)");
  }
  if (state.next_sequence + static_cast<std::uint64_t>(count) - 1 >
      NsfpSerial::kMaxSequence) {
    throw Error(Errc::Overflow, "NSFP sequence space exhausted");
  }

  NsfpAllocation alloc;
  char id[32];
  std::snprintf(id, sizeof id, "ALLOC-%08llu",
                static_cast<unsigned long long>(state.next_allocation));
  alloc.allocation_id = id;
  alloc.owner_org = caller.subject;
  alloc.tax_year = tax_year;
  alloc.issued_tx_id = ctx.tx_id;
  for (int i = 0; i < count; ++i) {
    alloc.serials.push_back(NsfpSerial::make(
        config.transaction_code, config.status_digit, config.branch_code,
        tax_year % 100, state.next_sequence + static_cast<std::uint64_t>(i)));
    alloc.statuses.push_back(SerialStatus::Available);
  }

  // No throws past this point.
  for (std::uint32_t i = 0; i < alloc.serials.size(); ++i) {
    state.serial_index[alloc.serials[i]] = {alloc.allocation_id, i};
  }
  state.next_sequence += static_cast<std::uint64_t>(count);
  state.next_allocation += 1;
  state.quota_used[quota_key] = used + static_cast<std::uint32_t>(count);
  state.allocations[alloc.allocation_id] = alloc;
  return alloc;
}

NsfpIssue post_nsfp(const WorldState& state, const Certificate& caller,
                    int tax_year, int count, const ChaincodeConfig& config,
                    const TxContext& ctx) {
  WorldState next = state;
  auto alloc = issue_nsfp(next, caller, tax_year, count, config, ctx);
  next.seal();
  return {std::move(next), std::move(alloc)};
}

namespace {

void add_reason(std::vector<std::string>& reasons, std::string_view code) {
  if (std::find(reasons.begin(), reasons.end(), code) == reasons.end()) {
    reasons.emplace_back(code);
  }
}

// Serial existence, ownership and availability checks shared by the full
// and the apply-time validation.
void check_serial(const WorldState& state, const NsfpSerial& serial,
                  std::string_view owner, std::vector<std::string>& reasons) {
  auto status = state.status_of(serial);
  if (!status) {
    add_reason(reasons, reason::kUnknownNsfp);
    return;
  }
  if (state.allocation_of(serial)->owner_org != owner) {
    add_reason(reasons, reason::kOwnership);
  }
  if (*status == SerialStatus::Used) add_reason(reasons, reason::kDuplicate);
  if (*status == SerialStatus::Revoked) {
    add_reason(reasons, reason::kSerialRevoked);
  }
}

void mark_used(WorldState& state, const NsfpSerial& serial,
               ledger::FakturIndexEntry entry) {
  state.set_status(serial, SerialStatus::Used);
  state.faktur_index[serial] = std::move(entry);
}

}  // namespace

ValidationResult validate_faktur(WorldState& state, const Certificate& caller,
                                 const Faktur& faktur,
                                 const ChaincodeConfig& config,
                                 const TxContext& ctx, bool commit) {
  ValidationResult result;
  auto& reasons = result.reasons;
  if (eligibility_problem(state, caller, ctx.now)) {
    add_reason(reasons, reason::kNotEligible);
  }
  if (faktur.seller_org != caller.subject) add_reason(reasons, reason::kOwnership);
  check_serial(state, faktur.nsfp, caller.subject, reasons);

  bool arithmetic_ok = !faktur.line_items.empty();
  if (arithmetic_ok) {
    try {
      auto expected = compute_vat(faktur.line_items, config.vat_rate);
      arithmetic_ok = expected.tax_base == faktur.tax_base &&
                      expected.vat_amount == faktur.vat_amount;
    } catch (const Error&) {
      arithmetic_ok = false;
    }
  }
  if (!arithmetic_ok) add_reason(reasons, reason::kArithmetic);

  if (!faktur.transaction_date.valid() ||
      faktur.transaction_date.year % 100 != faktur.nsfp.year_suffix()) {
    add_reason(reasons, reason::kYearMismatch);
  }
  if (faktur.faktur_hash != faktur.compute_hash()) {
    add_reason(reasons, reason::kHashMismatch);
  }

  result.accepted = reasons.empty();
  if (result.accepted) {
    result.anchored_hash = faktur.faktur_hash;
    if (commit) {
      mark_used(state, faktur.nsfp,
                {faktur.faktur_hash, caller.subject, config.authority_org,
                 ctx.tx_id, ctx.block_number});
    }
  }
  return result;
}

FakturOutcome post_faktur(const WorldState& state, const Certificate& caller,
                          const Faktur& faktur, const ChaincodeConfig& config,
                          const TxContext& ctx) {
  FakturOutcome out{state, {}};
  out.result = validate_faktur(out.state, caller, faktur, config, ctx, true);
  if (out.result.accepted) out.state.seal();
  return out;
}

ValidationResult commit_faktur(WorldState& state, const Certificate& caller,
                               const ledger::TransactionEnvelope& env,
                               const ledger::Membership& membership,
                               const TxContext& ctx) {
  ValidationResult result;
  auto& reasons = result.reasons;
  FakturCommitment commitment;
  NsfpSerial serial;
  try {
    commitment = FakturCommitment::decode(env.args);
    serial = NsfpSerial::from_number(commitment.nsfp_number);
  } catch (const Error&) {
    reasons.emplace_back(reason::kMalformed);
    return result;
  }
  if (env.payload_anchor.kind != ledger::PayloadAnchor::Kind::PayloadHash) {
    add_reason(reasons, reason::kMalformed);
  }
  if (eligibility_problem(state, caller, ctx.now)) {
    add_reason(reasons, reason::kNotEligible);
  }
  check_serial(state, serial, caller.subject, reasons);
  if (commitment.transaction_year % 100 != serial.year_suffix()) {
    add_reason(reasons, reason::kYearMismatch);
  }

  const auto* endorser = membership.find(commitment.endorsement.endorser_cert_id);
  bool endorsed = false;
  if (endorser != nullptr) {
    auto message = FakturCommitment::endorsement_message(
        env.payload_anchor.digest, commitment.nsfp_number,
        commitment.transaction_year, caller.subject);
    endorsed = endorser->org_role == OrgRole::DJP &&
               identity::verify_signature(*endorser, message,
                                          commitment.endorsement.signature,
                                          state.cert_revocations, ctx.now,
                                          membership.root_key())
                   .allowed;
  }
  if (!endorsed) add_reason(reasons, reason::kEndorsement);
  if (!env.visibility.is_private() || env.visibility.sender() != caller.subject ||
      endorser == nullptr || env.visibility.receiver() != endorser->subject) {
    add_reason(reasons, reason::kVisibility);
  }

  result.accepted = reasons.empty();
  if (result.accepted) {
    result.anchored_hash = env.payload_anchor.digest;
    mark_used(state, serial,
              {env.payload_anchor.digest, caller.subject, endorser->subject,
               ctx.tx_id, ctx.block_number});
  }
  return result;
}

ValidationResult apply_revocation(WorldState& state, const Certificate& caller,
                                  const RevokeArgs& args,
                                  const ledger::Membership& membership,
                                  const TxContext& ctx) {
  ValidationResult result;
  if (caller.org_role != OrgRole::DJP ||
      state.cert_revocations.contains(caller.cert_id)) {
    result.reasons.emplace_back(reason::kUnauthorized);
    return result;
  }
  const auto* target = membership.find(args.cert_id);
  if (target == nullptr) {
    result.reasons.emplace_back(reason::kUnknownCert);
    return result;
  }
  if (state.cert_revocations.contains(args.cert_id)) {
    result.reasons.emplace_back(reason::kAlreadyRevoked);
    return result;
  }
  state.cert_revocations.add({args.cert_id, ctx.now, args.reason});
  if (args.revoke_serials) {
    for (auto& [id, alloc] : state.allocations) {
      if (alloc.owner_org != target->subject) continue;
      for (auto& st : alloc.statuses) {
        if (st == SerialStatus::Available) st = SerialStatus::Revoked;
      }
    }
  }
  result.accepted = true;
  return result;
}

ValidationResult record_event(WorldState& state,
                              const ledger::TransactionEnvelope& env,
                              const TxContext& ctx) {
  ValidationResult result;
  try {
    ScenarioEventArgs::decode(env.args);
  } catch (const Error&) {
    result.reasons.emplace_back(reason::kMalformed);
    return result;
  }
  state.audit_log.push_back({env.tx_id, ctx.block_number, env.args});
  result.accepted = true;
  return result;
}

std::vector<NsfpAllocation> get_nsfp(const WorldState& state,
                                     const Certificate& caller,
                                     const NsfpFilter& filter) {
  if (!identity::role_allows(caller.org_role, identity::Action::GetNsfp)) {
    throw Error(Errc::Forbidden, "role may not read NSFP allocations");
  }
  std::vector<NsfpAllocation> out;
  for (const auto& [id, alloc] : state.allocations) {
    if (filter.owner && alloc.owner_org != *filter.owner) continue;
    if (filter.tax_year && alloc.tax_year != *filter.tax_year) continue;
    if (filter.status &&
        std::find(alloc.statuses.begin(), alloc.statuses.end(),
                  *filter.status) == alloc.statuses.end()) {
      continue;
    }
    out.push_back(alloc);
  }
  return out;
}

std::vector<FakturView> get_faktur(const WorldState& state,
                                   const Certificate& caller,
                                   const FakturFilter& filter,
                                   const PayloadResolver& resolver) {
  if (!identity::role_allows(caller.org_role, identity::Action::GetFaktur)) {
    throw Error(Errc::Forbidden, "role may not read fakturs");
  }
  const bool sees_all = caller.org_role == OrgRole::DJP;
  std::vector<FakturView> out;
  for (const auto& [serial, entry] : state.faktur_index) {
    if (!sees_all && entry.seller_org != caller.subject) continue;
    if (filter.nsfp && serial != *filter.nsfp) continue;
    if (filter.seller && entry.seller_org != *filter.seller) continue;
    FakturView view{serial, entry, std::nullopt};
    if (resolver) view.payload = resolver(entry.faktur_hash);
    out.push_back(std::move(view));
  }
  return out;
}

}  // namespace fakturchain::chaincode
