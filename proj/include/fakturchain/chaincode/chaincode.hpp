// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakturchain/chaincode/faktur.hpp"
#include "fakturchain/chaincode/money.hpp"
#include "fakturchain/chaincode/nsfp.hpp"
#include "fakturchain/identity/identity.hpp"
#include "fakturchain/ledger/envelope.hpp"
#include "fakturchain/ledger/membership.hpp"
#include "fakturchain/ledger/world_state.hpp"

namespace fakturchain::chaincode {

struct ChaincodeConfig {
  VatRate vat_rate{11, 100};
  std::uint32_t annual_quota = 1000;
  std::uint32_t per_request_cap = 100;
  int min_tax_year = 2000;
  int max_tax_year = 2099;
  std::string transaction_code = "01";
  char status_digit = '0';
  std::string branch_code = "000";
  // Receiver of every private faktur exchange.
  std::string authority_org = "DJP";

  nlohmann::json to_json() const;
  static ChaincodeConfig from_json(const nlohmann::json& j);
};

struct TxContext {
  LogicalTime now = 0;
  Digest tx_id;
  std::uint64_t block_number = 0;
};

// --- public invocation arguments carried in TransactionEnvelope::args ---

struct NsfpRequestArgs {
  int tax_year = 0;
  std::uint32_t count = 0;

  Bytes encode() const;
  static NsfpRequestArgs decode(ByteView bytes);
};

// DJP's signature over the validated faktur's anchor.
struct Endorsement {
  std::string endorser_cert_id;
  Bytes signature;
};

// On-chain part of a PostFaktur: the serial (numeric form), the invoice
// year and DJP's endorsement. The faktur hash is the envelope's anchor.
struct FakturCommitment {
  std::uint64_t nsfp_number = 0;
  int transaction_year = 0;
  Endorsement endorsement;

  Bytes encode() const;
  static FakturCommitment decode(ByteView bytes);

  static Bytes endorsement_message(const Digest& faktur_hash,
                                   std::uint64_t nsfp_number,
                                   int transaction_year,
                                   std::string_view seller_org);
};

struct RevokeArgs {
  std::string cert_id;
  std::string reason;
  bool revoke_serials = false;

  Bytes encode() const;
  static RevokeArgs decode(ByteView bytes);
};

// Audit record of a detection, response or recovery step.
struct ScenarioEventArgs {
  std::string scenario;
  std::string phase;  // "detect" | "respond" | "recover"
  std::string subject;
  std::string detail;
  std::uint64_t trace_ref = 0;
  Digest related;

  Bytes encode() const;
  static ScenarioEventArgs decode(ByteView bytes);
  nlohmann::json to_json() const;
};

// --- operations ---

// Reason the caller may not transact, if any (role, revocation, expiry).
std::optional<std::string> eligibility_problem(const ledger::WorldState& state,
                                               const identity::Certificate& caller,
                                               LogicalTime now);

struct NsfpIssue {
  ledger::WorldState state;
  NsfpAllocation allocation;
};

// Issues `count` fresh consecutive serials. Throws BadCount, BadYear,
// NotEligible (cert or quota) or Overflow (sequence space exhausted).
NsfpIssue post_nsfp(const ledger::WorldState& state,
                    const identity::Certificate& caller, int tax_year,
                    int count, const ChaincodeConfig& config,
                    const TxContext& ctx = {});
// In-place form with the strong exception guarantee.
NsfpAllocation issue_nsfp(ledger::WorldState& state,
                          const identity::Certificate& caller, int tax_year,
                          int count, const ChaincodeConfig& config,
                          const TxContext& ctx);

struct FakturOutcome {
  ledger::WorldState state;
  ValidationResult result;
};

// Full validation of a faktur body: ownership, serial availability,
// arithmetic, year and hash. Rejections leave the state unchanged and list
// every failed check.
FakturOutcome post_faktur(const ledger::WorldState& state,
                          const identity::Certificate& caller,
                          const Faktur& faktur, const ChaincodeConfig& config,
                          const TxContext& ctx = {});
ValidationResult validate_faktur(ledger::WorldState& state,
                                 const identity::Certificate& caller,
                                 const Faktur& faktur,
                                 const ChaincodeConfig& config,
                                 const TxContext& ctx, bool commit);

// Apply-time validation of a committed PostFaktur, using only public data:
// serial ownership and availability, year, DJP endorsement and visibility.
ValidationResult commit_faktur(ledger::WorldState& state,
                               const identity::Certificate& caller,
                               const ledger::TransactionEnvelope& env,
                               const ledger::Membership& membership,
                               const TxContext& ctx);

ValidationResult apply_revocation(ledger::WorldState& state,
                                  const identity::Certificate& caller,
                                  const RevokeArgs& args,
                                  const ledger::Membership& membership,
                                  const TxContext& ctx);

ValidationResult record_event(ledger::WorldState& state,
                              const ledger::TransactionEnvelope& env,
                              const TxContext& ctx);

struct NsfpFilter {
  std::optional<std::string> owner;
  std::optional<int> tax_year;
  std::optional<SerialStatus> status;  // allocations holding such a serial
};

// Broadcast data: any PKP or DJP caller sees every matching allocation.
// Throws Forbidden for other roles.
std::vector<NsfpAllocation> get_nsfp(const ledger::WorldState& state,
                                     const identity::Certificate& caller,
                                     const NsfpFilter& filter = {});

struct FakturFilter {
  std::optional<NsfpSerial> nsfp;
  std::optional<std::string> seller;
};

struct FakturView {
  NsfpSerial nsfp;
  ledger::FakturIndexEntry entry;
  std::optional<Bytes> payload;
};

using PayloadResolver = std::function<std::optional<Bytes>(const Digest&)>;

// DJP sees every entry; a PKP only the fakturs it sold. Payloads come from
// `resolver` (the caller's off-chain store) when supplied.
std::vector<FakturView> get_faktur(const ledger::WorldState& state,
                                   const identity::Certificate& caller,
                                   const FakturFilter& filter = {},
                                   const PayloadResolver& resolver = {});

}  // namespace fakturchain::chaincode
