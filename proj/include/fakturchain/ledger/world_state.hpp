// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fakturchain/chaincode/nsfp.hpp"
#include "fakturchain/common/digest.hpp"
#include "fakturchain/identity/identity.hpp"
#include "fakturchain/ledger/envelope.hpp"

namespace fakturchain::ledger {

struct SerialRef {
  std::string allocation_id;
  std::uint32_t position = 0;

  bool operator==(const SerialRef&) const = default;
};

struct FakturIndexEntry {
  Digest faktur_hash;
  std::string seller_org;
  std::string receiver_org;
  Digest tx_id;
  std::uint64_t block_number = 0;

  bool operator==(const FakturIndexEntry&) const = default;
};

// Outcome of one committed transaction, accepted or recorded as a no-op
// rejection.
struct TxResult {
  std::uint64_t block_number = 0;
  std::uint32_t index = 0;
  TxType tx_type = TxType::PostNsfp;
  bool accepted = false;
  std::vector<std::string> reasons;

  bool operator==(const TxResult&) const = default;
};

// Accepted ScenarioEvent transactions, in commit order.
struct AuditRecord {
  Digest tx_id;
  std::uint64_t block_number = 0;
  Bytes args;

  bool operator==(const AuditRecord&) const = default;
};

// Key-value projection of the committed log. The state hash is the digest
// of every map's entries in sorted key order.
struct WorldState {
  std::map<std::string, chaincode::NsfpAllocation> allocations;
  std::map<chaincode::NsfpSerial, SerialRef> serial_index;
  std::map<chaincode::NsfpSerial, FakturIndexEntry> faktur_index;
  identity::RevocationList cert_revocations;
  std::map<std::pair<std::string, int>, std::uint32_t> quota_used;
  std::map<std::string, std::set<std::uint64_t>> used_nonces;
  std::map<Digest, TxResult> tx_results;
  std::vector<AuditRecord> audit_log;
  std::uint64_t next_sequence = 1;
  std::uint64_t next_allocation = 1;
  std::uint64_t height = 0;
  Digest state_hash;

  WorldState() { seal(); }

  Digest compute_state_hash() const;
  void seal() { state_hash = compute_state_hash(); }

  const chaincode::NsfpAllocation* allocation_of(
      const chaincode::NsfpSerial& serial) const;
  std::optional<chaincode::SerialStatus> status_of(
      const chaincode::NsfpSerial& serial) const;
  bool set_status(const chaincode::NsfpSerial& serial,
                  chaincode::SerialStatus status);

  bool operator==(const WorldState&) const = default;
};

}  // namespace fakturchain::ledger
