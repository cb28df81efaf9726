// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fakturchain/chaincode/chaincode.hpp"
#include "fakturchain/dataplane/dataplane.hpp"
#include "fakturchain/ledger/chain.hpp"

// Payload layouts of the non-Raft message kinds.
namespace fakturchain::netsim::wire {

struct SubmitReply {
  enum class Status : std::uint8_t { Accepted = 1, Redirect, Rejected };
  Status status = Status::Accepted;
  Digest tx_id;
  std::string leader_hint;
  std::string reason;

  Bytes encode() const;
  static SubmitReply decode(ByteView b);
};

struct BlockRequest {
  std::uint64_t from_number = 0;

  Bytes encode() const;
  static BlockRequest decode(ByteView b);
};

struct BlockDeliver {
  std::vector<ledger::Block> blocks;

  Bytes encode() const;
  static BlockDeliver decode(ByteView b);
};

struct CasPublish {
  ledger::ContentAddress address;
  Bytes payload;

  Bytes encode() const;
  static CasPublish decode(ByteView b);
};

struct PrivateData {
  // Sender's committed height; the receiver validates against at least
  // this much history.
  std::uint64_t min_height = 0;
  dataplane::PrivateEnvelope envelope;

  Bytes encode() const;
  static PrivateData decode(ByteView b);
};

struct PrivateAck {
  enum class Status : std::uint8_t {
    Endorsed = 1,
    Invalid,       // faktur failed validation; reasons attached
    AuthFailed,
    DecryptFailed,
    Malformed,
    Stale,         // receiver could not catch up to min_height
  };
  Status status = Status::Endorsed;
  std::uint64_t transfer_nonce = 0;
  Digest payload_hash;
  std::vector<std::string> reasons;
  chaincode::Endorsement endorsement;
  Bytes receipt;

  Bytes encode() const;
  static PrivateAck decode(ByteView b);
};

struct Alert {
  std::string category;
  std::string subject;
  std::string detail;
  std::uint64_t trace_ref = 0;
  Digest related;
  // Alerts can trigger revocations, so the reporter signs them.
  std::string reporter_cert_id;
  Bytes signature;

  Bytes signing_bytes() const;
  Bytes encode() const;
  static Alert decode(ByteView b);
};

}  // namespace fakturchain::netsim::wire
