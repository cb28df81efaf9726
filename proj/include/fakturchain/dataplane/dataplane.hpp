// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakturchain/common/crypto.hpp"
#include "fakturchain/identity/identity.hpp"
#include "fakturchain/ledger/chain.hpp"

namespace fakturchain::dataplane {

using ledger::ContentAddress;

// What a party needs to judge someone else's credential.
struct Trust {
  const Bytes& root_key;
  const identity::RevocationList& revocations;
  LogicalTime now = 0;
};

// Issuer signature, revocation and validity window. Role is not checked.
identity::AuthzDecision check_credential(const identity::Certificate& cert,
                                         const Trust& trust);

// A local signing identity.
struct Party {
  const identity::Certificate& cert;
  const crypto::KeyPair& keys;
};

// Content-addressed replica. Every member holds one; writes arrive either
// locally (put) or from a peer's broadcast (accept_replica).
class CasStore {
 public:
  ContentAddress put(ByteView payload);  // throws EmptyPayload
  // Throws NotFound, or IntegrityFailure if the stored bytes no longer hash
  // to the address.
  Bytes get(const ContentAddress& address) const;
  bool contains(const ContentAddress& address) const;
  // Stores the bytes only if they hash to the claimed address.
  bool accept_replica(const ContentAddress& claimed, ByteView payload);

  std::size_t size() const { return blobs_.size(); }
  std::vector<ContentAddress> addresses() const;
  // Direct access for fault injection and scans.
  std::map<ContentAddress, Bytes>& raw() { return blobs_; }
  const std::map<ContentAddress, Bytes>& raw() const { return blobs_; }

 private:
  std::map<ContentAddress, Bytes> blobs_;
};

// Read on behalf of a certificate holder. Throws AuthFailure when the
// caller's certificate does not check out, then as CasStore::get.
Bytes cas_get(const CasStore& store, const ContentAddress& address,
              const identity::Certificate& caller, const Trust& trust);

struct OffchainRecord {
  Bytes plaintext;
  std::optional<Digest> tx_id;
  std::string counterpart;

  bool operator==(const OffchainRecord&) const = default;
};

// Per-org private payload store keyed by H(plaintext).
class OffchainStore {
 public:
  // Throws EmptyPayload. Re-putting the same payload keeps the first
  // metadata but fills in a missing tx_id.
  Digest put(ByteView plaintext, std::string counterpart,
             std::optional<Digest> tx_id = std::nullopt);
  void set_tx(const Digest& payload_hash, const Digest& tx_id);

  const OffchainRecord* find(const Digest& payload_hash) const;
  bool contains(const Digest& payload_hash) const;
  // Plaintext if the record exists and still hashes to its key.
  std::optional<Bytes> read_verified(const Digest& payload_hash) const;

  std::size_t size() const { return records_.size(); }
  const std::map<Digest, OffchainRecord>& records() const { return records_; }
  std::map<Digest, OffchainRecord>& raw() { return records_; }
  void clear() { records_.clear(); }

  bool operator==(const OffchainStore&) const = default;

 private:
  std::map<Digest, OffchainRecord> records_;
};

// Private payload in flight between two orgs. Only the ciphertext of the
// payload travels; payload_hash is what ends up anchored.
struct PrivateEnvelope {
  std::string sender_org;
  std::string receiver_org;
  std::string sender_cert_id;
  std::string receiver_cert_id;
  Bytes ciphertext;
  Digest payload_hash;
  Bytes sender_auth;
  std::uint64_t transfer_nonce = 0;

  Bytes encode() const;
  static PrivateEnvelope decode(ByteView bytes);  // throws Malformed

  bool operator==(const PrivateEnvelope&) const = default;
};

// Sender side. Checks both certificates (AuthFailure) and encrypts to the
// receiver's key. Throws EmptyPayload.
PrivateEnvelope seal_private(const Party& sender,
                             const identity::Certificate& receiver,
                             ByteView payload, std::uint64_t transfer_nonce,
                             const Trust& trust);

// Receiver side. AuthFailure if the sender's certificate or sender_auth does
// not verify or the envelope is addressed to someone else; DecryptFailure
// if the ciphertext does not open or opens to bytes that don't hash to
// payload_hash.
Bytes open_private(const Party& receiver, const identity::Certificate& sender,
                   const PrivateEnvelope& env, const Trust& trust);

// The receiver's signed confirmation, closing the mutual authentication.
Bytes make_receipt(const Party& receiver, const PrivateEnvelope& env);
identity::AuthzDecision verify_receipt(const identity::Certificate& receiver,
                                       const PrivateEnvelope& env,
                                       ByteView receipt, const Trust& trust);

struct PrivateSendResult {
  PrivateEnvelope envelope;
  Digest payload_hash;
  Bytes receipt;
};

// Complete two-party exchange in one call: seal, open, receipt check, then
// both stores gain the plaintext. Nothing is stored on failure.
PrivateSendResult private_send(const Party& sender, const Party& receiver,
                               ByteView payload, std::uint64_t transfer_nonce,
                               OffchainStore& sender_store,
                               OffchainStore& receiver_store,
                               const Trust& trust);

// True iff H(payload) equals the committed envelope's anchor. NotFound for
// unknown tx ids.
bool verify_against_chain(ByteView payload, const ledger::Chain& chain,
                          const Digest& tx_id);

// payload_hash -> tx_id for every private payload the org is party to.
std::map<Digest, Digest> anchored_private(const ledger::Chain& chain,
                                          std::string_view org);

struct SweepReport {
  std::size_t checked = 0;
  std::vector<Digest> corrupt;  // present but not hashing to its anchor
  std::vector<Digest> missing;  // anchored but absent

  bool clean() const { return corrupt.empty() && missing.empty(); }
  nlohmann::json to_json() const;
};

SweepReport sweep(const OffchainStore& store, const ledger::Chain& chain,
                  std::string_view org);

struct RestoreReport {
  std::size_t total = 0;
  std::size_t verified = 0;
  std::vector<Digest> corrupt;
  std::vector<Digest> missing;

  nlohmann::json to_json() const;
  bool operator==(const RestoreReport&) const = default;
};

// Backup artifact: magic, records (hash, tx id, counterpart, plaintext),
// then a manifest of (payload_hash, tx_id) pairs.
Bytes backup(const OffchainStore& store);

// Each backup record is checked against `anchors` (payload_hash -> tx_id):
// the plaintext must hash to the manifest entry and that hash must be
// anchored. Verified records replace the store contents exactly. Throws
// MalformedBackup.
RestoreReport restore(OffchainStore& store, ByteView artifact,
                      const std::map<Digest, Digest>& anchors);
RestoreReport restore(OffchainStore& store, ByteView artifact,
                      const ledger::Chain& chain, std::string_view org);

}  // namespace fakturchain::dataplane
