// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/dataplane/dataplane.hpp"

#include <algorithm>
#include <set>

#include "fakturchain/common/codec.hpp"
#include "fakturchain/common/error.hpp"

namespace fakturchain::dataplane {

namespace {

constexpr std::string_view kBackupMagic = "FCBACKUP1";

Bytes auth_message(std::string_view receiver_org, std::string_view receiver_cert,
                   const Digest& payload_hash, std::uint64_t nonce) {
  Encoder enc;
  enc.str("private-send").str(receiver_org).str(receiver_cert).digest(payload_hash).u64(
      nonce);
  return enc.take();
}

Bytes receipt_message(std::string_view sender_org, std::string_view sender_cert,
                      const Digest& payload_hash, std::uint64_t nonce) {
  Encoder enc;
  enc.str("private-receipt").str(sender_org).str(sender_cert).digest(payload_hash).u64(
      nonce);
  return enc.take();
}

crypto::BoxNonce box_nonce(const PrivateEnvelope& env) {
  Encoder enc;
  enc.str("private-box").str(env.sender_cert_id).str(env.receiver_cert_id).digest(
      env.payload_hash).u64(env.transfer_nonce);
  return crypto::derive_nonce(enc.buffer());
}

void require_credential(const identity::Certificate& cert, const Trust& trust,
                        std::string_view who) {
  auto d = check_credential(cert, trust);
  if (!d) throw Error(Errc::AuthFailure, std::string(who) + ": " + d.reason);
}

std::vector<std::string> hex_list(const std::vector<Digest>& ds) {
  std::vector<std::string> out;
  for (const auto& d : ds) out.push_back(d.hex());
  return out;
}

}  // namespace

identity::AuthzDecision check_credential(const identity::Certificate& cert,
                                         const Trust& trust) {
  if (!identity::verify_certificate(cert, trust.root_key))
    return identity::AuthzDecision::deny("certificate not issued by root");
  if (trust.revocations.contains(cert.cert_id))
    return identity::AuthzDecision::deny("certificate revoked");
  if (trust.now < cert.issued_at || trust.now >= cert.expires_at)
    return identity::AuthzDecision::deny("certificate outside validity window");
  return identity::AuthzDecision::allow();
}

ContentAddress CasStore::put(ByteView payload) {
  if (payload.empty()) throw Error(Errc::EmptyPayload, "cas payload is empty");
  auto addr = ContentAddress::of(payload);
  blobs_.try_emplace(addr, payload.begin(), payload.end());
  return addr;
}

Bytes CasStore::get(const ContentAddress& address) const {
  auto it = blobs_.find(address);
  if (it == blobs_.end()) throw Error(Errc::NotFound, address.to_string());
  if (Digest::of(it->second) != address.digest)
    throw Error(Errc::IntegrityFailure, "replica bytes for " + address.to_string() +
                                            " no longer match their address");
  return it->second;
}

bool CasStore::contains(const ContentAddress& address) const {
  return blobs_.count(address) != 0;
}

bool CasStore::accept_replica(const ContentAddress& claimed, ByteView payload) {
  if (payload.empty() || Digest::of(payload) != claimed.digest) return false;
  blobs_.try_emplace(claimed, payload.begin(), payload.end());
  return true;
}

std::vector<ContentAddress> CasStore::addresses() const {
  std::vector<ContentAddress> out;
  for (const auto& [a, _] : blobs_) out.push_back(a);
  return out;
}

Bytes cas_get(const CasStore& store, const ContentAddress& address,
              const identity::Certificate& caller, const Trust& trust) {
  require_credential(caller, trust, "cas reader");
  return store.get(address);
}

Digest OffchainStore::put(ByteView plaintext, std::string counterpart,
                          std::optional<Digest> tx_id) {
  if (plaintext.empty()) throw Error(Errc::EmptyPayload, "private payload is empty");
  Digest h = Digest::of(plaintext);
  auto [it, inserted] = records_.try_emplace(
      h, OffchainRecord{Bytes(plaintext.begin(), plaintext.end()), tx_id,
                        std::move(counterpart)});
  if (!inserted) {
    // A stale (damaged) copy is replaced by the fresh bytes.
    if (Digest::of(it->second.plaintext) != h)
      it->second.plaintext.assign(plaintext.begin(), plaintext.end());
    if (!it->second.tx_id) it->second.tx_id = tx_id;
  }
  return h;
}

void OffchainStore::set_tx(const Digest& payload_hash, const Digest& tx_id) {
  auto it = records_.find(payload_hash);
  if (it == records_.end()) throw Error(Errc::NotFound, payload_hash.hex());
  it->second.tx_id = tx_id;
}

const OffchainRecord* OffchainStore::find(const Digest& payload_hash) const {
  auto it = records_.find(payload_hash);
  return it == records_.end() ? nullptr : &it->second;
}

bool OffchainStore::contains(const Digest& payload_hash) const {
  return records_.count(payload_hash) != 0;
}

std::optional<Bytes> OffchainStore::read_verified(const Digest& payload_hash) const {
  const auto* r = find(payload_hash);
  if (!r || Digest::of(r->plaintext) != payload_hash) return std::nullopt;
  return r->plaintext;
}

Bytes PrivateEnvelope::encode() const {
  Encoder enc;
  enc.u8(0xD1)
      .str(sender_org)
      .str(receiver_org)
      .str(sender_cert_id)
      .str(receiver_cert_id)
      .bytes(ciphertext)
      .digest(payload_hash)
      .bytes(sender_auth)
      .u64(transfer_nonce);
  return enc.take();
}

PrivateEnvelope PrivateEnvelope::decode(ByteView bytes) {
  Decoder dec(bytes);
  if (dec.u8() != 0xD1) throw Error(Errc::Malformed, "not a private envelope");
  PrivateEnvelope e;
  e.sender_org = dec.str();
  e.receiver_org = dec.str();
  e.sender_cert_id = dec.str();
  e.receiver_cert_id = dec.str();
  e.ciphertext = dec.bytes();
  e.payload_hash = dec.digest();
  e.sender_auth = dec.bytes();
  e.transfer_nonce = dec.u64();
  dec.expect_done();
  return e;
}

PrivateEnvelope seal_private(const Party& sender,
                             const identity::Certificate& receiver,
                             ByteView payload, std::uint64_t transfer_nonce,
                             const Trust& trust) {
  if (payload.empty()) throw Error(Errc::EmptyPayload, "private payload is empty");
  require_credential(sender.cert, trust, "sender");
  require_credential(receiver, trust, "receiver");
  if (sender.keys.public_key() != sender.cert.verification_key)
    throw Error(Errc::AuthFailure, "sender key does not match its certificate");

  PrivateEnvelope env;
  env.sender_org = sender.cert.subject;
  env.receiver_org = receiver.subject;
  env.sender_cert_id = sender.cert.cert_id;
  env.receiver_cert_id = receiver.cert_id;
  env.payload_hash = Digest::of(payload);
  env.transfer_nonce = transfer_nonce;
  env.sender_auth = sender.keys.sign(auth_message(
      env.receiver_org, env.receiver_cert_id, env.payload_hash, transfer_nonce));
  env.ciphertext =
      crypto::box_seal(payload, receiver.verification_key, sender.keys, box_nonce(env));
  return env;
}

Bytes open_private(const Party& receiver, const identity::Certificate& sender,
                   const PrivateEnvelope& env, const Trust& trust) {
  require_credential(receiver.cert, trust, "receiver");
  require_credential(sender, trust, "sender");
  if (env.receiver_org != receiver.cert.subject ||
      env.receiver_cert_id != receiver.cert.cert_id)
    throw Error(Errc::AuthFailure, "envelope addressed to " + env.receiver_org);
  if (env.sender_cert_id != sender.cert_id || env.sender_org != sender.subject)
    throw Error(Errc::AuthFailure, "envelope sender does not match certificate");
  if (!crypto::verify(sender.verification_key,
                      auth_message(env.receiver_org, env.receiver_cert_id,
                                   env.payload_hash, env.transfer_nonce),
                      env.sender_auth))
    throw Error(Errc::AuthFailure, "sender_auth does not verify");

  auto plain =
      crypto::box_open(env.ciphertext, sender.verification_key, receiver.keys, box_nonce(env));
  if (!plain) throw Error(Errc::DecryptFailure, "ciphertext failed authentication");
  if (Digest::of(*plain) != env.payload_hash)
    throw Error(Errc::DecryptFailure, "plaintext does not match payload_hash");
  return std::move(*plain);
}

Bytes make_receipt(const Party& receiver, const PrivateEnvelope& env) {
  return receiver.keys.sign(receipt_message(env.sender_org, env.sender_cert_id,
                                            env.payload_hash, env.transfer_nonce));
}

identity::AuthzDecision verify_receipt(const identity::Certificate& receiver,
                                       const PrivateEnvelope& env,
                                       ByteView receipt, const Trust& trust) {
  if (receiver.cert_id != env.receiver_cert_id)
    return identity::AuthzDecision::deny("receipt from unexpected certificate");
  return identity::verify_signature(
      receiver,
      receipt_message(env.sender_org, env.sender_cert_id, env.payload_hash,
                      env.transfer_nonce),
      receipt, trust.revocations, trust.now, trust.root_key);
}

PrivateSendResult private_send(const Party& sender, const Party& receiver,
                               ByteView payload, std::uint64_t transfer_nonce,
                               OffchainStore& sender_store,
                               OffchainStore& receiver_store,
                               const Trust& trust) {
  PrivateSendResult r;
  r.envelope = seal_private(sender, receiver.cert, payload, transfer_nonce, trust);
  Bytes plain = open_private(receiver, sender.cert, r.envelope, trust);
  r.receipt = make_receipt(receiver, r.envelope);
  auto ok = verify_receipt(receiver.cert, r.envelope, r.receipt, trust);
  if (!ok) throw Error(Errc::AuthFailure, "receipt: " + ok.reason);
  r.payload_hash = r.envelope.payload_hash;
  receiver_store.put(plain, sender.cert.subject);
  sender_store.put(payload, receiver.cert.subject);
  return r;
}

bool verify_against_chain(ByteView payload, const ledger::Chain& chain,
                          const Digest& tx_id) {
  auto info = ledger::anchor_lookup(chain, tx_id);
  return Digest::of(payload) == info.anchor.digest;
}

std::map<Digest, Digest> anchored_private(const ledger::Chain& chain,
                                          std::string_view org) {
  std::map<Digest, Digest> out;
  for (const auto& b : chain.blocks()) {
    for (const auto& tx : b.txs) {
      if (tx.payload_anchor.kind != ledger::PayloadAnchor::Kind::PayloadHash) continue;
      if (!tx.visibility.is_private() || !tx.visibility.includes(org)) continue;
      out.try_emplace(tx.payload_anchor.digest, tx.tx_id);
    }
  }
  return out;
}

nlohmann::json SweepReport::to_json() const {
  return {{"checked", checked}, {"corrupt", hex_list(corrupt)}, {"missing", hex_list(missing)}};
}

SweepReport sweep(const OffchainStore& store, const ledger::Chain& chain,
                  std::string_view org) {
  SweepReport r;
  for (const auto& [hash, tx] : anchored_private(chain, org)) {
    ++r.checked;
    const auto* rec = store.find(hash);
    if (!rec)
      r.missing.push_back(hash);
    else if (Digest::of(rec->plaintext) != hash)
      r.corrupt.push_back(hash);
  }
  return r;
}

nlohmann::json RestoreReport::to_json() const {
  return {{"total", total},
          {"verified", verified},
          {"corrupt", hex_list(corrupt)},
          {"missing", hex_list(missing)}};
}

Bytes backup(const OffchainStore& store) {
  Encoder enc;
  enc.raw(as_view(kBackupMagic));
  enc.u32(static_cast<std::uint32_t>(store.size()));
  for (const auto& [hash, rec] : store.records()) {
    enc.digest(hash).boolean(rec.tx_id.has_value());
    enc.digest(rec.tx_id.value_or(Digest::zero()));
    enc.str(rec.counterpart).bytes(rec.plaintext);
  }
  enc.u32(static_cast<std::uint32_t>(store.size()));
  for (const auto& [hash, rec] : store.records())
    enc.digest(hash).digest(rec.tx_id.value_or(Digest::zero()));
  return enc.take();
}

RestoreReport restore(OffchainStore& store, ByteView artifact,
                      const std::map<Digest, Digest>& anchors) {
  struct Entry {
    Digest hash;
    std::optional<Digest> tx_id;
    std::string counterpart;
    Bytes plaintext;
  };
  std::vector<Entry> entries;
  std::vector<std::pair<Digest, Digest>> manifest;
  try {
    Decoder dec(artifact);
    for (char c : kBackupMagic)
      if (dec.u8() != static_cast<std::uint8_t>(c))
        throw Error(Errc::MalformedBackup, "bad backup magic");
    std::uint32_t n = dec.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      Entry e;
      e.hash = dec.digest();
      bool has_tx = dec.boolean();
      Digest tx = dec.digest();
      if (has_tx) e.tx_id = tx;
      e.counterpart = dec.str();
      e.plaintext = dec.bytes();
      entries.push_back(std::move(e));
    }
    std::uint32_t m = dec.u32();
    if (m != n) throw Error(Errc::MalformedBackup, "manifest size differs from record count");
    for (std::uint32_t i = 0; i < m; ++i) {
      Digest h = dec.digest();
      Digest t = dec.digest();
      manifest.emplace_back(h, t);
    }
    dec.expect_done();
  } catch (const Error& e) {
    if (e.code() == Errc::MalformedBackup) throw;
    throw Error(Errc::MalformedBackup, e.what());
  }

  RestoreReport report;
  report.total = entries.size();
  OffchainStore fresh;
  std::set<Digest> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    // The manifest is the claimed identity of each record; any disagreement
    // between it, the record header, the plaintext and the chain makes the
    // record unverifiable.
    const Digest& claimed = manifest[i].first;
    seen.insert(claimed);
    auto anchor = anchors.find(claimed);
    bool ok = e.hash == claimed && !e.plaintext.empty() &&
              Digest::of(e.plaintext) == claimed && anchor != anchors.end();
    if (!ok) {
      report.corrupt.push_back(claimed);
      continue;
    }
    fresh.put(e.plaintext, e.counterpart, anchor->second);
    ++report.verified;
  }
  for (const auto& [hash, tx] : anchors)
    if (!seen.count(hash)) report.missing.push_back(hash);
  store = std::move(fresh);
  return report;
}

RestoreReport restore(OffchainStore& store, ByteView artifact,
                      const ledger::Chain& chain, std::string_view org) {
  return restore(store, artifact, anchored_private(chain, org));
}

}  // namespace fakturchain::dataplane
