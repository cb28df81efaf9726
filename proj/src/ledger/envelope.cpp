// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/ledger/envelope.hpp"

#include "fakturchain/common/error.hpp"

namespace fakturchain::ledger {

using identity::Action;

std::string_view to_string(TxType t) {
  switch (t) {
    case TxType::PostNsfp: return "PostNsfp";
    case TxType::PostFaktur: return "PostFaktur";
    case TxType::RevokeCert: return "RevokeCert";
    case TxType::ScenarioEvent: return "ScenarioEvent";
  }
  return "?";
}

Action required_action(TxType t) {
  switch (t) {
    case TxType::PostNsfp: return Action::PostNsfp;
    case TxType::PostFaktur: return Action::PostFaktur;
    case TxType::RevokeCert: return Action::Revoke;
    case TxType::ScenarioEvent: return Action::Admin;
  }
  return Action::Admin;
}

ContentAddress ContentAddress::parse(std::string_view text) {
  constexpr std::string_view kPrefix = "sha256:";
  if (!text.starts_with(kPrefix)) {
    throw Error(Errc::Malformed, "content address must start with sha256:");
  }
  return {Digest::from_hex(text.substr(kPrefix.size()))};
}

std::string PayloadAnchor::to_string() const {
  if (kind == Kind::ContentAddress) return ContentAddress{digest}.to_string();
  return digest.hex();
}

Visibility Visibility::between(std::string sender, std::string receiver) {
  if (sender.empty() || receiver.empty()) {
    throw Error(Errc::InvalidArgument, "private visibility needs two parties");
  }
  Visibility v;
  v.parties_ = std::make_pair(std::move(sender), std::move(receiver));
  return v;
}

bool Visibility::includes(std::string_view org) const {
  return !parties_ || parties_->first == org || parties_->second == org;
}

void Visibility::encode(Encoder& enc) const {
  if (!parties_) {
    enc.u8(0);
    return;
  }
  enc.u8(1).str(parties_->first).str(parties_->second);
}

Visibility Visibility::decode(Decoder& dec) {
  auto kind = dec.u8();
  if (kind == 0) return broadcast();
  if (kind != 1) throw Error(Errc::Malformed, "visibility kind");
  auto s = dec.str();
  auto r = dec.str();
  if (s.empty() || r.empty()) throw Error(Errc::Malformed, "empty party");
  return between(std::move(s), std::move(r));
}

nlohmann::json Visibility::to_json() const {
  if (!parties_) return {{"kind", "broadcast"}};
  return {{"kind", "private"},
          {"sender", parties_->first},
          {"receiver", parties_->second}};
}

namespace {

constexpr std::uint8_t kEnvelopeTag = 0xE1;

void encode_body(Encoder& enc, const TransactionEnvelope& e) {
  enc.u8(kEnvelopeTag)
      .u8(static_cast<std::uint8_t>(e.tx_type))
      .str(e.creator_cert_id)
      .u8(static_cast<std::uint8_t>(e.payload_anchor.kind))
      .digest(e.payload_anchor.digest);
  e.visibility.encode(enc);
  enc.u64(e.nonce).u64(e.created_at).bytes(e.args);
}

}  // namespace

Bytes TransactionEnvelope::signing_bytes() const {
  Encoder enc;
  encode_body(enc, *this);
  return enc.take();
}

Digest TransactionEnvelope::compute_tx_id() const {
  Encoder enc;
  encode_body(enc, *this);
  enc.bytes(signature);
  return Digest::of(enc.buffer());
}

void TransactionEnvelope::encode(Encoder& enc) const {
  enc.digest(tx_id);
  encode_body(enc, *this);
  enc.bytes(signature);
}

TransactionEnvelope TransactionEnvelope::decode(Decoder& dec) {
  TransactionEnvelope e;
  e.tx_id = dec.digest();
  if (dec.u8() != kEnvelopeTag) throw Error(Errc::Malformed, "envelope tag");
  auto type = dec.u8();
  if (type < 1 || type > 4) throw Error(Errc::Malformed, "tx type");
  e.tx_type = static_cast<TxType>(type);
  e.creator_cert_id = dec.str();
  auto kind = dec.u8();
  if (kind < 1 || kind > 2) throw Error(Errc::Malformed, "anchor kind");
  e.payload_anchor.kind = static_cast<PayloadAnchor::Kind>(kind);
  e.payload_anchor.digest = dec.digest();
  e.visibility = Visibility::decode(dec);
  e.nonce = dec.u64();
  e.created_at = dec.u64();
  e.args = dec.bytes();
  e.signature = dec.bytes();
  return e;
}

nlohmann::json TransactionEnvelope::summary_json() const {
  return {{"tx_id", tx_id.hex()},
          {"tx_type", std::string(to_string(tx_type))},
          {"creator_cert_id", creator_cert_id},
          {"payload_anchor", payload_anchor.to_string()},
          {"visibility", visibility.to_json()},
          {"nonce", nonce},
          {"created_at", created_at}};
}

TransactionEnvelope make_envelope(TxType type, std::string creator_cert_id,
                                  const crypto::KeyPair& signer,
                                  PayloadAnchor anchor, Visibility visibility,
                                  std::uint64_t nonce, LogicalTime created_at,
                                  Bytes args) {
  TransactionEnvelope e;
  e.tx_type = type;
  e.creator_cert_id = std::move(creator_cert_id);
  e.payload_anchor = anchor;
  e.visibility = std::move(visibility);
  e.nonce = nonce;
  e.created_at = created_at;
  e.args = std::move(args);
  e.signature = signer.sign(e.signing_bytes());
  e.tx_id = e.compute_tx_id();
  return e;
}

}  // namespace fakturchain::ledger
