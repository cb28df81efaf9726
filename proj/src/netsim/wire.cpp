// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/netsim/wire.hpp"

#include "fakturchain/common/error.hpp"

namespace fakturchain::netsim::wire {

Bytes SubmitReply::encode() const {
  Encoder enc;
  enc.u8(static_cast<std::uint8_t>(status)).digest(tx_id).str(leader_hint).str(reason);
  return enc.take();
}

SubmitReply SubmitReply::decode(ByteView b) {
  Decoder dec(b);
  SubmitReply r;
  auto s = dec.u8();
  if (s < 1 || s > 3) throw Error(Errc::Malformed, "submit reply status");
  r.status = static_cast<Status>(s);
  r.tx_id = dec.digest();
  r.leader_hint = dec.str();
  r.reason = dec.str();
  dec.expect_done();
  return r;
}

Bytes BlockRequest::encode() const {
  Encoder enc;
  enc.u64(from_number);
  return enc.take();
}

BlockRequest BlockRequest::decode(ByteView b) {
  Decoder dec(b);
  BlockRequest r{dec.u64()};
  dec.expect_done();
  return r;
}

Bytes BlockDeliver::encode() const {
  Encoder enc;
  enc.u32(static_cast<std::uint32_t>(blocks.size()));
  for (const auto& bl : blocks) enc.bytes(bl.encode());
  return enc.take();
}

BlockDeliver BlockDeliver::decode(ByteView b) {
  Decoder dec(b);
  BlockDeliver r;
  std::uint32_t n = dec.u32();
  for (std::uint32_t i = 0; i < n; ++i) r.blocks.push_back(ledger::Block::decode(dec.bytes()));
  dec.expect_done();
  return r;
}

Bytes CasPublish::encode() const {
  Encoder enc;
  enc.digest(address.digest).bytes(payload);
  return enc.take();
}

CasPublish CasPublish::decode(ByteView b) {
  Decoder dec(b);
  CasPublish r;
  r.address.digest = dec.digest();
  r.payload = dec.bytes();
  dec.expect_done();
  return r;
}

Bytes PrivateData::encode() const {
  Encoder enc;
  enc.u64(min_height).bytes(envelope.encode());
  return enc.take();
}

PrivateData PrivateData::decode(ByteView b) {
  Decoder dec(b);
  PrivateData r;
  r.min_height = dec.u64();
  r.envelope = dataplane::PrivateEnvelope::decode(dec.bytes());
  dec.expect_done();
  return r;
}

Bytes PrivateAck::encode() const {
  Encoder enc;
  enc.u8(static_cast<std::uint8_t>(status)).u64(transfer_nonce).digest(payload_hash);
  enc.u32(static_cast<std::uint32_t>(reasons.size()));
  for (const auto& r : reasons) enc.str(r);
  enc.str(endorsement.endorser_cert_id).bytes(endorsement.signature).bytes(receipt);
  return enc.take();
}

PrivateAck PrivateAck::decode(ByteView b) {
  Decoder dec(b);
  PrivateAck r;
  auto s = dec.u8();
  if (s < 1 || s > 6) throw Error(Errc::Malformed, "private ack status");
  r.status = static_cast<Status>(s);
  r.transfer_nonce = dec.u64();
  r.payload_hash = dec.digest();
  std::uint32_t n = dec.u32();
  for (std::uint32_t i = 0; i < n; ++i) r.reasons.push_back(dec.str());
  r.endorsement.endorser_cert_id = dec.str();
  r.endorsement.signature = dec.bytes();
  r.receipt = dec.bytes();
  dec.expect_done();
  return r;
}

Bytes Alert::signing_bytes() const {
  Encoder enc;
  enc.str("alert").str(category).str(subject).str(detail).u64(trace_ref).digest(related).str(
      reporter_cert_id);
  return enc.take();
}

Bytes Alert::encode() const {
  Encoder enc;
  enc.str(category).str(subject).str(detail).u64(trace_ref).digest(related);
  enc.str(reporter_cert_id).bytes(signature);
  return enc.take();
}

Alert Alert::decode(ByteView b) {
  Decoder dec(b);
  Alert r;
  r.category = dec.str();
  r.subject = dec.str();
  r.detail = dec.str();
  r.trace_ref = dec.u64();
  r.related = dec.digest();
  r.reporter_cert_id = dec.str();
  r.signature = dec.bytes();
  dec.expect_done();
  return r;
}

}  // namespace fakturchain::netsim::wire
