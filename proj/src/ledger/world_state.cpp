// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/ledger/world_state.hpp"

#include "fakturchain/common/codec.hpp"

namespace fakturchain::ledger {

Digest WorldState::compute_state_hash() const {
  Encoder enc;
  enc.u8(0x51);
  enc.u32(static_cast<std::uint32_t>(allocations.size()));
  for (const auto& [id, a] : allocations) {
    enc.str(id);
    a.encode(enc);
  }
  enc.u32(static_cast<std::uint32_t>(serial_index.size()));
  for (const auto& [serial, ref] : serial_index) {
    enc.u64(serial.as_number()).str(ref.allocation_id).u32(ref.position);
  }
  enc.u32(static_cast<std::uint32_t>(faktur_index.size()));
  for (const auto& [serial, e] : faktur_index) {
    enc.u64(serial.as_number())
        .digest(e.faktur_hash)
        .str(e.seller_org)
        .str(e.receiver_org)
        .digest(e.tx_id)
        .u64(e.block_number);
  }
  enc.u32(static_cast<std::uint32_t>(cert_revocations.size()));
  for (const auto& [id, r] : cert_revocations.entries()) {
    enc.str(id).u64(r.revoked_at).str(r.reason);
  }
  enc.u32(static_cast<std::uint32_t>(quota_used.size()));
  for (const auto& [key, used] : quota_used) {
    enc.str(key.first).i64(key.second).u32(used);
  }
  enc.u32(static_cast<std::uint32_t>(used_nonces.size()));
  for (const auto& [creator, nonces] : used_nonces) {
    enc.str(creator).u32(static_cast<std::uint32_t>(nonces.size()));
    for (auto n : nonces) enc.u64(n);
  }
  enc.u32(static_cast<std::uint32_t>(tx_results.size()));
  for (const auto& [id, r] : tx_results) {
    enc.digest(id)
        .u64(r.block_number)
        .u32(r.index)
        .u8(static_cast<std::uint8_t>(r.tx_type))
        .boolean(r.accepted)
        .u32(static_cast<std::uint32_t>(r.reasons.size()));
    for (const auto& why : r.reasons) enc.str(why);
  }
  enc.u32(static_cast<std::uint32_t>(audit_log.size()));
  for (const auto& rec : audit_log) {
    enc.digest(rec.tx_id).u64(rec.block_number).bytes(rec.args);
  }
  enc.u64(next_sequence).u64(next_allocation).u64(height);
  return Digest::of(enc.buffer());
}

const chaincode::NsfpAllocation* WorldState::allocation_of(
    const chaincode::NsfpSerial& serial) const {
  auto it = serial_index.find(serial);
  if (it == serial_index.end()) return nullptr;
  auto a = allocations.find(it->second.allocation_id);
  return a == allocations.end() ? nullptr : &a->second;
}

std::optional<chaincode::SerialStatus> WorldState::status_of(
    const chaincode::NsfpSerial& serial) const {
  auto it = serial_index.find(serial);
  if (it == serial_index.end()) return std::nullopt;
  const auto& a = allocations.at(it->second.allocation_id);
  return a.statuses.at(it->second.position);
}

bool WorldState::set_status(const chaincode::NsfpSerial& serial,
                            chaincode::SerialStatus status) {
  auto it = serial_index.find(serial);
  if (it == serial_index.end()) return false;
  allocations.at(it->second.allocation_id).statuses.at(it->second.position) =
      status;
  return true;
}

}  // namespace fakturchain::ledger
