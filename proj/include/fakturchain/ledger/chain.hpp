// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakturchain/identity/identity.hpp"
#include "fakturchain/ledger/envelope.hpp"

namespace fakturchain::ledger {

struct Block {
  std::uint64_t number = 0;
  Digest prev_hash;
  Digest data_hash;
  std::vector<TransactionEnvelope> txs;
  std::uint64_t committed_term = 0;
  LogicalTime committed_at = 0;
  // Hash of the header fields above, persisted alongside the block so a
  // damaged header is attributed to its own block.
  Digest block_hash;

  Digest compute_header_hash() const;
  static Digest compute_data_hash(std::span<const TransactionEnvelope> txs);

  Bytes encode() const;
  static Block decode(ByteView bytes);  // throws Malformed
  nlohmann::json to_json() const;

  bool operator==(const Block&) const = default;
};

Block make_genesis();

using TxAuthenticator =
    std::function<identity::AuthzDecision(const TransactionEnvelope&)>;

struct TxLocation {
  std::uint64_t block_number = 0;
  std::uint32_t index = 0;
};

class Chain {
 public:
  Chain();

  // Builds block head+1. Throws EmptyBatch, or UnauthorizedTx naming the
  // first envelope `auth` rejects.
  const Block& append_block(std::vector<TransactionEnvelope> txs,
                            std::uint64_t term, LogicalTime now,
                            const TxAuthenticator& auth);

  // Appends a block produced elsewhere after checking it links to the head
  // and is internally consistent. Throws Malformed.
  const Block& append_verified(Block block);

  // Replaces the contents with an imported block sequence; verifies first.
  static Chain import(std::vector<Block> blocks);  // throws Malformed

  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  const Block& head() const { return blocks_.back(); }
  std::uint64_t height() const { return head().number; }
  const Block& at(std::uint64_t n) const { return blocks_.at(n); }

  std::optional<TxLocation> locate(const Digest& tx_id) const;
  const TransactionEnvelope* find_tx(const Digest& tx_id) const;

 private:
  void index(const Block& b);

  std::vector<Block> blocks_;
  std::map<Digest, TxLocation> tx_index_;
};

struct ChainReport {
  bool ok = true;
  std::optional<std::uint64_t> first_bad_block;
  std::string detail;
};

// Problem description for block `b` if it is not a valid successor of
// `prev` (or a valid genesis when prev is null); empty when fine.
std::optional<std::string> check_block(const Block& b, const Block* prev);

ChainReport verify_chain(std::span<const Block> blocks);
inline ChainReport verify_chain(const Chain& chain) {
  return verify_chain(chain.blocks());
}

struct AnchorInfo {
  PayloadAnchor anchor;
  Visibility visibility;
  TxType tx_type = TxType::PostNsfp;
  TxLocation location;
};

AnchorInfo anchor_lookup(const Chain& chain, const Digest& tx_id);  // NotFound

// Append-only block file: a sequence of records, each a u32 big-endian
// length followed by the block's canonical encoding.
namespace block_store {

Bytes serialize(std::span<const Block> blocks);
Bytes serialize_record(const Block& block);

struct Loaded {
  std::vector<Block> blocks;
  std::vector<std::size_t> record_offsets;  // byte offset of each record
  std::optional<std::uint64_t> undecodable;  // index of first bad record
  std::string detail;
};

Loaded parse(ByteView file);
// Decodes then verifies; a record that fails to decode counts as the first
// bad block.
ChainReport verify(ByteView file);

void write_file(const std::filesystem::path& path, std::span<const Block> blocks);
void append_file(const std::filesystem::path& path, const Block& block);
Bytes read_file(const std::filesystem::path& path);

}  // namespace block_store

}  // namespace fakturchain::ledger
