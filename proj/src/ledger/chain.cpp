// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/ledger/chain.hpp"

#include <fstream>
#include <iterator>

#include "fakturchain/common/error.hpp"

namespace fakturchain::ledger {

namespace {

constexpr std::uint8_t kBlockTag = 0xB1;

}  // namespace

Digest Block::compute_header_hash() const {
  Encoder enc;
  enc.u8(kBlockTag)
      .u64(number)
      .digest(prev_hash)
      .digest(data_hash)
      .u64(committed_term)
      .u64(committed_at);
  return Digest::of(enc.buffer());
}

Digest Block::compute_data_hash(std::span<const TransactionEnvelope> txs) {
  Encoder enc;
  enc.u32(static_cast<std::uint32_t>(txs.size()));
  for (const auto& tx : txs) enc.digest(tx.tx_id);
  return Digest::of(enc.buffer());
}

Bytes Block::encode() const {
  Encoder enc;
  enc.u8(kBlockTag)
      .u64(number)
      .digest(prev_hash)
      .digest(data_hash)
      .u64(committed_term)
      .u64(committed_at);
  enc.u32(static_cast<std::uint32_t>(txs.size()));
  for (const auto& tx : txs) tx.encode(enc);
  enc.digest(block_hash);
  return enc.take();
}

Block Block::decode(ByteView bytes) {
  Decoder dec(bytes);
  if (dec.u8() != kBlockTag) throw Error(Errc::Malformed, "block tag");
  Block b;
  b.number = dec.u64();
  b.prev_hash = dec.digest();
  b.data_hash = dec.digest();
  b.committed_term = dec.u64();
  b.committed_at = dec.u64();
  auto n = dec.u32();
  if (n > bytes.size()) throw Error(Errc::Malformed, "tx count");
  b.txs.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    b.txs.push_back(TransactionEnvelope::decode(dec));
  }
  b.block_hash = dec.digest();
  dec.expect_done();
  return b;
}

nlohmann::json Block::to_json() const {
  auto txs_json = nlohmann::json::array();
  for (const auto& tx : txs) txs_json.push_back(tx.summary_json());
  return {{"number", number},
          {"prev_hash", prev_hash.hex()},
          {"data_hash", data_hash.hex()},
          {"block_hash", block_hash.hex()},
          {"committed_term", committed_term},
          {"committed_at", committed_at},
          {"txs", txs_json}};
}

Block make_genesis() {
  Block g;
  g.data_hash = Block::compute_data_hash({});
  g.block_hash = g.compute_header_hash();
  return g;
}

Chain::Chain() { blocks_.push_back(make_genesis()); }

const Block& Chain::append_block(std::vector<TransactionEnvelope> txs,
                                 std::uint64_t term, LogicalTime now,
                                 const TxAuthenticator& auth) {
  if (txs.empty()) throw Error(Errc::EmptyBatch, "no transactions");
  for (const auto& tx : txs) {
    auto decision = auth(tx);
    if (!decision) {
      throw Error(Errc::UnauthorizedTx, tx.tx_id.hex() + ": " + decision.reason);
    }
  }
  Block b;
  b.number = head().number + 1;
  b.prev_hash = head().block_hash;
  b.txs = std::move(txs);
  b.data_hash = Block::compute_data_hash(b.txs);
  b.committed_term = term;
  b.committed_at = now;
  b.block_hash = b.compute_header_hash();
  blocks_.push_back(std::move(b));
  index(blocks_.back());
  return blocks_.back();
}

const Block& Chain::append_verified(Block block) {
  if (auto problem = check_block(block, &head())) {
    throw Error(Errc::Malformed, "block " + std::to_string(block.number) +
                                     ": " + *problem);
  }
  blocks_.push_back(std::move(block));
  index(blocks_.back());
  return blocks_.back();
}

Chain Chain::import(std::vector<Block> blocks) {
  auto report = verify_chain(blocks);
  if (!report.ok) {
    throw Error(Errc::Malformed, "import rejected at block " +
                                     std::to_string(*report.first_bad_block) +
                                     ": " + report.detail);
  }
  Chain c;
  c.blocks_ = std::move(blocks);
  c.tx_index_.clear();
  for (const auto& b : c.blocks_) c.index(b);
  return c;
}

void Chain::index(const Block& b) {
  for (std::uint32_t i = 0; i < b.txs.size(); ++i) {
    tx_index_.emplace(b.txs[i].tx_id, TxLocation{b.number, i});
  }
}

std::optional<TxLocation> Chain::locate(const Digest& tx_id) const {
  auto it = tx_index_.find(tx_id);
  if (it == tx_index_.end()) return std::nullopt;
  return it->second;
}

const TransactionEnvelope* Chain::find_tx(const Digest& tx_id) const {
  auto loc = locate(tx_id);
  if (!loc) return nullptr;
  return &blocks_[loc->block_number].txs[loc->index];
}

std::optional<std::string> check_block(const Block& b, const Block* prev) {
  if (prev == nullptr) {
    if (b.number != 0) return "first block is not genesis";
    if (!b.prev_hash.is_zero()) return "genesis prev_hash is not zero";
    if (!b.txs.empty()) return "genesis carries transactions";
  } else {
    if (b.number != prev->number + 1) return "block number out of sequence";
    if (b.prev_hash != prev->block_hash) return "prev_hash does not link";
    if (b.txs.empty()) return "empty block";
  }
  for (const auto& tx : b.txs) {
    if (tx.compute_tx_id() != tx.tx_id) {
      return "tx " + tx.tx_id.hex() + " does not match its contents";
    }
  }
  if (Block::compute_data_hash(b.txs) != b.data_hash) {
    return "data_hash does not match transactions";
  }
  if (b.compute_header_hash() != b.block_hash) {
    return "block_hash does not match header";
  }
  return std::nullopt;
}

ChainReport verify_chain(std::span<const Block> blocks) {
  ChainReport report;
  const Block* prev = nullptr;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (auto problem = check_block(blocks[i], prev)) {
      report.ok = false;
      report.first_bad_block = i;
      report.detail = *problem;
      return report;
    }
    prev = &blocks[i];
  }
  return report;
}

AnchorInfo anchor_lookup(const Chain& chain, const Digest& tx_id) {
  auto loc = chain.locate(tx_id);
  if (!loc) throw Error(Errc::NotFound, "tx " + tx_id.hex());
  const auto& tx = chain.at(loc->block_number).txs[loc->index];
  return {tx.payload_anchor, tx.visibility, tx.tx_type, *loc};
}

namespace block_store {

Bytes serialize_record(const Block& block) {
  auto body = block.encode();
  Encoder enc;
  enc.bytes(body);
  return enc.take();
}

Bytes serialize(std::span<const Block> blocks) {
  Bytes out;
  for (const auto& b : blocks) {
    auto rec = serialize_record(b);
    out.insert(out.end(), rec.begin(), rec.end());
  }
  return out;
}

Loaded parse(ByteView file) {
  Loaded out;
  Decoder dec(file);
  while (!dec.done()) {
    auto offset = dec.position();
    auto index = out.blocks.size();
    try {
      auto body = dec.bytes();
      out.blocks.push_back(Block::decode(body));
      out.record_offsets.push_back(offset);
    } catch (const Error& e) {
      out.undecodable = index;
      out.detail = e.what();
      break;
    }
  }
  return out;
}

ChainReport verify(ByteView file) {
  auto loaded = parse(file);
  auto report = verify_chain(loaded.blocks);
  if (!report.ok) return report;
  if (loaded.undecodable) {
    report.ok = false;
    report.first_bad_block = loaded.undecodable;
    report.detail = "undecodable record: " + loaded.detail;
  }
  return report;
}

void write_file(const std::filesystem::path& path,
                std::span<const Block> blocks) {
  auto bytes = serialize(blocks);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::NotFound, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void append_file(const std::filesystem::path& path, const Block& block) {
  auto rec = serialize_record(block);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(Errc::NotFound, "cannot append " + path.string());
  out.write(reinterpret_cast<const char*>(rec.data()),
            static_cast<std::streamsize>(rec.size()));
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::NotFound, "cannot read " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

}  // namespace block_store

}  // namespace fakturchain::ledger
