// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "fakturchain/common/codec.hpp"
#include "fakturchain/common/crypto.hpp"
#include "fakturchain/common/digest.hpp"
#include "fakturchain/identity/identity.hpp"

namespace fakturchain::ledger {

enum class TxType : std::uint8_t {
  PostNsfp = 1,
  PostFaktur = 2,
  RevokeCert = 3,
  ScenarioEvent = 4,
};

std::string_view to_string(TxType t);
identity::Action required_action(TxType t);

// Self-describing address of a content-addressed blob: "sha256:<hex>".
struct ContentAddress {
  Digest digest;

  static ContentAddress of(ByteView payload) { return {Digest::of(payload)}; }
  static ContentAddress parse(std::string_view text);  // throws Malformed
  std::string to_string() const { return "sha256:" + digest.hex(); }

  auto operator<=>(const ContentAddress&) const = default;
};

// What an envelope commits to instead of payload bytes.
struct PayloadAnchor {
  enum class Kind : std::uint8_t { ContentAddress = 1, PayloadHash = 2 };

  Kind kind = Kind::PayloadHash;
  Digest digest;

  static PayloadAnchor content(const ContentAddress& a) {
    return {Kind::ContentAddress, a.digest};
  }
  static PayloadAnchor hash(const Digest& d) { return {Kind::PayloadHash, d}; }
  std::string to_string() const;

  bool operator==(const PayloadAnchor&) const = default;
};

class Visibility {
 public:
  static Visibility broadcast() { return {}; }
  static Visibility between(std::string sender, std::string receiver);

  bool is_private() const { return parties_.has_value(); }
  const std::string& sender() const { return parties_->first; }
  const std::string& receiver() const { return parties_->second; }
  bool includes(std::string_view org) const;

  void encode(Encoder& enc) const;
  static Visibility decode(Decoder& dec);
  nlohmann::json to_json() const;

  bool operator==(const Visibility&) const = default;

 private:
  std::optional<std::pair<std::string, std::string>> parties_;
};

// Signed transaction record. `args` holds the public invocation arguments
// the chaincode needs at apply time (never private payload bytes).
struct TransactionEnvelope {
  Digest tx_id;
  TxType tx_type = TxType::PostNsfp;
  std::string creator_cert_id;
  Bytes signature;
  PayloadAnchor payload_anchor;
  Visibility visibility;
  std::uint64_t nonce = 0;
  LogicalTime created_at = 0;
  Bytes args;

  // Bytes covered by the creator's signature: every field except tx_id and
  // the signature itself.
  Bytes signing_bytes() const;
  // Digest over every field except tx_id.
  Digest compute_tx_id() const;

  void encode(Encoder& enc) const;
  static TransactionEnvelope decode(Decoder& dec);
  nlohmann::json summary_json() const;

  bool operator==(const TransactionEnvelope&) const = default;
};

// Fills in the signature and tx_id.
TransactionEnvelope make_envelope(TxType type, std::string creator_cert_id,
                                  const crypto::KeyPair& signer,
                                  PayloadAnchor anchor, Visibility visibility,
                                  std::uint64_t nonce, LogicalTime created_at,
                                  Bytes args);

}  // namespace fakturchain::ledger
