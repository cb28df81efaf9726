// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakturchain/chaincode/faktur.hpp"
#include "fakturchain/common/crypto.hpp"
#include "fakturchain/identity/identity.hpp"
#include "fakturchain/ledger/envelope.hpp"
#include "fakturchain/netsim/network.hpp"

namespace fakturchain::gateway {

// Signed API call. The signature covers signing_bytes(); GET requests are
// signed too so reads run under the caller's visibility.
struct ApiRequest {
  std::string method;  // GET, POST, PUT
  std::string target;  // path plus optional query string
  std::string cert_id;
  std::uint64_t nonce = 0;
  Bytes signature;
  nlohmann::json body;  // null when absent

  // "method\ntarget\nnonce\n" followed by the compact JSON body.
  Bytes signing_bytes() const;
  bool mutating() const { return method != "GET"; }

  static ApiRequest make(std::string method, std::string target, nlohmann::json body,
                         const identity::Certificate& caller, const crypto::KeyPair& keys,
                         std::uint64_t nonce);
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body = nlohmann::json::object();

  bool ok() const { return status >= 200 && status < 300; }
  std::vector<std::string> reasons() const;
  std::string error() const { return body.value("error", std::string{}); }
};

struct OrgProfile {
  std::string display_name;
  std::string address;
  std::string tax_id;
  std::string endpoint;

  // 15 or 16 ASCII digits.
  static bool valid_tax_id(std::string_view id);
  nlohmann::json to_json() const;
  // Throws InvalidArgument, including for a badly formed tax id.
  static OrgProfile from_json(const nlohmann::json& j);
};

struct EventRecord {
  std::uint64_t sequence = 0;        // global: block order, then tx index
  std::uint64_t class_sequence = 0;  // position in the subscriber's feed
  std::uint64_t block_number = 0;
  std::uint32_t index = 0;
  Digest tx_id;
  std::string kind;
  ledger::TxType tx_type = ledger::TxType::PostNsfp;
  ledger::Visibility visibility;
  bool accepted = false;
  std::vector<std::string> reasons;
  nlohmann::json data;

  nlohmann::json to_json() const;
};

// Every committed transaction the caller may see, in global order, with
// class_sequence numbered 1.. and only events after `from` returned.
// DJP sees everything; others see broadcast events plus private events they
// are party to. Throws BadSequence for a negative `from`.
std::vector<EventRecord> subscribe_events(const netsim::OrgNode& node,
                                          const identity::Certificate& caller,
                                          std::int64_t from);

struct EfakturDocument {
  chaincode::Faktur faktur;
  std::string seller_cert_id;
  std::optional<OrgProfile> seller_profile;
  Digest verification_hash;
  std::uint64_t block_number = 0;
  Digest tx_id;
  Bytes payload;

  nlohmann::json to_json() const;
  std::string render_text() const;
};

// Printable invoice for a committed faktur. Throws NotCommitted when the
// serial has no accepted faktur, Forbidden unless the caller is the seller
// or DJP, IntegrityFailure when the node's private copy is gone or damaged.
EfakturDocument render_efaktur(const netsim::OrgNode& node,
                               const identity::Certificate& caller,
                               const chaincode::NsfpSerial& nsfp,
                               const OrgProfile* seller_profile = nullptr);

// Application service of one organization's node.
class Gateway {
 public:
  Gateway(netsim::Network& net, std::string org);

  ApiResponse handle(const ApiRequest& req);

  const std::string& org() const { return org_; }
  const OrgProfile& profile() const { return profile_; }
  // Ticks a mutating call may wait for its transaction to finish.
  LogicalTime op_budget = 600;

 private:
  struct Caller {
    const identity::Certificate* cert = nullptr;
  };
  struct Slot {
    Digest request_digest;
    std::optional<std::uint64_t> op_id;
    std::optional<ApiResponse> response;
  };

  netsim::OrgNode& node();
  ApiResponse route(const ApiRequest& req, const Caller& caller);
  ApiResponse mutate(const ApiRequest& req, const Caller& caller);
  ApiResponse await_op(std::uint64_t op_id);

  ApiResponse post_nsfp(const ApiRequest& req, const Caller& caller);
  ApiResponse get_nsfp(const std::map<std::string, std::string>& query, const Caller& caller);
  ApiResponse post_faktur(const ApiRequest& req, const Caller& caller);
  ApiResponse get_faktur(const std::map<std::string, std::string>& query, const Caller& caller);
  ApiResponse get_block(std::string_view number, const Caller& caller);
  ApiResponse get_events(const std::map<std::string, std::string>& query, const Caller& caller);
  ApiResponse put_profile(const ApiRequest& req, const Caller& caller);
  ApiResponse admin_revoke(const ApiRequest& req, const Caller& caller);
  ApiResponse run_scenario(std::string_view name, const ApiRequest& req, const Caller& caller);

  netsim::Network& net_;
  std::string org_;
  OrgProfile profile_;
  std::map<std::pair<std::string, std::uint64_t>, Slot> slots_;
};

// Splits "path?a=1&b=2" and percent-decodes the query values.
std::pair<std::string, std::map<std::string, std::string>> parse_target(std::string_view target);

}  // namespace fakturchain::gateway
