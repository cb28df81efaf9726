// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakturchain/chaincode/chaincode.hpp"
#include "fakturchain/consensus/raft.hpp"
#include "fakturchain/identity/identity.hpp"

namespace fakturchain::netsim {

using NodeId = std::string;

inline constexpr LogicalTime kForever = std::numeric_limits<LogicalTime>::max();

enum class MessageKind : std::uint8_t {
  Raft = 1,
  Submit,
  SubmitReply,
  BlockRequest,
  BlockDeliver,
  CasPublish,
  PrivateData,
  PrivateAck,
  Alert,
};

std::string_view to_string(MessageKind k);
MessageKind parse_message_kind(std::string_view s);  // throws BadConfig

enum class FaultKind : std::uint8_t {
  Drop = 1,
  Delay,
  Partition,
  TamperBytes,
  CrashNode,
  RevivePartition,
  StealCredential,
  EncryptStore,
};

std::string_view to_string(FaultKind k);
FaultKind parse_fault_kind(std::string_view s);  // throws BadConfig

struct FaultRule {
  FaultKind kind = FaultKind::Drop;
  // Active for ticks in [from, until).
  LogicalTime from = 0;
  LogicalTime until = kForever;

  // Message predicate (Drop, Delay, TamperBytes). Unset fields match all.
  std::optional<MessageKind> match_kind;
  std::optional<NodeId> match_from;
  std::optional<NodeId> match_to;
  // Drop: chance in percent, drawn from the transport's seeded generator.
  std::uint32_t percent = 100;

  std::uint64_t delay_ticks = 0;                  // Delay
  std::vector<std::vector<NodeId>> groups;        // Partition
  std::int64_t offset = 0;                        // TamperBytes; <0 counts from end
  std::uint8_t xor_mask = 0xFF;                   // TamperBytes
  NodeId node;                                    // CrashNode
  std::string org;                                // StealCredential, EncryptStore
  double fraction = 0.0;                          // EncryptStore

  bool active_at(LogicalTime t) const { return from <= t && t < until; }
  bool matches(MessageKind kind, const NodeId& from, const NodeId& to) const;

  nlohmann::json to_json() const;
  static FaultRule from_json(const nlohmann::json& j);  // throws BadConfig
};

struct OrgSpec {
  std::string name;
  identity::OrgRole role = identity::OrgRole::PKP;
};

struct OrdererSpec {
  NodeId id;
  std::string host_org;
};

// What DJP does on its own when something is detected.
struct ResponsePolicy {
  bool audit_detections = true;   // record a ScenarioEvent per detection
  bool audit_rejections = true;   // invalid faktur bodies count as detections
  bool auto_revoke = true;        // revoke credentials flagged as stolen
};

struct NetworkConfig {
  std::vector<OrgSpec> orgs;
  std::vector<OrdererSpec> orderers;
  std::uint64_t seed = 1;
  std::vector<FaultRule> faults;
  LogicalTime tick_limit = 100000;
  chaincode::ChaincodeConfig chaincode;
  consensus::RaftConfig raft;  // seed is taken from `seed`
  ResponsePolicy policy;
  bool monitor_invariants = true;
  bool capture_wire = true;

  // 1 DJP + `pkp` PKPs ("PT Alpha", "PT Beta", ...) and `orderers` orderer
  // nodes; the first is hosted by DJP, the rest round-robin over the PKPs.
  static NetworkConfig standard(std::uint64_t seed, int pkp = 3, int orderers = 3);

  const std::string& djp_org() const;
  std::vector<std::string> pkp_orgs() const;
  const OrgSpec* find_org(std::string_view name) const;

  void validate() const;  // throws BadConfig

  nlohmann::json to_json() const;
  static NetworkConfig from_json(const nlohmann::json& j);  // throws BadConfig
  static NetworkConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

// Node ids used on the wire.
NodeId peer_id(std::string_view org);
inline const NodeId kAttackerNode = "attacker";

}  // namespace fakturchain::netsim
