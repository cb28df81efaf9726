// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakturchain/chaincode/chaincode.hpp"
#include "fakturchain/consensus/raft.hpp"
#include "fakturchain/dataplane/dataplane.hpp"
#include "fakturchain/ledger/apply.hpp"
#include "fakturchain/ledger/chain.hpp"
#include "fakturchain/ledger/membership.hpp"
#include "fakturchain/netsim/config.hpp"
#include "fakturchain/netsim/trace.hpp"
#include "fakturchain/netsim/transport.hpp"
#include "fakturchain/netsim/wire.hpp"

namespace fakturchain::netsim {

// Nonces a node picks for its own transactions carry this bit, keeping them
// apart from client-chosen request nonces.
inline constexpr std::uint64_t kInternalNonceBit = 1ULL << 63;
inline constexpr LogicalTime kCertLifetime = 1'000'000'000;

enum class OpKind : std::uint8_t { PostNsfp = 1, PostFaktur, Revoke, ScenarioEvent };
enum class OpState : std::uint8_t {
  Exchanging = 1,  // private payload out to DJP, waiting for endorsement
  Submitting,      // envelope out to an orderer, waiting for its reply
  AwaitingCommit,  // accepted by the leader, waiting to see it in a block
  Committed,
  Rejected,
  Failed,
};
enum class OpFailure : std::uint8_t {
  None = 0,
  Auth,         // a certificate did not check out
  Invalid,      // chaincode or DJP validation said no
  Integrity,    // the private exchange was corrupted in transit
  Unavailable,  // retry budget exhausted
};

std::string_view to_string(OpKind k);
std::string_view to_string(OpState s);
std::string_view to_string(OpFailure f);

// A client transaction as tracked by the submitting org's node.
struct Operation {
  std::uint64_t id = 0;
  OpKind kind = OpKind::PostNsfp;
  OpState state = OpState::Submitting;
  OpFailure failure = OpFailure::None;
  std::uint64_t nonce = 0;
  LogicalTime started_at = 0;
  LogicalTime finished_at = 0;

  std::optional<ledger::TransactionEnvelope> envelope;
  std::optional<ledger::ContentAddress> cas_address;  // PostNsfp
  std::optional<chaincode::Faktur> faktur;            // PostFaktur
  Bytes private_payload;
  std::optional<dataplane::PrivateEnvelope> exchange;

  std::size_t cursor = 0;  // orderer currently targeted
  std::uint32_t attempts = 0;
  LogicalTime deadline = 0;

  std::vector<std::string> reasons;
  std::string detail;
  std::uint64_t block_number = 0;

  bool done() const { return state >= OpState::Committed; }
  nlohmann::json to_json() const;
};

struct OrdererNode {
  NodeId id;
  std::string host_org;
  identity::Certificate cert;
  crypto::KeyPair keys;
  consensus::RaftNode raft;
  ledger::Chain chain;
  ledger::WorldState state;
  std::vector<ledger::TransactionEnvelope> pending;
  bool crashed = false;
};

// An organization's node: peer (chain + world state), CAS replica,
// private store and the client side of the gateway.
struct OrgNode {
  NodeId id;
  std::string org;
  identity::OrgRole role = identity::OrgRole::PKP;
  identity::Certificate cert;
  crypto::KeyPair keys;
  ledger::Chain chain;
  ledger::WorldState state;
  dataplane::CasStore cas;
  dataplane::OffchainStore store;
  bool crashed = false;

  std::map<std::uint64_t, Operation> ops;
  std::uint64_t next_op = 1;
  std::uint64_t next_internal_nonce = 1;
  std::map<Digest, std::uint64_t> op_by_tx;
  std::map<std::uint64_t, std::uint64_t> op_by_transfer;
  std::size_t leader_guess = 0;

  std::size_t pull_target = 0;
  bool pull_outstanding = false;
  LogicalTime pull_deadline = 0;
  LogicalTime next_pull = 0;

  // DJP only.
  std::optional<identity::CertificateAuthority> ca;
  struct Deferred {
    NodeId from;
    wire::PrivateData data;
    LogicalTime since = 0;
  };
  std::vector<Deferred> deferred;
  std::set<std::string> revocations_requested;
};

struct Detection {
  std::uint64_t trace_seq = 0;
  LogicalTime tick = 0;
  NodeId observer;
  std::string category;
  std::string subject;
  std::string detail;
  Digest related;

  nlohmann::json to_json() const;
};

namespace category {
inline constexpr std::string_view kCredentialAnomaly = "credential-anomaly";
inline constexpr std::string_view kPrivateIntegrity = "private-integrity";
inline constexpr std::string_view kCasIntegrity = "cas-integrity";
inline constexpr std::string_view kBlockIntegrity = "block-integrity";
inline constexpr std::string_view kInputValidation = "input-validation";
inline constexpr std::string_view kStoreIntegrity = "store-integrity";
}  // namespace category

struct AttackerSubmission {
  ledger::TransactionEnvelope envelope;
  std::optional<wire::SubmitReply> reply;
  std::uint32_t hops = 0;
  LogicalTime sent_at = 0;
};

struct Violation {
  LogicalTime tick = 0;
  std::string invariant;
  std::string detail;
};

// The whole simulated deployment driven by one logical clock.
class Network {
 public:
  // Throws BadConfig.
  static std::unique_ptr<Network> spawn(NetworkConfig config);

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  // Advances one tick. Throws InvalidArgument at the tick limit.
  void step();
  // Steps until `pred` holds (checked before each step) or `max_ticks`
  // steps or the tick limit pass. Returns whether `pred` held.
  bool run_until(const std::function<bool(const Network&)>& pred,
                 LogicalTime max_ticks);
  void run_for(LogicalTime ticks);

  LogicalTime now() const { return now_; }
  const NetworkConfig& config() const { return config_; }
  Trace& trace() { return trace_; }
  const Trace& trace() const { return trace_; }
  const Transport& transport() const { return transport_; }
  const ledger::Membership& membership() const { return membership_; }
  ledger::ApplyContext apply_context() const { return {membership_, config_.chaincode}; }

  std::vector<OrdererNode>& orderers() { return orderers_; }
  const std::vector<OrdererNode>& orderers() const { return orderers_; }
  std::vector<OrgNode>& orgs() { return orgs_; }
  const std::vector<OrgNode>& orgs() const { return orgs_; }
  OrgNode& org(std::string_view name);  // throws NotFound
  const OrgNode& org(std::string_view name) const;
  OrdererNode& orderer(std::string_view id);  // throws NotFound
  const OrgNode& djp() const;
  bool is_down(const NodeId& node) const;

  // Live leader with the highest term, if any.
  std::optional<NodeId> leader() const;
  // Height every live node has reached.
  std::uint64_t synced_height() const;
  std::uint64_t max_height() const;

  // --- client operations, run asynchronously by the org's node ---
  std::uint64_t post_nsfp(std::string_view org, int tax_year, std::uint32_t count,
                          std::uint64_t nonce);
  std::uint64_t post_faktur(std::string_view org, chaincode::Faktur faktur,
                            std::uint64_t nonce);
  std::uint64_t revoke_cert(std::string_view org, std::string cert_id,
                            std::string reason, bool revoke_serials,
                            std::uint64_t nonce);
  std::uint64_t record_event(std::string_view org, chaincode::ScenarioEventArgs args,
                             std::uint64_t nonce);
  // Submits an envelope the caller built and signed itself.
  std::uint64_t submit_envelope(std::string_view org, ledger::TransactionEnvelope env);
  std::uint64_t next_internal_nonce(std::string_view org);
  const Operation& operation(std::string_view org, std::uint64_t id) const;
  // Steps until the operation finishes or `budget` ticks pass.
  const Operation& await(std::string_view org, std::uint64_t id,
                         LogicalTime budget = 600);

  // --- detection and response ---
  const std::vector<Detection>& detections() const { return detections_; }
  // Records a detection observed by `observer` and routes it to DJP.
  std::uint64_t detect(const NodeId& observer, std::string_view category,
                       std::string subject, std::string detail, Digest related = {});
  // Integrity sweep of an org's private store against the chain; each bad
  // record is a store-integrity detection.
  dataplane::SweepReport sweep_store(std::string_view org);

  // --- attacker endpoint ---
  bool credential_stolen(std::string_view org) const { return stolen_.count(std::string(org)) != 0; }
  // Signs with a stolen org key. Throws Forbidden unless stolen.
  ledger::TransactionEnvelope forge(std::string_view org, ledger::TxType type,
                                    ledger::PayloadAnchor anchor,
                                    ledger::Visibility visibility, Bytes args,
                                    std::uint64_t nonce) const;
  void attacker_submit(const ledger::TransactionEnvelope& env);
  const std::map<Digest, AttackerSubmission>& attacker_submissions() const {
    return attacker_;
  }

  // Adds a fault that starts in the future. Throws BadConfig.
  void add_fault(FaultRule rule);

  const std::vector<Violation>& violations() const { return violations_; }
  const std::map<std::uint64_t, NodeId>& leaders_by_term() const { return leaders_by_term_; }

 private:
  explicit Network(NetworkConfig config);

  void activate_faults(LogicalTime t);
  void set_crashed(const NodeId& node, bool crashed);
  void encrypt_store(const FaultRule& rule);

  void send(const NodeId& from, const NodeId& to, MessageKind kind, Bytes payload);
  void dispatch(const WireMessage& m);

  void orderer_receive(OrdererNode& o, const WireMessage& m);
  void orderer_submit(OrdererNode& o, const ledger::TransactionEnvelope& env,
                      const NodeId& origin);
  void handle_raft(OrdererNode& o, consensus::RaftOutput out);
  void build_block(OrdererNode& o, const consensus::LogEntry& entry);

  void org_receive(OrgNode& n, const WireMessage& m);
  void org_timers(OrgNode& n);
  void deliver_blocks(OrgNode& n, const NodeId& from, ByteView payload);
  bool apply_block(OrgNode& n, const NodeId& from, const ledger::Block& block);
  void receive_private(OrgNode& n, const NodeId& from, const wire::PrivateData& data);
  void receive_ack(OrgNode& n, const wire::PrivateAck& ack);
  void receive_submit_reply(OrgNode& n, const wire::SubmitReply& reply);
  void receive_alert(OrgNode& n, const wire::Alert& alert);
  void respond(const Detection& d);

  Operation& new_op(OrgNode& n, OpKind kind, std::uint64_t nonce);
  void start_exchange(OrgNode& n, Operation& op);
  void submit_op(OrgNode& n, Operation& op);
  void finish(OrgNode& n, Operation& op, OpState state, OpFailure failure,
              std::string detail);
  std::uint64_t submit_internal(OrgNode& n, ledger::TxType type, Bytes args);

  void attacker_receive(const WireMessage& m);
  void check_invariants();

  dataplane::Trust trust_for(const OrgNode& n) const {
    return {membership_.root_key(), n.state.cert_revocations, now_};
  }
  std::size_t orderer_index(std::string_view id) const;

  NetworkConfig config_;
  LogicalTime now_ = 0;
  Trace trace_;
  Transport transport_;
  ledger::Membership membership_;
  std::vector<OrdererNode> orderers_;
  std::vector<OrgNode> orgs_;
  std::set<std::string> stolen_;
  std::map<Digest, AttackerSubmission> attacker_;
  std::size_t attacker_cursor_ = 0;
  std::vector<Detection> detections_;

  std::vector<Violation> violations_;
  std::map<std::uint64_t, NodeId> leaders_by_term_;
  std::vector<std::uint64_t> committed_terms_;  // raft index-1 -> term
  std::map<std::uint64_t, Digest> block_hashes_;
  std::map<std::uint64_t, Digest> state_hashes_;
  std::map<NodeId, std::uint64_t> checked_height_;
};

}  // namespace fakturchain::netsim
