// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fakturchain/ledger/envelope.hpp"

namespace fakturchain::consensus {

using NodeId = std::string;

enum class Role : std::uint8_t { Follower, Candidate, Leader };
std::string_view to_string(Role r);

struct LogEntry {
  std::uint64_t term = 0;
  std::uint64_t index = 0;
  // Leader's clock when the entry was appended; becomes the block time.
  LogicalTime proposed_at = 0;
  // Empty batches are the leader's term-start no-op.
  std::vector<ledger::TransactionEnvelope> batch;

  void encode(Encoder& enc) const;
  static LogEntry decode(Decoder& dec);
  bool operator==(const LogEntry&) const = default;
};

struct RequestVote {
  std::uint64_t term = 0;
  NodeId candidate;
  std::uint64_t last_log_index = 0;
  std::uint64_t last_log_term = 0;
};

struct RequestVoteReply {
  std::uint64_t term = 0;
  bool granted = false;
};

struct AppendEntries {
  std::uint64_t term = 0;
  NodeId leader;
  std::uint64_t prev_log_index = 0;
  std::uint64_t prev_log_term = 0;
  std::vector<LogEntry> entries;
  std::uint64_t leader_commit = 0;
};

struct AppendEntriesReply {
  std::uint64_t term = 0;
  bool success = false;
  // On success: index of the follower's last matching entry. On failure: a
  // hint for where the leader should retry from.
  std::uint64_t match_index = 0;
};

struct RaftMessage {
  NodeId from;
  NodeId to;
  std::variant<RequestVote, RequestVoteReply, AppendEntries, AppendEntriesReply>
      body;

  std::uint64_t term() const;
  std::string_view kind_name() const;

  Bytes encode() const;
  static RaftMessage decode(ByteView bytes);  // throws Malformed
};

struct RaftConfig {
  std::uint64_t election_timeout_min = 10;
  std::uint64_t election_timeout_max = 20;  // exclusive
  std::uint64_t heartbeat_interval = 3;
  std::uint64_t seed = 0;
  std::size_t max_entries_per_append = 64;
};

struct RaftOutput {
  std::vector<RaftMessage> messages;
  // Entries newly known committed, each reported exactly once, in order.
  std::vector<LogEntry> committed;

  void append(RaftOutput&& other);
};

// Raft participant as a pure state machine: every event (tick, message,
// client batch) goes in, messages and commit notifications come out.
class RaftNode {
 public:
  RaftNode(NodeId id, std::vector<NodeId> peers, RaftConfig config,
           LogicalTime now = 0);

  RaftOutput tick(LogicalTime now);
  RaftOutput handle_message(const RaftMessage& msg, LogicalTime now);
  // Appends the batch at the next index in the current term. Throws
  // Error(NotLeader).
  RaftOutput submit(std::vector<ledger::TransactionEnvelope> batch,
                    LogicalTime now);

  // Recovery after a crash: persistent state (term, vote, log, applied
  // prefix) survives, volatile leadership state does not.
  void restart(LogicalTime now);

  const NodeId& id() const { return id_; }
  const std::vector<NodeId>& peers() const { return peers_; }
  Role role() const { return role_; }
  std::uint64_t current_term() const { return current_term_; }
  const std::optional<NodeId>& voted_for() const { return voted_for_; }
  const std::optional<NodeId>& leader_hint() const { return leader_hint_; }
  const std::vector<LogEntry>& log() const { return log_; }
  std::uint64_t commit_index() const { return commit_index_; }
  std::uint64_t last_applied() const { return last_applied_; }
  std::uint64_t last_log_index() const { return log_.size(); }
  std::uint64_t last_log_term() const;
  std::uint64_t term_at(std::uint64_t index) const;
  LogicalTime election_deadline() const { return election_deadline_; }

 private:
  std::size_t majority() const { return (peers_.size() + 1) / 2 + 1; }
  void reset_election_timer(LogicalTime now);
  void step_down(std::uint64_t term);
  void start_election(LogicalTime now, RaftOutput& out);
  void become_leader(LogicalTime now, RaftOutput& out);
  RaftMessage append_for(const NodeId& peer) const;
  void broadcast_append(RaftOutput& out);
  void advance_commit();
  void collect_committed(RaftOutput& out);

  void on_request_vote(const NodeId& from, const RequestVote& m, LogicalTime now,
                       RaftOutput& out);
  void on_vote_reply(const NodeId& from, const RequestVoteReply& m,
                     LogicalTime now, RaftOutput& out);
  void on_append(const NodeId& from, const AppendEntries& m, LogicalTime now,
                 RaftOutput& out);
  void on_append_reply(const NodeId& from, const AppendEntriesReply& m,
                       RaftOutput& out);

  NodeId id_;
  std::vector<NodeId> peers_;
  RaftConfig config_;
  std::mt19937_64 rng_;

  Role role_ = Role::Follower;
  std::uint64_t current_term_ = 0;
  std::optional<NodeId> voted_for_;
  std::optional<NodeId> leader_hint_;
  std::vector<LogEntry> log_;
  std::uint64_t commit_index_ = 0;
  std::uint64_t last_applied_ = 0;

  LogicalTime election_deadline_ = 0;
  LogicalTime next_heartbeat_ = 0;
  std::set<NodeId> votes_;
  std::map<NodeId, std::uint64_t> next_index_;
  std::map<NodeId, std::uint64_t> match_index_;
};

}  // namespace fakturchain::consensus
