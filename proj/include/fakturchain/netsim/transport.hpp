// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "fakturchain/netsim/config.hpp"
#include "fakturchain/netsim/trace.hpp"

namespace fakturchain::netsim {

struct WireMessage {
  std::uint64_t id = 0;
  NodeId from;
  NodeId to;
  MessageKind kind = MessageKind::Raft;
  Bytes payload;
  LogicalTime sent_at = 0;
  LogicalTime deliver_at = 0;
  bool tampered = false;
};

// Deterministic message fabric. Delay rules apply at send time; drop,
// partition and tamper rules at delivery time. Every sent message ends in
// exactly one Deliver or Drop trace event.
class Transport {
 public:
  Transport(std::vector<FaultRule> rules, std::uint64_t seed, Trace* trace,
            bool capture_wire);

  std::uint64_t send(const NodeId& from, const NodeId& to, MessageKind kind,
                     Bytes payload, LogicalTime now);

  // Removes every message due at or before `now` and returns those that
  // survive the fault rules, in (deliver_at, id) order. Messages for nodes
  // where `is_down` holds are dropped.
  std::vector<WireMessage> deliver_due(
      LogicalTime now, const std::function<bool(const NodeId&)>& is_down);

  void add_rule(FaultRule rule) { rules_.push_back(std::move(rule)); }

  bool partitioned(const NodeId& a, const NodeId& b, LogicalTime now) const;

  std::size_t in_flight() const { return queue_.size(); }
  std::set<std::uint64_t> in_flight_ids() const;
  std::uint64_t sent_count() const { return next_id_ - 1; }

  // Every payload as it left the sender and, when altered, as delivered.
  const std::vector<Bytes>& wire_log() const { return wire_log_; }

 private:
  std::vector<FaultRule> rules_;
  std::mt19937_64 rng_;
  Trace* trace_;
  bool capture_;
  std::uint64_t next_id_ = 1;
  std::map<std::pair<LogicalTime, std::uint64_t>, WireMessage> queue_;
  std::vector<Bytes> wire_log_;
};

}  // namespace fakturchain::netsim
