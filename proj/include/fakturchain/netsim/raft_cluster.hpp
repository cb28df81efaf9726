// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fakturchain/consensus/raft.hpp"
#include "fakturchain/netsim/config.hpp"
#include "fakturchain/netsim/trace.hpp"
#include "fakturchain/netsim/transport.hpp"

namespace fakturchain::netsim {

struct ClusterOptions {
  int nodes = 3;
  std::uint64_t seed = 1;
  std::vector<FaultRule> faults;  // Drop, Delay, Partition, RevivePartition, CrashNode
  consensus::RaftConfig raft;
  // The harness proposes one marker batch every this many ticks while a
  // leader is up (0 disables).
  LogicalTime propose_every = 5;
  bool record_trace = false;
};

// Orderer-only cluster on the fault-injecting transport, checking the
// consensus safety properties after every tick.
class RaftCluster {
 public:
  explicit RaftCluster(ClusterOptions options);

  void step();
  bool run_until(const std::function<bool(const RaftCluster&)>& pred, LogicalTime max_ticks);

  LogicalTime now() const { return now_; }
  const std::vector<NodeId>& ids() const { return ids_; }
  const std::vector<consensus::RaftNode>& nodes() const { return nodes_; }
  bool is_down(std::size_t i) const { return down_[i]; }
  std::optional<std::size_t> leader() const;

  // Proposes a marker batch at every live node that believes it leads;
  // false when there is none.
  bool propose();
  std::uint64_t proposals() const { return next_marker_ - 1; }

  // Entries reported committed by node i, in order.
  const std::vector<consensus::LogEntry>& committed(std::size_t i) const { return applied_[i]; }
  // Tick at which the first non-empty entry was reported committed.
  std::optional<LogicalTime> first_commit() const { return first_commit_; }
  std::optional<LogicalTime> first_leader() const { return first_leader_; }

  const std::vector<std::string>& violations() const { return violations_; }
  const Trace& trace() const { return trace_; }

  // Random crash / partition / drop / delay schedule over [1, horizon).
  // With minority_only, at most (n-1)/2 nodes are ever down at once and no
  // partition outlives the horizon.
  static std::vector<FaultRule> random_schedule(std::uint64_t seed,
                                                const std::vector<NodeId>& ids,
                                                LogicalTime horizon, bool minority_only);
  static std::vector<NodeId> node_ids(int n);

 private:
  void route(std::size_t from, consensus::RaftOutput out);
  void check_safety(bool full);

  ClusterOptions options_;
  std::vector<NodeId> ids_;
  Trace trace_;
  Transport transport_;
  std::vector<consensus::RaftNode> nodes_;
  std::vector<bool> down_;
  std::vector<std::vector<consensus::LogEntry>> applied_;
  LogicalTime now_ = 0;
  std::uint64_t next_marker_ = 1;

  std::map<std::uint64_t, std::size_t> leaders_by_term_;
  std::vector<consensus::LogEntry> global_committed_;
  std::optional<LogicalTime> first_commit_;
  std::optional<LogicalTime> first_leader_;
  std::vector<std::string> violations_;
};

}  // namespace fakturchain::netsim
