// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/netsim/raft_cluster.hpp"

#include <algorithm>
#include <random>

#include "fakturchain/common/error.hpp"

namespace fakturchain::netsim {

namespace {

consensus::RaftConfig seeded(consensus::RaftConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  return cfg;
}

}  // namespace

std::vector<NodeId> RaftCluster::node_ids(int n) {
  std::vector<NodeId> ids;
  for (int i = 0; i < n; ++i) ids.push_back("orderer" + std::to_string(i));
  return ids;
}

RaftCluster::RaftCluster(ClusterOptions options)
    : options_(std::move(options)),
      ids_(node_ids(options_.nodes)),
      transport_(options_.faults, options_.seed, options_.record_trace ? &trace_ : nullptr,
                 false) {
  if (options_.nodes < 1) throw Error(Errc::BadConfig, "cluster needs a node");
  for (const auto& id : ids_) {
    std::vector<NodeId> peers;
    for (const auto& p : ids_)
      if (p != id) peers.push_back(p);
    nodes_.emplace_back(id, peers, seeded(options_.raft, options_.seed), 0);
  }
  down_.assign(ids_.size(), false);
  applied_.resize(ids_.size());
}

std::optional<std::size_t> RaftCluster::leader() const {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (down_[i] || nodes_[i].role() != consensus::Role::Leader) continue;
    if (!best || nodes_[i].current_term() > nodes_[*best].current_term()) best = i;
  }
  return best;
}

bool RaftCluster::propose() {
  bool any = false;
  // Stale leaders cut off by a partition get proposals too; their entries
  // must be discarded without harm.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (down_[i] || nodes_[i].role() != consensus::Role::Leader) continue;
    ledger::TransactionEnvelope marker;
    marker.nonce = next_marker_++;
    marker.created_at = now_;
    route(i, nodes_[i].submit({marker}, now_));
    any = true;
  }
  return any;
}

void RaftCluster::route(std::size_t from, consensus::RaftOutput out) {
  for (const auto& m : out.messages)
    transport_.send(ids_[from], m.to, MessageKind::Raft, m.encode(), now_);
  for (auto& e : out.committed) {
    if (!e.batch.empty() && !first_commit_) first_commit_ = now_;
    applied_[from].push_back(std::move(e));
  }
}

void RaftCluster::step() {
  ++now_;
  for (const auto& f : options_.faults) {
    if (f.kind != FaultKind::CrashNode) continue;
    auto it = std::find(ids_.begin(), ids_.end(), f.node);
    if (it == ids_.end()) continue;
    std::size_t i = static_cast<std::size_t>(it - ids_.begin());
    if (f.from == now_ && !down_[i]) {
      down_[i] = true;
      if (options_.record_trace) trace_.record(now_, TraceKind::Crash, {ids_[i]});
    }
    if (f.until == now_ && down_[i]) {
      down_[i] = false;
      nodes_[i].restart(now_);
      if (options_.record_trace) trace_.record(now_, TraceKind::Revive, {ids_[i]});
    }
  }

  auto down = [this](const NodeId& id) {
    auto it = std::find(ids_.begin(), ids_.end(), id);
    return it != ids_.end() && down_[static_cast<std::size_t>(it - ids_.begin())];
  };
  for (const auto& m : transport_.deliver_due(now_, down)) {
    auto it = std::find(ids_.begin(), ids_.end(), m.to);
    if (it == ids_.end()) continue;
    std::size_t i = static_cast<std::size_t>(it - ids_.begin());
    consensus::RaftMessage msg;
    try {
      msg = consensus::RaftMessage::decode(m.payload);
    } catch (const Error&) {
      continue;
    }
    route(i, nodes_[i].handle_message(msg, now_));
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (!down_[i]) route(i, nodes_[i].tick(now_));

  if (leader() && !first_leader_) first_leader_ = now_;
  if (options_.propose_every && now_ % options_.propose_every == 0) propose();
  check_safety(now_ % 5 == 0);
}

bool RaftCluster::run_until(const std::function<bool(const RaftCluster&)>& pred,
                            LogicalTime max_ticks) {
  for (LogicalTime i = 0;; ++i) {
    if (pred(*this)) return true;
    if (i >= max_ticks) return false;
    step();
  }
}

void RaftCluster::check_safety(bool full) {
  auto fail = [&](std::string what) {
    violations_.push_back("tick " + std::to_string(now_) + ": " + std::move(what));
  };

  // Election safety: at most one leader per term, ever.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].role() != consensus::Role::Leader) continue;
    auto [it, fresh] = leaders_by_term_.emplace(nodes_[i].current_term(), i);
    if (!fresh && it->second != i)
      fail("two leaders in term " + std::to_string(nodes_[i].current_term()));
  }

  // State machine safety: every node's committed stream is a prefix of one
  // global sequence.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& a = applied_[i];
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (k == global_committed_.size()) {
        global_committed_.push_back(a[k]);
      } else if (!(global_committed_[k] == a[k])) {
        fail(ids_[i] + " committed a different entry at index " + std::to_string(k + 1));
        break;
      }
    }
  }
  if (!full) return;

  // No committed entry is ever lost from a log.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& log = nodes_[i].log();
    std::uint64_t c = nodes_[i].commit_index();
    if (log.size() < c) {
      fail(ids_[i] + " log shorter than commit index");
      continue;
    }
    for (std::uint64_t k = 0; k < c && k < global_committed_.size(); ++k)
      if (!(log[k] == global_committed_[k])) {
        fail(ids_[i] + " lost committed entry " + std::to_string(k + 1));
        break;
      }
  }

  // Log matching: same (index, term) implies identical prefixes.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
      const auto& x = nodes_[i].log();
      const auto& y = nodes_[j].log();
      std::size_t n = std::min(x.size(), y.size());
      std::size_t last = 0;
      for (std::size_t k = n; k > 0; --k)
        if (x[k - 1].term == y[k - 1].term) {
          last = k;
          break;
        }
      for (std::size_t k = 0; k < last; ++k)
        if (!(x[k] == y[k])) {
          fail("logs of " + ids_[i] + " and " + ids_[j] + " differ at " +
               std::to_string(k + 1) + " below a matching entry");
          break;
        }
    }
  }
}

std::vector<FaultRule> RaftCluster::random_schedule(std::uint64_t seed,
                                                    const std::vector<NodeId>& ids,
                                                    LogicalTime horizon, bool minority_only) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 17);
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };
  std::vector<FaultRule> rules;
  const std::size_t n = ids.size();
  const std::size_t minority = (n - 1) / 2;

  // Crashes. In minority mode crash windows never overlap across more than
  // `minority` nodes: each victim gets its own slot.
  std::size_t crashes = minority_only ? pick(0, minority) : pick(0, n);
  std::vector<NodeId> order = ids;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  for (std::size_t c = 0; c < crashes; ++c) {
    FaultRule r;
    r.kind = FaultKind::CrashNode;
    r.node = order[c % n];
    r.from = pick(1, horizon / 2);
    bool permanent = minority_only && rng() % 3 == 0;
    r.until = permanent ? kForever : r.from + pick(5, horizon / 3);
    rules.push_back(r);
  }

  // Partitions (two groups), healed by a RevivePartition or their window.
  std::size_t partitions = pick(0, 2);
  for (std::size_t p = 0; p < partitions; ++p) {
    FaultRule r;
    r.kind = FaultKind::Partition;
    std::vector<NodeId> a, b;
    for (const auto& id : ids) (rng() % 2 ? a : b).push_back(id);
    if (a.empty() || b.empty()) continue;
    r.groups = {a, b};
    r.from = pick(1, horizon / 2);
    r.until = r.from + pick(5, horizon / 4);
    rules.push_back(r);
    if (rng() % 2) {
      FaultRule heal;
      heal.kind = FaultKind::RevivePartition;
      heal.from = pick(r.from + 1, r.until);
      rules.push_back(heal);
    }
  }

  // Lossy and slow links.
  if (rng() % 2) {
    FaultRule r;
    r.kind = FaultKind::Drop;
    r.percent = static_cast<std::uint32_t>(pick(5, minority_only ? 15 : 40));
    r.from = pick(1, horizon / 2);
    r.until = r.from + pick(10, horizon / 2);
    rules.push_back(r);
  }
  if (rng() % 2) {
    FaultRule r;
    r.kind = FaultKind::Delay;
    r.delay_ticks = pick(1, 4);
    r.match_to = ids[rng() % n];
    r.from = pick(1, horizon / 2);
    r.until = r.from + pick(10, horizon / 2);
    rules.push_back(r);
  }
  return rules;
}

}  // namespace fakturchain::netsim
