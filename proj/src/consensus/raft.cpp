// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/consensus/raft.hpp"

#include <algorithm>

#include "fakturchain/common/error.hpp"

namespace fakturchain::consensus {

namespace {

enum : std::uint8_t {
  kTagVote = 1,
  kTagVoteReply = 2,
  kTagAppend = 3,
  kTagAppendReply = 4,
};

std::uint64_t seed_for(std::uint64_t seed, const NodeId& id) {
  Encoder enc;
  enc.str("raft-timer").u64(seed).str(id);
  Digest d = Digest::of(enc.buffer());
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | d.raw()[i];
  return v;
}

}  // namespace

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Follower: return "follower";
    case Role::Candidate: return "candidate";
    case Role::Leader: return "leader";
  }
  return "?";
}

void LogEntry::encode(Encoder& enc) const {
  enc.u64(term).u64(index).u64(proposed_at).u32(static_cast<std::uint32_t>(batch.size()));
  for (const auto& env : batch) env.encode(enc);
}

LogEntry LogEntry::decode(Decoder& dec) {
  LogEntry e;
  e.term = dec.u64();
  e.index = dec.u64();
  e.proposed_at = dec.u64();
  std::uint32_t n = dec.u32();
  for (std::uint32_t i = 0; i < n; ++i)
    e.batch.push_back(ledger::TransactionEnvelope::decode(dec));
  return e;
}

std::uint64_t RaftMessage::term() const {
  return std::visit([](const auto& m) { return m.term; }, body);
}

std::string_view RaftMessage::kind_name() const {
  switch (body.index()) {
    case 0: return "RequestVote";
    case 1: return "RequestVoteReply";
    case 2: return "AppendEntries";
    default: return "AppendEntriesReply";
  }
}

Bytes RaftMessage::encode() const {
  Encoder enc;
  enc.str(from).str(to);
  if (const auto* m = std::get_if<RequestVote>(&body)) {
    enc.u8(kTagVote).u64(m->term).str(m->candidate).u64(m->last_log_index).u64(
        m->last_log_term);
  } else if (const auto* m = std::get_if<RequestVoteReply>(&body)) {
    enc.u8(kTagVoteReply).u64(m->term).boolean(m->granted);
  } else if (const auto* m = std::get_if<AppendEntries>(&body)) {
    enc.u8(kTagAppend).u64(m->term).str(m->leader).u64(m->prev_log_index).u64(
        m->prev_log_term);
    enc.u32(static_cast<std::uint32_t>(m->entries.size()));
    for (const auto& e : m->entries) e.encode(enc);
    enc.u64(m->leader_commit);
  } else {
    const auto& r = std::get<AppendEntriesReply>(body);
    enc.u8(kTagAppendReply).u64(r.term).boolean(r.success).u64(r.match_index);
  }
  return enc.take();
}

RaftMessage RaftMessage::decode(ByteView bytes) {
  Decoder dec(bytes);
  RaftMessage msg;
  msg.from = dec.str();
  msg.to = dec.str();
  switch (dec.u8()) {
    case kTagVote: {
      RequestVote m;
      m.term = dec.u64();
      m.candidate = dec.str();
      m.last_log_index = dec.u64();
      m.last_log_term = dec.u64();
      msg.body = std::move(m);
      break;
    }
    case kTagVoteReply: {
      RequestVoteReply m;
      m.term = dec.u64();
      m.granted = dec.boolean();
      msg.body = m;
      break;
    }
    case kTagAppend: {
      AppendEntries m;
      m.term = dec.u64();
      m.leader = dec.str();
      m.prev_log_index = dec.u64();
      m.prev_log_term = dec.u64();
      std::uint32_t n = dec.u32();
      for (std::uint32_t i = 0; i < n; ++i)
        m.entries.push_back(LogEntry::decode(dec));
      m.leader_commit = dec.u64();
      msg.body = std::move(m);
      break;
    }
    case kTagAppendReply: {
      AppendEntriesReply m;
      m.term = dec.u64();
      m.success = dec.boolean();
      m.match_index = dec.u64();
      msg.body = m;
      break;
    }
    default:
      throw Error(Errc::Malformed, "unknown raft message tag");
  }
  dec.expect_done();
  return msg;
}

void RaftOutput::append(RaftOutput&& other) {
  for (auto& m : other.messages) messages.push_back(std::move(m));
  for (auto& e : other.committed) committed.push_back(std::move(e));
}

RaftNode::RaftNode(NodeId id, std::vector<NodeId> peers, RaftConfig config,
                   LogicalTime now)
    : id_(std::move(id)),
      peers_(std::move(peers)),
      config_(config),
      rng_(seed_for(config.seed, id_)) {
  if (config_.election_timeout_max <= config_.election_timeout_min)
    throw Error(Errc::BadConfig, "election timeout range is empty");
  if (config_.heartbeat_interval == 0 ||
      config_.heartbeat_interval >= config_.election_timeout_min)
    throw Error(Errc::BadConfig,
                "heartbeat interval must be below the election timeout");
  if (std::find(peers_.begin(), peers_.end(), id_) != peers_.end())
    throw Error(Errc::BadConfig, "node listed among its own peers");
  reset_election_timer(now);
}

std::uint64_t RaftNode::last_log_term() const {
  return log_.empty() ? 0 : log_.back().term;
}

std::uint64_t RaftNode::term_at(std::uint64_t index) const {
  if (index == 0 || index > log_.size()) return 0;
  return log_[index - 1].term;
}

void RaftNode::reset_election_timer(LogicalTime now) {
  std::uint64_t span = config_.election_timeout_max - config_.election_timeout_min;
  election_deadline_ = now + config_.election_timeout_min + rng_() % span;
}

void RaftNode::step_down(std::uint64_t term) {
  if (term > current_term_) {
    current_term_ = term;
    voted_for_.reset();
  }
  if (role_ != Role::Follower) leader_hint_.reset();
  role_ = Role::Follower;
  votes_.clear();
}

void RaftNode::restart(LogicalTime now) {
  role_ = Role::Follower;
  leader_hint_.reset();
  votes_.clear();
  next_index_.clear();
  match_index_.clear();
  reset_election_timer(now);
}

RaftOutput RaftNode::tick(LogicalTime now) {
  RaftOutput out;
  if (role_ == Role::Leader) {
    if (now >= next_heartbeat_) {
      broadcast_append(out);
      next_heartbeat_ = now + config_.heartbeat_interval;
    }
  } else if (now >= election_deadline_) {
    start_election(now, out);
  }
  collect_committed(out);
  return out;
}

void RaftNode::start_election(LogicalTime now, RaftOutput& out) {
  ++current_term_;
  role_ = Role::Candidate;
  voted_for_ = id_;
  leader_hint_.reset();
  votes_ = {id_};
  reset_election_timer(now);
  if (votes_.size() >= majority()) {
    become_leader(now, out);
    return;
  }
  for (const auto& p : peers_) {
    out.messages.push_back(
        {id_, p, RequestVote{current_term_, id_, last_log_index(), last_log_term()}});
  }
}

void RaftNode::become_leader(LogicalTime now, RaftOutput& out) {
  role_ = Role::Leader;
  leader_hint_ = id_;
  votes_.clear();
  next_index_.clear();
  match_index_.clear();
  for (const auto& p : peers_) {
    next_index_[p] = last_log_index() + 1;
    match_index_[p] = 0;
  }
  // Entries from earlier terms only commit once something from this term
  // does, so open the term with an empty entry.
  log_.push_back({current_term_, last_log_index() + 1, now, {}});
  advance_commit();
  broadcast_append(out);
  next_heartbeat_ = now + config_.heartbeat_interval;
}

RaftMessage RaftNode::append_for(const NodeId& peer) const {
  std::uint64_t next = next_index_.at(peer);
  AppendEntries m;
  m.term = current_term_;
  m.leader = id_;
  m.prev_log_index = next - 1;
  m.prev_log_term = term_at(next - 1);
  for (std::uint64_t i = next;
       i <= log_.size() && m.entries.size() < config_.max_entries_per_append; ++i)
    m.entries.push_back(log_[i - 1]);
  m.leader_commit = commit_index_;
  return {id_, peer, std::move(m)};
}

void RaftNode::broadcast_append(RaftOutput& out) {
  for (const auto& p : peers_) out.messages.push_back(append_for(p));
}

void RaftNode::advance_commit() {
  if (role_ != Role::Leader) return;
  for (std::uint64_t n = log_.size(); n > commit_index_; --n) {
    if (log_[n - 1].term != current_term_) break;
    std::size_t count = 1;
    for (const auto& [p, m] : match_index_)
      if (m >= n) ++count;
    if (count >= majority()) {
      commit_index_ = n;
      break;
    }
  }
}

void RaftNode::collect_committed(RaftOutput& out) {
  while (last_applied_ < commit_index_) {
    ++last_applied_;
    out.committed.push_back(log_[last_applied_ - 1]);
  }
}

RaftOutput RaftNode::submit(std::vector<ledger::TransactionEnvelope> batch,
                            LogicalTime now) {
  if (role_ != Role::Leader) {
    throw Error(Errc::NotLeader,
                id_ + " is not leader" +
                    (leader_hint_ ? " (leader: " + *leader_hint_ + ")" : ""));
  }
  RaftOutput out;
  log_.push_back({current_term_, last_log_index() + 1, now, std::move(batch)});
  advance_commit();
  broadcast_append(out);
  next_heartbeat_ = now + config_.heartbeat_interval;
  collect_committed(out);
  return out;
}

RaftOutput RaftNode::handle_message(const RaftMessage& msg, LogicalTime now) {
  RaftOutput out;
  if (msg.to != id_) return out;
  if (msg.term() > current_term_) step_down(msg.term());

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RequestVote>)
          on_request_vote(msg.from, m, now, out);
        else if constexpr (std::is_same_v<T, RequestVoteReply>)
          on_vote_reply(msg.from, m, now, out);
        else if constexpr (std::is_same_v<T, AppendEntries>)
          on_append(msg.from, m, now, out);
        else
          on_append_reply(msg.from, m, out);
      },
      msg.body);
  collect_committed(out);
  return out;
}

void RaftNode::on_request_vote(const NodeId& from, const RequestVote& m,
                               LogicalTime now, RaftOutput& out) {
  bool up_to_date =
      m.last_log_term > last_log_term() ||
      (m.last_log_term == last_log_term() && m.last_log_index >= last_log_index());
  bool grant = m.term == current_term_ && role_ == Role::Follower &&
               (!voted_for_ || *voted_for_ == m.candidate) && up_to_date;
  if (grant) {
    voted_for_ = m.candidate;
    reset_election_timer(now);
  }
  out.messages.push_back({id_, from, RequestVoteReply{current_term_, grant}});
}

void RaftNode::on_vote_reply(const NodeId& from, const RequestVoteReply& m,
                             LogicalTime now, RaftOutput& out) {
  if (role_ != Role::Candidate || m.term != current_term_ || !m.granted) return;
  if (std::find(peers_.begin(), peers_.end(), from) == peers_.end()) return;
  votes_.insert(from);
  if (votes_.size() >= majority()) become_leader(now, out);
}

void RaftNode::on_append(const NodeId& from, const AppendEntries& m,
                         LogicalTime now, RaftOutput& out) {
  if (m.term < current_term_) {
    out.messages.push_back({id_, from, AppendEntriesReply{current_term_, false, 0}});
    return;
  }
  // Same term: a candidate concedes to the elected leader.
  if (role_ != Role::Follower) step_down(m.term);
  leader_hint_ = m.leader;
  reset_election_timer(now);

  if (m.prev_log_index > last_log_index() ||
      term_at(m.prev_log_index) != m.prev_log_term) {
    std::uint64_t hint = std::min(last_log_index(),
                                  m.prev_log_index == 0 ? 0 : m.prev_log_index - 1);
    out.messages.push_back({id_, from, AppendEntriesReply{current_term_, false, hint}});
    return;
  }

  std::uint64_t index = m.prev_log_index;
  for (const auto& entry : m.entries) {
    ++index;
    if (index <= last_log_index()) {
      if (term_at(index) == entry.term) continue;
      // Conflict: drop it and everything after. Committed entries never
      // conflict, so the applied prefix is untouched.
      log_.resize(index - 1);
    }
    log_.push_back(entry);
  }
  std::uint64_t match = m.prev_log_index + m.entries.size();
  if (m.leader_commit > commit_index_)
    commit_index_ = std::max(commit_index_, std::min(m.leader_commit, match));
  out.messages.push_back({id_, from, AppendEntriesReply{current_term_, true, match}});
}

void RaftNode::on_append_reply(const NodeId& from, const AppendEntriesReply& m,
                               RaftOutput& out) {
  if (role_ != Role::Leader || m.term != current_term_) return;
  auto it = next_index_.find(from);
  if (it == next_index_.end()) return;
  if (m.success) {
    auto& match = match_index_[from];
    match = std::max(match, m.match_index);
    it->second = std::max(it->second, match + 1);
    advance_commit();
    // Keep streaming if the follower is still behind.
    if (it->second <= last_log_index()) out.messages.push_back(append_for(from));
  } else {
    std::uint64_t next = std::min(it->second - 1, m.match_index + 1);
    it->second = std::max<std::uint64_t>(1, std::max(next, match_index_[from] + 1));
    out.messages.push_back(append_for(from));
  }
}

}  // namespace fakturchain::consensus
