// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/netsim/transport.hpp"

#include <algorithm>

namespace fakturchain::netsim {

namespace {

int group_of(const FaultRule& rule, const NodeId& n) {
  for (std::size_t i = 0; i < rule.groups.size(); ++i) {
    const auto& g = rule.groups[i];
    if (std::find(g.begin(), g.end(), n) != g.end()) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

Transport::Transport(std::vector<FaultRule> rules, std::uint64_t seed, Trace* trace,
                     bool capture_wire)
    : rules_(std::move(rules)), rng_(seed ^ 0x7472616e73706f72ULL), trace_(trace),
      capture_(capture_wire) {}

std::uint64_t Transport::send(const NodeId& from, const NodeId& to, MessageKind kind,
                              Bytes payload, LogicalTime now) {
  WireMessage m;
  m.id = next_id_++;
  m.from = from;
  m.to = to;
  m.kind = kind;
  m.sent_at = now;
  m.deliver_at = now + 1;
  if (trace_)
    trace_->record(now, TraceKind::Send, {from, to}, std::string(to_string(kind)),
                   Digest::of(payload), m.id);
  for (const auto& r : rules_) {
    if (r.kind == FaultKind::Delay && r.active_at(now) && r.matches(kind, from, to)) {
      m.deliver_at += r.delay_ticks;
      if (trace_)
        trace_->record(now, TraceKind::Delay, {from, to},
                       "+" + std::to_string(r.delay_ticks) + " ticks", std::nullopt, m.id);
    }
  }
  if (capture_) wire_log_.push_back(payload);
  m.payload = std::move(payload);
  queue_.emplace(std::make_pair(m.deliver_at, m.id), std::move(m));
  return next_id_ - 1;
}

bool Transport::partitioned(const NodeId& a, const NodeId& b, LogicalTime now) const {
  for (const auto& r : rules_) {
    if (r.kind != FaultKind::Partition || !r.active_at(now)) continue;
    bool healed = std::any_of(rules_.begin(), rules_.end(), [&](const FaultRule& h) {
      return h.kind == FaultKind::RevivePartition && h.from > r.from && h.from <= now;
    });
    if (healed) continue;
    int ga = group_of(r, a), gb = group_of(r, b);
    if (ga >= 0 && gb >= 0 && ga != gb) return true;
  }
  return false;
}

std::vector<WireMessage> Transport::deliver_due(
    LogicalTime now, const std::function<bool(const NodeId&)>& is_down) {
  std::vector<WireMessage> out;
  while (!queue_.empty() && queue_.begin()->first.first <= now) {
    WireMessage m = std::move(queue_.begin()->second);
    queue_.erase(queue_.begin());

    std::string drop_reason;
    if (is_down && is_down(m.to)) {
      drop_reason = "receiver down";
    } else if (partitioned(m.from, m.to, now)) {
      drop_reason = "partition";
    } else {
      for (const auto& r : rules_) {
        if (r.kind != FaultKind::Drop || !r.active_at(now) || !r.matches(m.kind, m.from, m.to))
          continue;
        if (r.percent >= 100 || rng_() % 100 < r.percent) {
          drop_reason = "drop rule";
          break;
        }
      }
    }
    if (!drop_reason.empty()) {
      if (trace_) trace_->record(now, TraceKind::Drop, {m.from, m.to}, drop_reason, std::nullopt, m.id);
      continue;
    }

    for (const auto& r : rules_) {
      if (r.kind != FaultKind::TamperBytes || !r.active_at(now) ||
          !r.matches(m.kind, m.from, m.to) || m.payload.empty())
        continue;
      auto size = static_cast<std::int64_t>(m.payload.size());
      std::int64_t pos = r.offset >= 0 ? r.offset % size : size - 1 - ((-r.offset - 1) % size);
      m.payload[static_cast<std::size_t>(pos)] ^= r.xor_mask;
      m.tampered = true;
      if (trace_)
        trace_->record(now, TraceKind::Tamper, {m.from, m.to},
                       "byte " + std::to_string(pos) + " of " + std::string(to_string(m.kind)),
                       Digest::of(m.payload), m.id);
    }
    if (m.tampered && capture_) wire_log_.push_back(m.payload);
    if (trace_) trace_->record(now, TraceKind::Deliver, {m.from, m.to}, std::string(to_string(m.kind)), std::nullopt, m.id);
    out.push_back(std::move(m));
  }
  return out;
}

std::set<std::uint64_t> Transport::in_flight_ids() const {
  std::set<std::uint64_t> ids;
  for (const auto& [k, m] : queue_) ids.insert(m.id);
  return ids;
}

}  // namespace fakturchain::netsim
