// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/netsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fakturchain/common/error.hpp"

namespace fakturchain::netsim {

namespace {

namespace cc = chaincode;
using ledger::TxType;

constexpr std::uint32_t kMaxSubmitAttempts = 24;
constexpr std::uint32_t kMaxExchangeAttempts = 5;
constexpr LogicalTime kReplyTimeout = 8;
constexpr LogicalTime kCommitTimeout = 40;
constexpr LogicalTime kExchangeTimeout = 12;
constexpr LogicalTime kPullTimeout = 6;
constexpr LogicalTime kPullInterval = 2;
constexpr LogicalTime kDeferLimit = 60;
constexpr std::size_t kBlocksPerDeliver = 8;

crypto::KeyPair derive_keys(std::string_view purpose, std::uint64_t seed,
                            std::string_view name) {
  Encoder enc;
  enc.str("fakturchain/key").str(purpose).u64(seed).str(name);
  return crypto::KeyPair::from_seed(Digest::of(enc.buffer()));
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

bool has_prefix(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

}  // namespace

std::string_view to_string(OpKind k) {
  switch (k) {
    case OpKind::PostNsfp: return "post-nsfp";
    case OpKind::PostFaktur: return "post-faktur";
    case OpKind::Revoke: return "revoke";
    case OpKind::ScenarioEvent: return "scenario-event";
  }
  return "?";
}

std::string_view to_string(OpState s) {
  switch (s) {
    case OpState::Exchanging: return "exchanging";
    case OpState::Submitting: return "submitting";
    case OpState::AwaitingCommit: return "awaiting-commit";
    case OpState::Committed: return "committed";
    case OpState::Rejected: return "rejected";
    case OpState::Failed: return "failed";
  }
  return "?";
}

std::string_view to_string(OpFailure f) {
  switch (f) {
    case OpFailure::None: return "none";
    case OpFailure::Auth: return "auth";
    case OpFailure::Invalid: return "invalid";
    case OpFailure::Integrity: return "integrity";
    case OpFailure::Unavailable: return "unavailable";
  }
  return "?";
}

nlohmann::json Operation::to_json() const {
  nlohmann::json j{{"id", id},
                   {"kind", to_string(kind)},
                   {"state", to_string(state)},
                   {"failure", to_string(failure)},
                   {"nonce", nonce},
                   {"attempts", attempts},
                   {"reasons", reasons}};
  if (!detail.empty()) j["detail"] = detail;
  if (envelope) j["tx_id"] = envelope->tx_id.hex();
  if (state == OpState::Committed || state == OpState::Rejected) j["block_number"] = block_number;
  return j;
}

nlohmann::json Detection::to_json() const {
  return {{"trace_seq", trace_seq}, {"tick", tick},     {"observer", observer},
          {"category", category},   {"subject", subject}, {"detail", detail},
          {"related", related.hex()}};
}

// ---------------------------------------------------------------- setup

std::unique_ptr<Network> Network::spawn(NetworkConfig config) {
  config.validate();
  return std::unique_ptr<Network>(new Network(std::move(config)));
}

Network::Network(NetworkConfig config)
    : config_(std::move(config)),
      transport_(config_.faults, config_.seed, &trace_, config_.capture_wire) {
  config_.raft.seed = config_.seed;
  const std::string& djp_name = config_.djp_org();
  identity::CertificateAuthority ca(djp_name + " CA",
                                    derive_keys("root", config_.seed, djp_name));
  identity::RevocationList none;
  identity::Validity validity{0, kCertLifetime};

  for (const auto& spec : config_.orgs) {
    auto keys = derive_keys("org", config_.seed, spec.name);
    auto cert = ca.issue_certificate(spec.name, spec.role, keys.public_key(), validity, none);
    OrgNode& n = orgs_.emplace_back();
    n.id = peer_id(spec.name);
    n.org = spec.name;
    n.role = spec.role;
    n.cert = cert;
    n.keys = keys;
  }
  std::vector<NodeId> ids;
  for (const auto& o : config_.orderers) ids.push_back(o.id);
  for (const auto& spec : config_.orderers) {
    auto keys = derive_keys("orderer", config_.seed, spec.id);
    auto cert = ca.issue_certificate(spec.id, identity::OrgRole::ORDERER,
                                     keys.public_key(), validity, none);
    std::vector<NodeId> peers;
    for (const auto& id : ids)
      if (id != spec.id) peers.push_back(id);
    orderers_.push_back(OrdererNode{spec.id, spec.host_org, cert, keys,
                                    consensus::RaftNode(spec.id, peers, config_.raft, 0),
                                    {}, {}, {}, false});
  }
  membership_ = ledger::Membership(ca.root_key(), ca.certificates());
  for (std::size_t i = 0; i < orgs_.size(); ++i) {
    orgs_[i].pull_target = i % orderers_.size();
    orgs_[i].leader_guess = 0;
    if (orgs_[i].role == identity::OrgRole::DJP) orgs_[i].ca.emplace(std::move(ca));
  }
  trace_.record(0, TraceKind::Fault, {"network"},
                "spawned " + std::to_string(orgs_.size()) + " orgs, " +
                    std::to_string(orderers_.size()) + " orderers",
                orgs_.front().chain.head().block_hash);
}

OrgNode& Network::org(std::string_view name) {
  for (auto& n : orgs_)
    if (n.org == name || n.id == name) return n;
  throw Error(Errc::NotFound, "no org '" + std::string(name) + "'");
}

const OrgNode& Network::org(std::string_view name) const {
  return const_cast<Network*>(this)->org(name);
}

OrdererNode& Network::orderer(std::string_view id) {
  for (auto& o : orderers_)
    if (o.id == id) return o;
  throw Error(Errc::NotFound, "no orderer '" + std::string(id) + "'");
}

const OrgNode& Network::djp() const { return org(config_.djp_org()); }

std::size_t Network::orderer_index(std::string_view id) const {
  for (std::size_t i = 0; i < orderers_.size(); ++i)
    if (orderers_[i].id == id) return i;
  return orderers_.size();
}

bool Network::is_down(const NodeId& node) const {
  for (const auto& o : orderers_)
    if (o.id == node) return o.crashed;
  for (const auto& n : orgs_)
    if (n.id == node) return n.crashed;
  return false;
}

std::optional<NodeId> Network::leader() const {
  const OrdererNode* best = nullptr;
  for (const auto& o : orderers_) {
    if (o.crashed || o.raft.role() != consensus::Role::Leader) continue;
    if (!best || o.raft.current_term() > best->raft.current_term()) best = &o;
  }
  if (!best) return std::nullopt;
  return best->id;
}

std::uint64_t Network::synced_height() const {
  std::uint64_t h = max_height();
  for (const auto& o : orderers_)
    if (!o.crashed) h = std::min<std::uint64_t>(h, o.chain.height());
  for (const auto& n : orgs_)
    if (!n.crashed) h = std::min<std::uint64_t>(h, n.chain.height());
  return h;
}

std::uint64_t Network::max_height() const {
  std::uint64_t h = 0;
  for (const auto& o : orderers_) h = std::max<std::uint64_t>(h, o.chain.height());
  for (const auto& n : orgs_) h = std::max<std::uint64_t>(h, n.chain.height());
  return h;
}

// ---------------------------------------------------------------- clock

void Network::step() {
  if (now_ >= config_.tick_limit)
    throw Error(Errc::InvalidArgument, "tick limit reached");
  ++now_;
  activate_faults(now_);

  auto down = [this](const NodeId& n) { return is_down(n); };
  for (const auto& m : transport_.deliver_due(now_, down)) dispatch(m);

  for (auto& o : orderers_)
    if (!o.crashed) handle_raft(o, o.raft.tick(now_));

  // Everything a leader received this tick becomes one log entry.
  for (auto& o : orderers_) {
    if (o.crashed || o.pending.empty() || o.raft.role() != consensus::Role::Leader) continue;
    auto batch = std::move(o.pending);
    o.pending.clear();
    handle_raft(o, o.raft.submit(std::move(batch), now_));
  }

  for (auto& n : orgs_)
    if (!n.crashed) org_timers(n);

  if (config_.monitor_invariants) check_invariants();
}

bool Network::run_until(const std::function<bool(const Network&)>& pred,
                        LogicalTime max_ticks) {
  for (LogicalTime i = 0;; ++i) {
    if (pred(*this)) return true;
    if (i >= max_ticks || now_ >= config_.tick_limit) return false;
    step();
  }
}

void Network::run_for(LogicalTime ticks) {
  for (LogicalTime i = 0; i < ticks && now_ < config_.tick_limit; ++i) step();
}

void Network::add_fault(FaultRule rule) {
  if (rule.from <= now_)
    throw Error(Errc::BadConfig, "fault must start after the current tick");
  NetworkConfig probe = config_;
  probe.faults = {rule};
  probe.validate();
  config_.faults.push_back(rule);
  transport_.add_rule(std::move(rule));
}

void Network::activate_faults(LogicalTime t) {
  for (const auto& f : config_.faults) {
    switch (f.kind) {
      case FaultKind::CrashNode:
        if (f.from == t) set_crashed(f.node, true);
        if (f.until == t) set_crashed(f.node, false);
        break;
      case FaultKind::StealCredential:
        if (f.from == t && stolen_.insert(f.org).second)
          trace_.record(t, TraceKind::Fault, {kAttackerNode, f.org}, "credential stolen");
        break;
      case FaultKind::EncryptStore:
        if (f.from == t) encrypt_store(f);
        break;
      default:
        if (f.from == t)
          trace_.record(t, TraceKind::Fault, {"transport"},
                        std::string(to_string(f.kind)) + " window opens");
        if (f.until == t)
          trace_.record(t, TraceKind::Fault, {"transport"},
                        std::string(to_string(f.kind)) + " window closes");
        break;
    }
  }
}

void Network::set_crashed(const NodeId& name, bool crashed) {
  NodeId id = name;
  bool found = false;
  for (auto& o : orderers_) {
    if (o.id != id) continue;
    found = true;
    if (o.crashed == crashed) return;
    o.crashed = crashed;
    if (!crashed) {
      o.raft.restart(now_);
      o.pending.clear();
    }
  }
  if (!found) {
    auto& n = org(name);
    id = n.id;
    if (n.crashed == crashed) return;
    n.crashed = crashed;
    if (!crashed) n.pull_outstanding = false;
  }
  trace_.record(now_, crashed ? TraceKind::Crash : TraceKind::Revive, {id});
}

void Network::encrypt_store(const FaultRule& rule) {
  auto& n = org(rule.org);
  auto& records = n.store.raw();
  std::vector<Digest> keys;
  for (const auto& [h, _] : records) keys.push_back(h);
  auto count = static_cast<std::size_t>(
      std::floor(rule.fraction * static_cast<double>(keys.size()) + 1e-9));

  Encoder seed_enc;
  seed_enc.str("encrypt-store").u64(config_.seed).str(rule.org).u64(now_);
  Digest sd = Digest::of(seed_enc.buffer());
  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) seed = (seed << 8) | sd.raw()[i];
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first `count` keys become the victims.
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + rng() % (keys.size() - i);
    std::swap(keys[i], keys[j]);
  }
  for (std::size_t i = 0; i < count; ++i) {
    auto& plain = records[keys[i]].plaintext;
    Bytes block;
    for (std::size_t k = 0; k < plain.size(); ++k) {
      if (k % 32 == 0) {
        Encoder enc;
        enc.digest(sd).digest(keys[i]).u64(k / 32);
        Digest d = Digest::of(enc.buffer());
        block.assign(d.raw().begin(), d.raw().end());
      }
      plain[k] ^= block[k % 32];
    }
  }
  trace_.record(now_, TraceKind::Fault, {n.id},
                "encrypted " + std::to_string(count) + " of " +
                    std::to_string(keys.size()) + " records");
}

void Network::send(const NodeId& from, const NodeId& to, MessageKind kind, Bytes payload) {
  transport_.send(from, to, kind, std::move(payload), now_);
}

void Network::dispatch(const WireMessage& m) {
  if (m.to == kAttackerNode) {
    attacker_receive(m);
    return;
  }
  for (auto& o : orderers_) {
    if (o.id == m.to) {
      orderer_receive(o, m);
      return;
    }
  }
  for (auto& n : orgs_) {
    if (n.id == m.to) {
      org_receive(n, m);
      return;
    }
  }
}

// ---------------------------------------------------------------- orderers

void Network::orderer_receive(OrdererNode& o, const WireMessage& m) {
  switch (m.kind) {
    case MessageKind::Raft: {
      consensus::RaftMessage msg;
      try {
        msg = consensus::RaftMessage::decode(m.payload);
      } catch (const Error& e) {
        trace_.record(now_, TraceKind::Drop, {m.from, o.id},
                      std::string("undecodable raft message: ") + e.what(), std::nullopt, m.id);
        return;
      }
      if (msg.from != m.from || msg.to != o.id) return;
      handle_raft(o, o.raft.handle_message(msg, now_));
      return;
    }
    case MessageKind::Submit: {
      ledger::TransactionEnvelope env;
      try {
        Decoder dec(m.payload);
        env = ledger::TransactionEnvelope::decode(dec);
        dec.expect_done();
      } catch (const Error& e) {
        wire::SubmitReply r{wire::SubmitReply::Status::Rejected, {}, {},
                            std::string(cc::reason::kMalformed)};
        send(o.id, m.from, MessageKind::SubmitReply, r.encode());
        return;
      }
      orderer_submit(o, env, m.from);
      return;
    }
    case MessageKind::BlockRequest: {
      wire::BlockRequest req;
      try {
        req = wire::BlockRequest::decode(m.payload);
      } catch (const Error&) {
        return;
      }
      wire::BlockDeliver d;
      for (std::uint64_t n = req.from_number;
           n < o.chain.size() && d.blocks.size() < kBlocksPerDeliver; ++n)
        d.blocks.push_back(o.chain.at(n));
      send(o.id, m.from, MessageKind::BlockDeliver, d.encode());
      return;
    }
    default:
      return;
  }
}

void Network::orderer_submit(OrdererNode& o, const ledger::TransactionEnvelope& env,
                             const NodeId& origin) {
  using Status = wire::SubmitReply::Status;
  wire::SubmitReply reply{Status::Accepted, env.tx_id, {}, {}};
  if (o.raft.role() != consensus::Role::Leader) {
    reply.status = Status::Redirect;
    reply.leader_hint = o.raft.leader_hint().value_or("");
  } else if (auto auth = membership_.authenticate(env, o.state.cert_revocations, now_); !auth) {
    reply.status = Status::Rejected;
    reply.reason = std::string(cc::reason::kUnauthorized) + ": " + auth.reason;
  } else if (!o.chain.locate(env.tx_id)) {
    auto used = o.state.used_nonces.find(env.creator_cert_id);
    if (used != o.state.used_nonces.end() && used->second.count(env.nonce)) {
      reply.status = Status::Rejected;
      reply.reason = std::string(cc::reason::kReplay);
    } else {
      bool queued = std::any_of(o.pending.begin(), o.pending.end(),
                                [&](const auto& p) { return p.tx_id == env.tx_id; });
      if (!queued) o.pending.push_back(env);
      // A credential should only ever be used from its owner's node.
      const auto* cert = membership_.find(env.creator_cert_id);
      if (cert && cert->org_role != identity::OrgRole::ORDERER &&
          origin != peer_id(cert->subject)) {
        detect(o.id, category::kCredentialAnomaly, cert->cert_id,
               cert->subject + " credential used from " + origin, env.tx_id);
      }
    }
  }
  send(o.id, origin, MessageKind::SubmitReply, reply.encode());
}

void Network::handle_raft(OrdererNode& o, consensus::RaftOutput out) {
  for (const auto& msg : out.messages) send(o.id, msg.to, MessageKind::Raft, msg.encode());
  for (const auto& entry : out.committed) build_block(o, entry);
}

void Network::build_block(OrdererNode& o, const consensus::LogEntry& entry) {
  if (entry.batch.empty()) return;
  auto auth = [&](const ledger::TransactionEnvelope& env) {
    return membership_.authenticate(env, o.state.cert_revocations, entry.proposed_at);
  };
  std::vector<ledger::TransactionEnvelope> txs;
  std::set<Digest> seen;
  for (const auto& env : entry.batch) {
    if (o.chain.locate(env.tx_id) || !seen.insert(env.tx_id).second) continue;
    if (!auth(env)) continue;
    txs.push_back(env);
  }
  if (txs.empty()) return;
  const auto& block = o.chain.append_block(std::move(txs), entry.term, entry.proposed_at, auth);
  ledger::apply_committed_in_place(o.state, block, apply_context());
  trace_.record(now_, TraceKind::Commit, {o.id},
                "block " + std::to_string(block.number) + " (" +
                    std::to_string(block.txs.size()) + " txs)",
                block.block_hash);
}

// ---------------------------------------------------------------- org nodes

void Network::org_receive(OrgNode& n, const WireMessage& m) {
  try {
    switch (m.kind) {
      case MessageKind::BlockDeliver:
        deliver_blocks(n, m.from, m.payload);
        return;
      case MessageKind::SubmitReply:
        receive_submit_reply(n, wire::SubmitReply::decode(m.payload));
        return;
      case MessageKind::CasPublish: {
        wire::CasPublish pub;
        try {
          pub = wire::CasPublish::decode(m.payload);
        } catch (const Error& e) {
          detect(n.id, category::kCasIntegrity, m.from,
                 std::string("undecodable CAS publication: ") + e.what());
          return;
        }
        if (!n.cas.accept_replica(pub.address, pub.payload))
          detect(n.id, category::kCasIntegrity, m.from,
                 "replica bytes do not hash to " + pub.address.to_string(),
                 pub.address.digest);
        return;
      }
      case MessageKind::PrivateData: {
        wire::PrivateData data;
        try {
          data = wire::PrivateData::decode(m.payload);
        } catch (const Error& e) {
          detect(n.id, category::kPrivateIntegrity, m.from,
                 std::string("undecodable private envelope: ") + e.what());
          wire::PrivateAck ack;
          ack.status = wire::PrivateAck::Status::Malformed;
          send(n.id, m.from, MessageKind::PrivateAck, ack.encode());
          return;
        }
        if (data.min_height > n.chain.height()) {
          n.deferred.push_back({m.from, std::move(data), now_});
          return;
        }
        receive_private(n, m.from, data);
        return;
      }
      case MessageKind::PrivateAck:
        receive_ack(n, wire::PrivateAck::decode(m.payload));
        return;
      case MessageKind::Alert:
        receive_alert(n, wire::Alert::decode(m.payload));
        return;
      default:
        return;
    }
  } catch (const Error& e) {
    // Undecodable replies are treated as lost; timers take over.
    trace_.record(now_, TraceKind::Drop, {m.from, n.id},
                  std::string("undecodable ") + std::string(to_string(m.kind)) + ": " + e.what(),
                  std::nullopt, m.id);
  }
}

void Network::deliver_blocks(OrgNode& n, const NodeId& from, ByteView payload) {
  if (orderer_index(from) == n.pull_target) n.pull_outstanding = false;
  wire::BlockDeliver d;
  try {
    d = wire::BlockDeliver::decode(payload);
  } catch (const Error& e) {
    detect(n.id, category::kBlockIntegrity, from,
           std::string("undecodable block delivery: ") + e.what());
    n.pull_target = (n.pull_target + 1) % orderers_.size();
    return;
  }
  for (const auto& b : d.blocks) {
    if (b.number < n.chain.size()) continue;
    if (b.number > n.chain.size()) break;
    if (!apply_block(n, from, b)) {
      n.pull_target = (n.pull_target + 1) % orderers_.size();
      return;
    }
  }
  n.next_pull = d.blocks.size() >= kBlocksPerDeliver ? now_ : now_ + kPullInterval;
}

bool Network::apply_block(OrgNode& n, const NodeId& from, const ledger::Block& block) {
  try {
    n.chain.append_verified(block);
  } catch (const Error& e) {
    detect(n.id, category::kBlockIntegrity, from,
           "block " + std::to_string(block.number) + " refused: " + e.what(), block.block_hash);
    return false;
  }
  const auto& b = n.chain.head();
  ledger::apply_committed_in_place(n.state, b, apply_context());
  trace_.record(now_, TraceKind::Apply, {n.id}, "height " + std::to_string(b.number),
                n.state.state_hash);

  for (const auto& tx : b.txs) {
    auto res = n.state.tx_results.find(tx.tx_id);
    if (res == n.state.tx_results.end()) continue;
    if (tx.tx_type == TxType::PostFaktur && res->second.accepted &&
        tx.visibility.includes(n.org) && n.store.contains(tx.payload_anchor.digest))
      n.store.set_tx(tx.payload_anchor.digest, tx.tx_id);

    auto it = n.op_by_tx.find(tx.tx_id);
    if (it == n.op_by_tx.end()) continue;
    auto& op = n.ops.at(it->second);
    if (op.done()) continue;
    op.block_number = res->second.block_number;
    op.reasons = res->second.reasons;
    if (res->second.accepted) {
      finish(n, op, OpState::Committed, OpFailure::None, {});
    } else {
      bool auth = std::find(op.reasons.begin(), op.reasons.end(),
                            std::string(cc::reason::kUnauthorized)) != op.reasons.end();
      finish(n, op, OpState::Rejected, auth ? OpFailure::Auth : OpFailure::Invalid,
             "rejected at commit: " + join(op.reasons));
    }
  }
  return true;
}

void Network::receive_private(OrgNode& n, const NodeId& from, const wire::PrivateData& data) {
  using Status = wire::PrivateAck::Status;
  const auto& env = data.envelope;
  wire::PrivateAck ack;
  ack.transfer_nonce = env.transfer_nonce;
  ack.payload_hash = env.payload_hash;
  auto reply = [&](Status s) {
    ack.status = s;
    send(n.id, from, MessageKind::PrivateAck, ack.encode());
  };

  if (n.org != config_.chaincode.authority_org) {
    detect(n.id, category::kPrivateIntegrity, env.sender_cert_id,
           "private envelope for a non-authority node");
    return reply(Status::AuthFailed);
  }
  const auto* sender = membership_.find(env.sender_cert_id);
  if (!sender) {
    detect(n.id, category::kPrivateIntegrity, env.sender_cert_id,
           "AuthFailure: unknown sender certificate", env.payload_hash);
    return reply(Status::AuthFailed);
  }
  Bytes plain;
  try {
    plain = dataplane::open_private({n.cert, n.keys}, *sender, env, trust_for(n));
  } catch (const Error& e) {
    detect(n.id, category::kPrivateIntegrity, sender->cert_id,
           std::string(to_string(e.code())) + ": " + e.what(), env.payload_hash);
    return reply(e.code() == Errc::DecryptFailure ? Status::DecryptFailed : Status::AuthFailed);
  }

  cc::Faktur faktur;
  try {
    faktur = cc::Faktur::decode_body(plain);
  } catch (const Error& e) {
    if (config_.policy.audit_rejections)
      detect(n.id, category::kInputValidation, sender->cert_id,
             std::string("undecodable faktur body: ") + e.what(), env.payload_hash);
    ack.reasons = {std::string(cc::reason::kMalformed)};
    return reply(Status::Invalid);
  }
  ledger::WorldState scratch = n.state;
  auto vr = cc::validate_faktur(scratch, *sender, faktur, config_.chaincode,
                                cc::TxContext{now_, {}, n.state.height + 1}, false);
  if (!vr.accepted) {
    if (config_.policy.audit_rejections)
      detect(n.id, category::kInputValidation, sender->cert_id,
             "faktur rejected: " + join(vr.reasons), env.payload_hash);
    ack.reasons = vr.reasons;
    return reply(Status::Invalid);
  }

  n.store.put(plain, sender->subject);
  ack.endorsement.endorser_cert_id = n.cert.cert_id;
  ack.endorsement.signature = n.keys.sign(cc::FakturCommitment::endorsement_message(
      env.payload_hash, faktur.nsfp.as_number(), faktur.transaction_date.year,
      sender->subject));
  ack.receipt = dataplane::make_receipt({n.cert, n.keys}, env);
  reply(Status::Endorsed);
}

void Network::receive_ack(OrgNode& n, const wire::PrivateAck& ack) {
  using Status = wire::PrivateAck::Status;
  auto it = n.op_by_transfer.find(ack.transfer_nonce);
  if (it == n.op_by_transfer.end()) return;
  auto& op = n.ops.at(it->second);
  if (op.state != OpState::Exchanging || !op.exchange) return;
  // Retries of one transfer all carry the same hash, so an answer about a
  // different one means the envelope was altered on the way.
  if (op.exchange->payload_hash != ack.payload_hash) {
    op.reasons = {"transport-integrity"};
    return finish(n, op, OpState::Failed, OpFailure::Integrity,
                  "authority answered for a different payload hash");
  }

  switch (ack.status) {
    case Status::Endorsed: {
      const auto* receiver = membership_.find(op.exchange->receiver_cert_id);
      auto ok = receiver ? dataplane::verify_receipt(*receiver, *op.exchange, ack.receipt,
                                                     trust_for(n))
                         : identity::AuthzDecision::deny("unknown receiver");
      if (!ok) return finish(n, op, OpState::Failed, OpFailure::Auth, "receipt: " + ok.reason);
      n.store.put(op.private_payload, op.exchange->receiver_org);
      cc::FakturCommitment commitment{op.faktur->nsfp.as_number(),
                                      op.faktur->transaction_date.year, ack.endorsement};
      op.envelope = ledger::make_envelope(
          TxType::PostFaktur, n.cert.cert_id, n.keys,
          ledger::PayloadAnchor::hash(op.exchange->payload_hash),
          ledger::Visibility::between(n.org, op.exchange->receiver_org), op.nonce, now_,
          commitment.encode());
      n.op_by_tx[op.envelope->tx_id] = op.id;
      op.attempts = 0;
      submit_op(n, op);
      return;
    }
    case Status::Invalid:
      op.reasons = ack.reasons;
      return finish(n, op, OpState::Rejected, OpFailure::Invalid,
                    "validation failed: " + join(ack.reasons));
    case Status::AuthFailed:
      return finish(n, op, OpState::Failed, OpFailure::Auth, "receiver refused credentials");
    case Status::DecryptFailed:
    case Status::Malformed:
      op.reasons = {"transport-integrity"};
      return finish(n, op, OpState::Failed, OpFailure::Integrity,
                    "private exchange corrupted in transit");
    case Status::Stale:
      return finish(n, op, OpState::Failed, OpFailure::Unavailable,
                    "receiver could not catch up");
  }
}

void Network::receive_submit_reply(OrgNode& n, const wire::SubmitReply& reply) {
  using Status = wire::SubmitReply::Status;
  auto it = n.op_by_tx.find(reply.tx_id);
  if (it == n.op_by_tx.end()) return;
  auto& op = n.ops.at(it->second);
  if (op.done()) return;
  switch (reply.status) {
    case Status::Accepted:
      n.leader_guess = op.cursor;
      if (op.state == OpState::Submitting) {
        op.state = OpState::AwaitingCommit;
        op.deadline = now_ + kCommitTimeout;
      }
      return;
    case Status::Redirect: {
      if (op.state != OpState::Submitting) return;
      std::size_t hint = orderer_index(reply.leader_hint);
      op.cursor = hint < orderers_.size() ? hint : (op.cursor + 1) % orderers_.size();
      n.leader_guess = op.cursor;
      submit_op(n, op);
      return;
    }
    case Status::Rejected:
      // A resubmission racing its own commit is harmless.
      if (op.state == OpState::AwaitingCommit && reply.reason == cc::reason::kReplay) return;
      op.reasons = {has_prefix(reply.reason, cc::reason::kUnauthorized)
                        ? std::string(cc::reason::kUnauthorized)
                        : reply.reason};
      finish(n, op, OpState::Rejected,
             has_prefix(reply.reason, cc::reason::kUnauthorized) ? OpFailure::Auth
                                                                 : OpFailure::Invalid,
             "orderer rejected: " + reply.reason);
      return;
  }
}

void Network::receive_alert(OrgNode& n, const wire::Alert& alert) {
  if (n.role != identity::OrgRole::DJP) return;
  const auto* reporter = membership_.find(alert.reporter_cert_id);
  if (!reporter || !identity::verify_signature(*reporter, alert.signing_bytes(),
                                               alert.signature, n.state.cert_revocations,
                                               now_, membership_.root_key())) {
    trace_.record(now_, TraceKind::Drop, {alert.reporter_cert_id, n.id},
                  "unauthenticated alert ignored");
    return;
  }
  Detection d{alert.trace_ref, now_, reporter->subject, alert.category,
              alert.subject,   alert.detail, alert.related};
  respond(d);
}

std::uint64_t Network::detect(const NodeId& observer, std::string_view cat,
                              std::string subject, std::string detail, Digest related) {
  auto seq = trace_.record(now_, TraceKind::Detect, {observer, subject},
                           std::string(cat) + ": " + detail, related);
  Detection d{seq, now_, observer, std::string(cat), std::move(subject), std::move(detail),
              related};
  detections_.push_back(d);

  auto& authority = org(config_.chaincode.authority_org);
  if (observer == authority.id) {
    respond(d);
    return seq;
  }
  wire::Alert alert{d.category, d.subject, d.detail, seq, related, {}, {}};
  const crypto::KeyPair* keys = nullptr;
  for (const auto& o : orderers_)
    if (o.id == observer) keys = &o.keys, alert.reporter_cert_id = o.cert.cert_id;
  for (const auto& n : orgs_)
    if (n.id == observer) keys = &n.keys, alert.reporter_cert_id = n.cert.cert_id;
  if (!keys) return seq;
  alert.signature = keys->sign(alert.signing_bytes());
  send(observer, authority.id, MessageKind::Alert, alert.encode());
  return seq;
}

void Network::respond(const Detection& d) {
  auto& authority = org(config_.chaincode.authority_org);
  if (authority.crashed) return;
  if (config_.policy.audit_detections) {
    cc::ScenarioEventArgs ev{d.category, "detect", d.subject, d.detail, d.trace_seq, d.related};
    submit_internal(authority, TxType::ScenarioEvent, ev.encode());
  }
  if (d.category == category::kCredentialAnomaly && config_.policy.auto_revoke &&
      !authority.state.cert_revocations.contains(d.subject) &&
      authority.revocations_requested.insert(d.subject).second) {
    auto seq = trace_.record(now_, TraceKind::Respond, {authority.id, d.subject},
                             "revoking " + d.subject);
    cc::RevokeArgs args{d.subject, "credential anomaly", false};
    submit_internal(authority, TxType::RevokeCert, args.encode());
    if (config_.policy.audit_detections) {
      cc::ScenarioEventArgs ev{d.category, "respond", d.subject, "certificate revoked", seq,
                               d.related};
      submit_internal(authority, TxType::ScenarioEvent, ev.encode());
    }
  }
}

// ---------------------------------------------------------------- operations

Operation& Network::new_op(OrgNode& n, OpKind kind, std::uint64_t nonce) {
  Operation op;
  op.id = n.next_op++;
  op.kind = kind;
  op.nonce = nonce;
  op.started_at = now_;
  op.cursor = n.leader_guess;
  return n.ops.emplace(op.id, std::move(op)).first->second;
}

void Network::finish(OrgNode& n, Operation& op, OpState state, OpFailure failure,
                     std::string detail) {
  op.state = state;
  op.failure = failure;
  op.detail = std::move(detail);
  op.finished_at = now_;
  trace_.record(now_, TraceKind::Apply, {n.id},
                std::string(to_string(op.kind)) + " op " + std::to_string(op.id) + " " +
                    std::string(to_string(state)),
                op.envelope ? std::optional<Digest>(op.envelope->tx_id) : std::nullopt);
}

void Network::submit_op(OrgNode& n, Operation& op) {
  if (++op.attempts > kMaxSubmitAttempts)
    return finish(n, op, OpState::Failed, OpFailure::Unavailable,
                  "no orderer accepted the transaction within the retry budget");
  op.state = OpState::Submitting;
  op.deadline = now_ + kReplyTimeout;
  Encoder enc;
  op.envelope->encode(enc);
  send(n.id, orderers_[op.cursor].id, MessageKind::Submit, enc.take());
}

void Network::start_exchange(OrgNode& n, Operation& op) {
  if (++op.attempts > kMaxExchangeAttempts)
    return finish(n, op, OpState::Failed, OpFailure::Unavailable,
                  "no answer from the authority within the retry budget");
  op.state = OpState::Exchanging;
  op.deadline = now_ + kExchangeTimeout;
  wire::PrivateData data{n.chain.height(), *op.exchange};
  send(n.id, peer_id(op.exchange->receiver_org), MessageKind::PrivateData, data.encode());
}

std::uint64_t Network::submit_internal(OrgNode& n, TxType type, Bytes args) {
  auto& op = new_op(n, type == TxType::RevokeCert ? OpKind::Revoke : OpKind::ScenarioEvent,
                    kInternalNonceBit | n.next_internal_nonce++);
  op.envelope = ledger::make_envelope(type, n.cert.cert_id, n.keys,
                                      ledger::PayloadAnchor::hash(Digest::of(args)),
                                      ledger::Visibility::broadcast(), op.nonce, now_, args);
  n.op_by_tx[op.envelope->tx_id] = op.id;
  submit_op(n, op);
  return op.id;
}

std::uint64_t Network::next_internal_nonce(std::string_view name) {
  return kInternalNonceBit | org(name).next_internal_nonce++;
}

std::uint64_t Network::post_nsfp(std::string_view name, int tax_year, std::uint32_t count,
                                 std::uint64_t nonce) {
  auto& n = org(name);
  auto& op = new_op(n, OpKind::PostNsfp, nonce);
  nlohmann::json doc{{"type", "nsfp-request"}, {"org", n.org}, {"tax_year", tax_year},
                     {"count", count},         {"nonce", nonce}};
  Bytes payload = to_bytes(doc.dump());
  op.cas_address = n.cas.put(payload);
  wire::CasPublish pub{*op.cas_address, payload};
  Bytes encoded = pub.encode();
  for (const auto& other : orgs_)
    if (other.id != n.id) send(n.id, other.id, MessageKind::CasPublish, encoded);

  op.envelope = ledger::make_envelope(
      TxType::PostNsfp, n.cert.cert_id, n.keys, ledger::PayloadAnchor::content(*op.cas_address),
      ledger::Visibility::broadcast(), nonce, now_,
      cc::NsfpRequestArgs{tax_year, count}.encode());
  n.op_by_tx[op.envelope->tx_id] = op.id;
  submit_op(n, op);
  return op.id;
}

std::uint64_t Network::post_faktur(std::string_view name, cc::Faktur faktur,
                                   std::uint64_t nonce) {
  auto& n = org(name);
  auto& op = new_op(n, OpKind::PostFaktur, nonce);
  op.private_payload = faktur.body_bytes();
  op.faktur = std::move(faktur);
  const auto* authority = membership_.find_subject(config_.chaincode.authority_org,
                                                   identity::OrgRole::DJP);
  try {
    op.exchange = dataplane::seal_private({n.cert, n.keys}, *authority, op.private_payload,
                                          nonce, trust_for(n));
  } catch (const Error& e) {
    finish(n, op, OpState::Failed,
           e.code() == Errc::AuthFailure ? OpFailure::Auth : OpFailure::Invalid, e.what());
    return op.id;
  }
  n.op_by_transfer[nonce] = op.id;
  start_exchange(n, op);
  return op.id;
}

std::uint64_t Network::revoke_cert(std::string_view name, std::string cert_id,
                                   std::string reason, bool revoke_serials,
                                   std::uint64_t nonce) {
  auto& n = org(name);
  auto& op = new_op(n, OpKind::Revoke, nonce);
  Bytes args = cc::RevokeArgs{std::move(cert_id), std::move(reason), revoke_serials}.encode();
  op.envelope = ledger::make_envelope(TxType::RevokeCert, n.cert.cert_id, n.keys,
                                      ledger::PayloadAnchor::hash(Digest::of(args)),
                                      ledger::Visibility::broadcast(), nonce, now_, args);
  n.op_by_tx[op.envelope->tx_id] = op.id;
  submit_op(n, op);
  return op.id;
}

std::uint64_t Network::record_event(std::string_view name, cc::ScenarioEventArgs args,
                                    std::uint64_t nonce) {
  auto& n = org(name);
  auto& op = new_op(n, OpKind::ScenarioEvent, nonce);
  Bytes encoded = args.encode();
  op.envelope = ledger::make_envelope(TxType::ScenarioEvent, n.cert.cert_id, n.keys,
                                      ledger::PayloadAnchor::hash(Digest::of(encoded)),
                                      ledger::Visibility::broadcast(), nonce, now_, encoded);
  n.op_by_tx[op.envelope->tx_id] = op.id;
  submit_op(n, op);
  return op.id;
}

std::uint64_t Network::submit_envelope(std::string_view name, ledger::TransactionEnvelope env) {
  auto& n = org(name);
  OpKind kind = OpKind::ScenarioEvent;
  switch (env.tx_type) {
    case TxType::PostNsfp: kind = OpKind::PostNsfp; break;
    case TxType::PostFaktur: kind = OpKind::PostFaktur; break;
    case TxType::RevokeCert: kind = OpKind::Revoke; break;
    case TxType::ScenarioEvent: kind = OpKind::ScenarioEvent; break;
  }
  auto& op = new_op(n, kind, env.nonce);
  op.envelope = std::move(env);
  n.op_by_tx[op.envelope->tx_id] = op.id;
  submit_op(n, op);
  return op.id;
}

const Operation& Network::operation(std::string_view name, std::uint64_t id) const {
  const auto& n = org(name);
  auto it = n.ops.find(id);
  if (it == n.ops.end()) throw Error(Errc::NotFound, "no operation " + std::to_string(id));
  return it->second;
}

const Operation& Network::await(std::string_view name, std::uint64_t id, LogicalTime budget) {
  const auto& op = operation(name, id);
  run_until([&](const Network&) { return op.done(); }, budget);
  return op;
}

void Network::org_timers(OrgNode& n) {
  if (!n.pull_outstanding && now_ >= n.next_pull) {
    wire::BlockRequest req{n.chain.size()};
    send(n.id, orderers_[n.pull_target].id, MessageKind::BlockRequest, req.encode());
    n.pull_outstanding = true;
    n.pull_deadline = now_ + kPullTimeout;
  } else if (n.pull_outstanding && now_ >= n.pull_deadline) {
    n.pull_outstanding = false;
    n.pull_target = (n.pull_target + 1) % orderers_.size();
    n.next_pull = now_;
  }

  if (!n.deferred.empty()) {
    auto pending = std::move(n.deferred);
    n.deferred.clear();
    for (auto& d : pending) {
      if (d.data.min_height <= n.chain.height()) {
        receive_private(n, d.from, d.data);
      } else if (now_ - d.since > kDeferLimit) {
        wire::PrivateAck ack;
        ack.status = wire::PrivateAck::Status::Stale;
        ack.transfer_nonce = d.data.envelope.transfer_nonce;
        ack.payload_hash = d.data.envelope.payload_hash;
        send(n.id, d.from, MessageKind::PrivateAck, ack.encode());
      } else {
        n.deferred.push_back(std::move(d));
      }
    }
  }

  for (auto& [id, op] : n.ops) {
    if (op.done() || now_ < op.deadline) continue;
    switch (op.state) {
      case OpState::Exchanging:
        start_exchange(n, op);
        break;
      case OpState::Submitting:
      case OpState::AwaitingCommit:
        op.cursor = (op.cursor + 1) % orderers_.size();
        submit_op(n, op);
        break;
      default:
        break;
    }
  }
}

// ---------------------------------------------------------------- attacker

ledger::TransactionEnvelope Network::forge(std::string_view name, TxType type,
                                           ledger::PayloadAnchor anchor,
                                           ledger::Visibility visibility, Bytes args,
                                           std::uint64_t nonce) const {
  if (!credential_stolen(name))
    throw Error(Errc::Forbidden, "no stolen credential for " + std::string(name));
  const auto& n = org(name);
  return ledger::make_envelope(type, n.cert.cert_id, n.keys, anchor, std::move(visibility),
                               nonce, now_, std::move(args));
}

void Network::attacker_submit(const ledger::TransactionEnvelope& env) {
  AttackerSubmission s{env, std::nullopt, 0, now_};
  attacker_[env.tx_id] = s;
  Encoder enc;
  env.encode(enc);
  send(kAttackerNode, orderers_[attacker_cursor_].id, MessageKind::Submit, enc.take());
}

void Network::attacker_receive(const WireMessage& m) {
  if (m.kind != MessageKind::SubmitReply) return;
  wire::SubmitReply reply;
  try {
    reply = wire::SubmitReply::decode(m.payload);
  } catch (const Error&) {
    return;
  }
  auto it = attacker_.find(reply.tx_id);
  if (it == attacker_.end()) return;
  auto& s = it->second;
  if (reply.status == wire::SubmitReply::Status::Redirect && s.hops < 8) {
    ++s.hops;
    std::size_t hint = orderer_index(reply.leader_hint);
    attacker_cursor_ = hint < orderers_.size() ? hint : (attacker_cursor_ + 1) % orderers_.size();
    Encoder enc;
    s.envelope.encode(enc);
    send(kAttackerNode, orderers_[attacker_cursor_].id, MessageKind::Submit, enc.take());
    return;
  }
  s.reply = reply;
}

// ---------------------------------------------------------------- monitor

void Network::check_invariants() {
  auto violation = [&](std::string inv, std::string detail) {
    violations_.push_back({now_, std::move(inv), std::move(detail)});
  };
  for (const auto& o : orderers_) {
    if (o.raft.role() == consensus::Role::Leader) {
      auto [it, fresh] = leaders_by_term_.emplace(o.raft.current_term(), o.id);
      if (!fresh && it->second != o.id)
        violation("election-safety", "term " + std::to_string(o.raft.current_term()) +
                                         " has leaders " + it->second + " and " + o.id);
    }
    const auto& log = o.raft.log();
    if (log.size() < o.raft.commit_index()) {
      violation("committed-entry-loss", o.id + " log shorter than its commit index");
      continue;
    }
    for (std::uint64_t i = 0; i < o.raft.commit_index(); ++i) {
      if (i == committed_terms_.size()) committed_terms_.push_back(log[i].term);
      else if (committed_terms_[i] != log[i].term)
        violation("committed-entry-loss",
                  o.id + " disagrees on committed entry " + std::to_string(i + 1));
    }
  }
  auto check_chain = [&](const NodeId& id, const ledger::Chain& chain,
                         const ledger::WorldState& state) {
    auto& from = checked_height_[id];
    for (std::uint64_t h = from + 1; h <= chain.height(); ++h) {
      const auto& bh = chain.at(h).block_hash;
      auto [it, fresh] = block_hashes_.emplace(h, bh);
      if (!fresh && it->second != bh)
        violation("chain-agreement", id + " diverges at block " + std::to_string(h));
    }
    if (chain.height() > from) {
      auto [it, fresh] = state_hashes_.emplace(state.height, state.state_hash);
      if (!fresh && it->second != state.state_hash)
        violation("state-agreement", id + " state hash differs at height " +
                                         std::to_string(state.height));
    }
    from = chain.height();
  };
  for (const auto& o : orderers_) check_chain(o.id, o.chain, o.state);
  for (const auto& n : orgs_) check_chain(n.id, n.chain, n.state);
}

dataplane::SweepReport Network::sweep_store(std::string_view name) {
  auto& n = org(name);
  auto report = dataplane::sweep(n.store, n.chain, n.org);
  for (const auto& h : report.corrupt)
    detect(n.id, category::kStoreIntegrity, n.org, "record no longer matches its anchor", h);
  for (const auto& h : report.missing)
    detect(n.id, category::kStoreIntegrity, n.org, "anchored record missing", h);
  return report;
}

}  // namespace fakturchain::netsim
