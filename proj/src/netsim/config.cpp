// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/netsim/config.hpp"

#include <fstream>
#include <set>

#include "fakturchain/common/error.hpp"

namespace fakturchain::netsim {

namespace {

using nlohmann::json;

constexpr std::pair<MessageKind, std::string_view> kKindNames[] = {
    {MessageKind::Raft, "raft"},
    {MessageKind::Submit, "submit"},
    {MessageKind::SubmitReply, "submit-reply"},
    {MessageKind::BlockRequest, "block-request"},
    {MessageKind::BlockDeliver, "block-deliver"},
    {MessageKind::CasPublish, "cas-publish"},
    {MessageKind::PrivateData, "private-data"},
    {MessageKind::PrivateAck, "private-ack"},
    {MessageKind::Alert, "alert"},
};

constexpr std::pair<FaultKind, std::string_view> kFaultNames[] = {
    {FaultKind::Drop, "drop"},
    {FaultKind::Delay, "delay"},
    {FaultKind::Partition, "partition"},
    {FaultKind::TamperBytes, "tamper"},
    {FaultKind::CrashNode, "crash"},
    {FaultKind::RevivePartition, "revive-partition"},
    {FaultKind::StealCredential, "steal-credential"},
    {FaultKind::EncryptStore, "encrypt-store"},
};

constexpr std::string_view kPkpNames[] = {"PT Alpha", "PT Beta",  "PT Gamma",
                                          "PT Delta", "PT Omega", "PT Sigma"};

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::BadConfig, what); }

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->template get<T>();
}

}  // namespace

std::string_view to_string(MessageKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

MessageKind parse_message_kind(std::string_view s) {
  for (const auto& [kind, name] : kKindNames)
    if (name == s) return kind;
  bad("unknown message kind '" + std::string(s) + "'");
}

std::string_view to_string(FaultKind k) {
  for (const auto& [kind, name] : kFaultNames)
    if (kind == k) return name;
  return "?";
}

FaultKind parse_fault_kind(std::string_view s) {
  for (const auto& [kind, name] : kFaultNames)
    if (name == s) return kind;
  bad("unknown fault kind '" + std::string(s) + "'");
}

NodeId peer_id(std::string_view org) { return "peer:" + std::string(org); }

bool FaultRule::matches(MessageKind kind, const NodeId& from, const NodeId& to) const {
  if (match_kind && *match_kind != kind) return false;
  if (match_from && *match_from != from) return false;
  if (match_to && *match_to != to) return false;
  return true;
}

json FaultRule::to_json() const {
  json j{{"kind", to_string(kind)}, {"from", from}};
  if (until != kForever) j["until"] = until;
  if (match_kind || match_from || match_to) {
    json m = json::object();
    if (match_kind) m["kind"] = to_string(*match_kind);
    if (match_from) m["from"] = *match_from;
    if (match_to) m["to"] = *match_to;
    j["match"] = m;
  }
  switch (kind) {
    case FaultKind::Drop: j["percent"] = percent; break;
    case FaultKind::Delay: j["delay"] = delay_ticks; break;
    case FaultKind::Partition: j["groups"] = groups; break;
    case FaultKind::TamperBytes:
      j["offset"] = offset;
      j["mask"] = xor_mask;
      break;
    case FaultKind::CrashNode: j["node"] = node; break;
    case FaultKind::RevivePartition: break;
    case FaultKind::StealCredential: j["org"] = org; break;
    case FaultKind::EncryptStore:
      j["org"] = org;
      j["fraction"] = fraction;
      break;
  }
  return j;
}

FaultRule FaultRule::from_json(const json& j) {
  try {
    FaultRule r;
    r.kind = parse_fault_kind(j.at("kind").get<std::string>());
    r.from = get_or<LogicalTime>(j, "from", 0);
    r.until = get_or<LogicalTime>(j, "until", kForever);
    if (auto m = j.find("match"); m != j.end()) {
      if (m->contains("kind")) r.match_kind = parse_message_kind(m->at("kind").get<std::string>());
      if (m->contains("from")) r.match_from = m->at("from").get<std::string>();
      if (m->contains("to")) r.match_to = m->at("to").get<std::string>();
    }
    r.percent = get_or<std::uint32_t>(j, "percent", 100);
    r.delay_ticks = get_or<std::uint64_t>(j, "delay", 0);
    r.groups = get_or<std::vector<std::vector<NodeId>>>(j, "groups", {});
    r.offset = get_or<std::int64_t>(j, "offset", 0);
    r.xor_mask = get_or<std::uint8_t>(j, "mask", 0xFF);
    r.node = get_or<std::string>(j, "node", "");
    r.org = get_or<std::string>(j, "org", "");
    r.fraction = get_or<double>(j, "fraction", 0.0);
    return r;
  } catch (const json::exception& e) {
    bad(std::string("fault rule: ") + e.what());
  }
}

NetworkConfig NetworkConfig::standard(std::uint64_t seed, int pkp, int orderers) {
  NetworkConfig c;
  c.seed = seed;
  c.orgs.push_back({"DJP", identity::OrgRole::DJP});
  for (int i = 0; i < pkp; ++i) {
    std::string name = i < static_cast<int>(std::size(kPkpNames))
                           ? std::string(kPkpNames[i])
                           : "PT Org" + std::to_string(i);
    c.orgs.push_back({name, identity::OrgRole::PKP});
  }
  for (int i = 0; i < orderers; ++i) {
    std::string host = (i == 0 || pkp == 0) ? "DJP" : c.orgs[1 + (i - 1) % pkp].name;
    c.orderers.push_back({"orderer" + std::to_string(i), host});
  }
  c.chaincode.authority_org = "DJP";
  return c;
}

const std::string& NetworkConfig::djp_org() const {
  for (const auto& o : orgs)
    if (o.role == identity::OrgRole::DJP) return o.name;
  bad("no DJP org");
}

std::vector<std::string> NetworkConfig::pkp_orgs() const {
  std::vector<std::string> out;
  for (const auto& o : orgs)
    if (o.role == identity::OrgRole::PKP) out.push_back(o.name);
  return out;
}

const OrgSpec* NetworkConfig::find_org(std::string_view name) const {
  for (const auto& o : orgs)
    if (o.name == name) return &o;
  return nullptr;
}

void NetworkConfig::validate() const {
  int djp = 0, pkp = 0;
  std::set<std::string> names;
  for (const auto& o : orgs) {
    if (o.name.empty()) bad("org with empty name");
    if (!names.insert(o.name).second) bad("duplicate org '" + o.name + "'");
    if (o.role == identity::OrgRole::DJP) ++djp;
    else if (o.role == identity::OrgRole::PKP) ++pkp;
    else bad("org '" + o.name + "' has role ORDERER; orderers are listed separately");
  }
  if (djp != 1) bad("exactly one DJP org required, found " + std::to_string(djp));
  if (pkp < 1) bad("at least one PKP org required");
  if (orderers.empty()) bad("at least one orderer required");
  if (chaincode.authority_org != djp_org())
    bad("chaincode authority_org must name the DJP org");

  std::set<NodeId> nodes;
  for (const auto& o : orgs) nodes.insert(peer_id(o.name));
  for (const auto& o : orderers) {
    if (o.id.empty() || o.id.rfind("peer:", 0) == 0 || o.id == kAttackerNode)
      bad("invalid orderer id '" + o.id + "'");
    if (!nodes.insert(o.id).second) bad("duplicate node id '" + o.id + "'");
    if (!find_org(o.host_org)) bad("orderer " + o.id + " hosted by unknown org");
  }
  if (raft.election_timeout_max <= raft.election_timeout_min ||
      raft.heartbeat_interval == 0 ||
      raft.heartbeat_interval >= raft.election_timeout_min)
    bad("raft timing: need heartbeat < election_timeout_min < election_timeout_max");
  if (tick_limit == 0) bad("tick_limit must be positive");

  auto known_node = [&](const NodeId& n) {
    return nodes.count(n) || nodes.count(peer_id(n)) || n == kAttackerNode;
  };
  for (const auto& f : faults) {
    if (f.from >= f.until) bad("fault window [from, until) is empty");
    if (f.match_from && !known_node(*f.match_from)) bad("fault matches unknown node " + *f.match_from);
    if (f.match_to && !known_node(*f.match_to)) bad("fault matches unknown node " + *f.match_to);
    switch (f.kind) {
      case FaultKind::Drop:
        if (f.percent > 100) bad("drop percent above 100");
        break;
      case FaultKind::Delay:
        if (f.delay_ticks == 0) bad("delay of zero ticks");
        break;
      case FaultKind::Partition:
        if (f.groups.size() < 2) bad("partition needs at least two groups");
        for (const auto& g : f.groups)
          for (const auto& n : g)
            if (!known_node(n)) bad("partition names unknown node " + n);
        break;
      case FaultKind::TamperBytes:
        if (f.xor_mask == 0) bad("tamper mask of zero changes nothing");
        break;
      case FaultKind::CrashNode:
        if (!known_node(f.node) || f.node == kAttackerNode) bad("crash of unknown node '" + f.node + "'");
        break;
      case FaultKind::RevivePartition: break;
      case FaultKind::StealCredential:
        if (!find_org(f.org)) bad("credential theft from unknown org '" + f.org + "'");
        break;
      case FaultKind::EncryptStore:
        if (!find_org(f.org)) bad("store encryption of unknown org '" + f.org + "'");
        if (!(f.fraction >= 0.0 && f.fraction <= 1.0)) bad("encrypt fraction outside [0, 1]");
        break;
    }
  }
}

json NetworkConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["tick_limit"] = tick_limit;
  j["orgs"] = json::array();
  for (const auto& o : orgs) j["orgs"].push_back({{"name", o.name}, {"role", identity::to_string(o.role)}});
  j["orderers"] = json::array();
  for (const auto& o : orderers) j["orderers"].push_back({{"id", o.id}, {"host", o.host_org}});
  j["faults"] = json::array();
  for (const auto& f : faults) j["faults"].push_back(f.to_json());
  j["chaincode"] = chaincode.to_json();
  j["raft"] = {{"election_timeout_min", raft.election_timeout_min},
               {"election_timeout_max", raft.election_timeout_max},
               {"heartbeat_interval", raft.heartbeat_interval}};
  j["policy"] = {{"audit_detections", policy.audit_detections},
                 {"audit_rejections", policy.audit_rejections},
                 {"auto_revoke", policy.auto_revoke}};
  j["monitor_invariants"] = monitor_invariants;
  j["capture_wire"] = capture_wire;
  return j;
}

NetworkConfig NetworkConfig::from_json(const json& j) {
  NetworkConfig c;
  try {
    c.seed = j.at("seed").get<std::uint64_t>();
    c.tick_limit = get_or<LogicalTime>(j, "tick_limit", c.tick_limit);
    for (const auto& o : j.at("orgs")) {
      try {
        c.orgs.push_back({o.at("name").get<std::string>(),
                          identity::parse_role(o.at("role").get<std::string>())});
      } catch (const Error& e) {
        bad(e.what());
      }
    }
    for (const auto& o : j.at("orderers"))
      c.orderers.push_back({o.at("id").get<std::string>(), o.at("host").get<std::string>()});
    if (j.contains("faults"))
      for (const auto& f : j.at("faults")) c.faults.push_back(FaultRule::from_json(f));
    if (j.contains("chaincode")) {
      c.chaincode = chaincode::ChaincodeConfig::from_json(j.at("chaincode"));
    } else {
      for (const auto& o : c.orgs)
        if (o.role == identity::OrgRole::DJP) c.chaincode.authority_org = o.name;
    }
    if (auto r = j.find("raft"); r != j.end()) {
      c.raft.election_timeout_min = get_or<std::uint64_t>(*r, "election_timeout_min", 10);
      c.raft.election_timeout_max = get_or<std::uint64_t>(*r, "election_timeout_max", 20);
      c.raft.heartbeat_interval = get_or<std::uint64_t>(*r, "heartbeat_interval", 3);
    }
    if (auto p = j.find("policy"); p != j.end()) {
      c.policy.audit_detections = get_or<bool>(*p, "audit_detections", true);
      c.policy.audit_rejections = get_or<bool>(*p, "audit_rejections", true);
      c.policy.auto_revoke = get_or<bool>(*p, "auto_revoke", true);
    }
    c.monitor_invariants = get_or<bool>(j, "monitor_invariants", true);
    c.capture_wire = get_or<bool>(j, "capture_wire", true);
  } catch (const json::exception& e) {
    bad(std::string("network config: ") + e.what());
  }
  c.validate();
  return c;
}

NetworkConfig NetworkConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
  return from_json(j);
}

void NetworkConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
  out << to_json().dump(2) << "\n";
}

}  // namespace fakturchain::netsim
