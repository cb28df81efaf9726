// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/scenarios/scenarios.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "fakturchain/common/error.hpp"
#include "fakturchain/dataplane/dataplane.hpp"
#include "fakturchain/ledger/apply.hpp"

namespace fakturchain::scenarios {

namespace {

namespace cc = chaincode;
using json = nlohmann::json;
using ledger::TxType;
using netsim::FaultKind;
using netsim::FaultRule;
using netsim::Network;
using netsim::OpState;

constexpr int kYear = 2025;
// Attacker-chosen nonces stay clear of the ones the victim's own tools use.
constexpr std::uint64_t kAttackerNonceBase = 1ULL << 62;

struct Window {
  LogicalTime start = 0;
  std::size_t detections = 0;
  std::size_t audit = 0;
};

Window open_window(const Network& net) {
  return {net.now(), net.detections().size(), net.djp().state.audit_log.size()};
}

std::vector<netsim::Detection> detections_since(const Network& net, const Window& w) {
  const auto& all = net.detections();
  return {all.begin() + static_cast<std::ptrdiff_t>(w.detections), all.end()};
}

std::vector<cc::ScenarioEventArgs> audit_events(const Network& net, const Window& w) {
  std::vector<cc::ScenarioEventArgs> out;
  const auto& log = net.djp().state.audit_log;
  for (std::size_t i = w.audit; i < log.size(); ++i)
    out.push_back(cc::ScenarioEventArgs::decode(log[i].args));
  return out;
}

bool audited(const std::vector<cc::ScenarioEventArgs>& events, std::string_view phase,
             std::uint64_t trace_ref) {
  return std::any_of(events.begin(), events.end(), [&](const auto& e) {
    return e.phase == phase && e.trace_ref == trace_ref;
  });
}

bool all_audited(const Network& net, const Window& w) {
  auto events = audit_events(net, w);
  for (const auto& d : detections_since(net, w))
    if (!audited(events, "detect", d.trace_seq)) return false;
  return true;
}

bool all_ops_done(const Network& net) {
  for (const auto& n : net.orgs()) {
    if (n.crashed) continue;
    for (const auto& [id, op] : n.ops)
      if (!op.done()) return false;
  }
  return true;
}

// Runs until every detection in the window is on chain, no operation is in
// flight and every live node has caught up.
bool settle(Network& net, const Window& w, LogicalTime budget = 800) {
  return net.run_until(
      [&](const Network& n) {
        return all_ops_done(n) && all_audited(n, w) && n.synced_height() == n.max_height();
      },
      budget);
}

bool all_committed(const Network& net, std::string_view org,
                   const std::vector<std::uint64_t>& ops) {
  return std::all_of(ops.begin(), ops.end(), [&](std::uint64_t id) {
    return net.operation(org, id).state == OpState::Committed;
  });
}

bool await_all(Network& net, const std::vector<std::pair<std::string, std::uint64_t>>& ops,
               LogicalTime budget) {
  return net.run_until(
      [&](const Network& n) {
        return std::all_of(ops.begin(), ops.end(), [&](const auto& p) {
          return n.operation(p.first, p.second).done();
        });
      },
      budget);
}

void add_check(ScenarioReport& r, std::string name, bool passed, std::string detail = {}) {
  r.checks.push_back({std::move(name), passed, std::move(detail)});
}

std::string join(const std::vector<std::string>& items, std::string_view sep = ", ") {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

bool has(const std::vector<std::string>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string first_problems(const CheckResult& c) {
  std::vector<std::string> head(c.problems.begin(),
                                c.problems.begin() + std::min<std::size_t>(3, c.problems.size()));
  return join(head, "; ");
}

// Shared epilogue: fill detections and audit ids, derive the common verdict
// flags and the auditability checks.
void finish(ScenarioReport& r, Network& net, const Window& w) {
  bool settled = settle(net, w);
  add_check(r, "network settles after the scenario", settled);
  r.detections = detections_since(net, w);
  const auto& log = net.djp().state.audit_log;
  for (std::size_t i = w.audit; i < log.size(); ++i) r.audit_tx_ids.push_back(log[i].tx_id);

  auto events = audit_events(net, w);
  std::size_t unaudited = 0;
  for (const auto& d : r.detections)
    if (!audited(events, "detect", d.trace_seq)) ++unaudited;
  add_check(r, "every detection is recorded on chain", unaudited == 0,
            std::to_string(unaudited) + " of " + std::to_string(r.detections.size()) +
                " detections lack a ScenarioEvent");
  if (!r.detections.empty())
    add_check(r, "detected attack has audit transactions", !r.audit_tx_ids.empty());
  if (r.control)
    add_check(r, "control run raises no detections", r.detections.empty(),
              std::to_string(r.detections.size()) + " detections");

  auto chains = check_chains(net);
  auto states = check_states(net);
  auto privacy = audit_privacy(net);
  r.verdict.chain_ok = chains.ok;
  r.verdict.state_ok = r.verdict.state_ok && states.ok;
  r.verdict.privacy_ok = privacy.ok();
  add_check(r, "chains verify and agree", chains.ok, first_problems(chains));
  add_check(r, "world states match chain replay", states.ok, first_problems(states));
  add_check(r, "private payloads stay with their parties", privacy.ok(),
            join(std::vector<std::string>(
                privacy.leaks.begin(),
                privacy.leaks.begin() + std::min<std::size_t>(3, privacy.leaks.size()))));
  r.metrics["privacy_payloads"] = privacy.payloads;
  r.metrics["privacy_bytes_scanned"] = privacy.bytes_scanned;
  r.metrics["height"] = net.max_height();
  r.finished_at = net.now();
  r.trace_fingerprint = net.trace().fingerprint();
}

std::vector<std::string> descriptions() {
  return {"Kertas HVS A4 80gr", "Tinta printer hitam", "Map plastik bening",
          "Pulpen gel 0.5mm",   "Jasa konsultasi pajak", "Sewa ruang rapat",
          "Kabel jaringan Cat6", "Toner laser",          "Buku besar folio"};
}

}  // namespace

// ---------------------------------------------------------------- names

std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Phishing: return "phishing";
    case ScenarioKind::Injection: return "injection";
    case ScenarioKind::Mitm: return "mitm";
    case ScenarioKind::Ransomware: return "ransomware";
  }
  return "?";
}

ScenarioKind parse_scenario(std::string_view name) {
  for (auto k : kAllScenarios)
    if (to_string(k) == name) return k;
  throw Error(Errc::NotFound, "unknown scenario '" + std::string(name) + "'");
}

json ScenarioOptions::to_json() const {
  return {{"control", control},
          {"history_fakturs", history_fakturs},
          {"attacker_attempts", attacker_attempts},
          {"tamper_ticks", tamper_ticks},
          {"tamper_offset", tamper_offset},
          {"encrypt_fraction", encrypt_fraction},
          {"drop_backup_record", drop_backup_record}};
}

ScenarioOptions ScenarioOptions::from_json(const json& j) {
  ScenarioOptions o;
  if (j.is_null()) return o;
  if (!j.is_object()) throw Error(Errc::InvalidArgument, "scenario options must be an object");
  try {
    o.control = j.value("control", o.control);
    o.history_fakturs = j.value("history_fakturs", o.history_fakturs);
    o.attacker_attempts = j.value("attacker_attempts", o.attacker_attempts);
    o.tamper_ticks = j.value("tamper_ticks", o.tamper_ticks);
    o.tamper_offset = j.value("tamper_offset", o.tamper_offset);
    o.encrypt_fraction = j.value("encrypt_fraction", o.encrypt_fraction);
    o.drop_backup_record = j.value("drop_backup_record", o.drop_backup_record);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("scenario options: ") + e.what());
  }
  if (o.history_fakturs < 0 || o.attacker_attempts < 1 || o.tamper_ticks < 10 ||
      o.encrypt_fraction < 0.0 || o.encrypt_fraction > 1.0)
    throw Error(Errc::InvalidArgument, "scenario options out of range");
  return o;
}

json Verdict::to_json() const {
  return {{"chain_ok", chain_ok},
          {"state_ok", state_ok},
          {"privacy_ok", privacy_ok},
          {"recovery_ok", recovery_ok}};
}

// ---------------------------------------------------------------- report

bool ScenarioReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<std::string> ScenarioReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.detail.empty() ? c.name : c.name + " (" + c.detail + ")");
  return out;
}

json ScenarioReport::to_json() const {
  json faults = json::array();
  for (const auto& f : injected_faults) faults.push_back(f.to_json());
  json dets = json::array();
  for (const auto& d : detections) dets.push_back(d.to_json());
  json audits = json::array();
  for (const auto& id : audit_tx_ids) audits.push_back(id.hex());
  json cs = json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  json j{{"scenario", to_string(scenario)},
         {"control", control},
         {"started_at", started_at},
         {"finished_at", finished_at},
         {"injected_faults", faults},
         {"detections", dets},
         {"responses", responses},
         {"verdict", verdict.to_json()},
         {"audit_tx_ids", audits},
         {"checks", cs},
         {"passed", passed()},
         {"metrics", metrics},
         {"trace_fingerprint", trace_fingerprint.hex()}};
  if (!note.empty()) j["note"] = note;
  return j;
}

std::string ScenarioReport::summary() const {
  std::ostringstream out;
  out << "scenario " << to_string(scenario) << (control ? " (control)" : "") << ": "
      << (passed() ? "PASSED" : "FAILED") << "\n";
  out << "  ticks " << started_at << ".." << finished_at << ", " << injected_faults.size()
      << " fault(s), " << detections.size() << " detection(s), " << audit_tx_ids.size()
      << " audit tx(s)\n";
  out << "  verdict: chain_ok=" << verdict.chain_ok << " state_ok=" << verdict.state_ok
      << " privacy_ok=" << verdict.privacy_ok << " recovery_ok=" << verdict.recovery_ok << "\n";
  std::map<std::string, int> by_category;
  for (const auto& d : detections) ++by_category[d.category];
  for (const auto& [cat, n] : by_category) out << "  detected " << cat << " x" << n << "\n";
  for (const auto& r : responses) out << "  response: " << r << "\n";
  for (const auto& c : checks)
    out << "  [" << (c.passed ? "ok" : "FAIL") << "] " << c.name
        << (c.passed || c.detail.empty() ? "" : " - " + c.detail) << "\n";
  if (!note.empty()) out << "  note: " << note << "\n";
  return out.str();
}

void require_passed(const ScenarioReport& report) {
  if (!report.passed())
    throw Error(Errc::ScenarioAssertionFailure,
                std::string(to_string(report.scenario)) + ": " + join(report.failures(), "; "));
}

// ---------------------------------------------------------------- workload

std::vector<cc::NsfpSerial> available_serials(const netsim::OrgNode& node, int year) {
  std::vector<cc::NsfpSerial> out;
  for (const auto& [id, alloc] : node.state.allocations) {
    if (alloc.owner_org != node.org || alloc.tax_year != year) continue;
    for (std::size_t i = 0; i < alloc.serials.size(); ++i)
      if (alloc.statuses[i] == cc::SerialStatus::Available) out.push_back(alloc.serials[i]);
  }
  // Serials already claimed by an operation still in flight are not free.
  std::set<cc::NsfpSerial> busy;
  for (const auto& [id, op] : node.ops)
    if (op.faktur && !op.done()) busy.insert(op.faktur->nsfp);
  std::erase_if(out, [&](const auto& s) { return busy.count(s) != 0; });
  return out;
}

std::uint64_t fresh_nonce(const Network& net, std::string_view org) {
  const auto& n = net.org(org);
  std::uint64_t top = 0;
  auto used = n.state.used_nonces.find(n.cert.cert_id);
  if (used != n.state.used_nonces.end())
    for (auto v : used->second)
      if (!(v & netsim::kInternalNonceBit) && v < kAttackerNonceBase) top = std::max(top, v);
  for (const auto& [id, op] : n.ops)
    if (!(op.nonce & netsim::kInternalNonceBit) && op.nonce < kAttackerNonceBase)
      top = std::max(top, op.nonce);
  return top + 1;
}

cc::Faktur sample_faktur(const cc::NsfpSerial& serial, std::string seller, int year,
                         std::uint64_t variant) {
  auto names = descriptions();
  cc::Faktur f;
  f.nsfp = serial;
  f.seller_org = std::move(seller);
  std::string buyer = std::to_string(100'000'000'000'000ULL + (variant * 7'919'113ULL) %
                                                                  899'999'999'999'999ULL);
  f.buyer_tax_id = buyer;
  f.transaction_date = {year, static_cast<int>(1 + variant % 12),
                        static_cast<int>(1 + (variant * 7) % 28)};
  std::size_t items = 1 + variant % 3;
  for (std::size_t i = 0; i < items; ++i) {
    cc::LineItem li;
    li.description = names[(variant + i * 4) % names.size()];
    li.quantity = cc::Quantity::units(static_cast<std::int64_t>(1 + (variant + i) % 7));
    li.unit_price = static_cast<cc::Rupiah>(5'000 + ((variant + 1) * 104'729 + i * 7'001) % 995'000);
    f.line_items.push_back(std::move(li));
  }
  auto vat = cc::compute_vat(f.line_items, cc::VatRate{11, 100});
  f.tax_base = vat.tax_base;
  f.vat_amount = vat.vat_amount;
  f.seal();
  return f;
}

void seed_history(Network& net, int fakturs) {
  if (!net.run_until([](const Network& n) { return n.leader().has_value(); }, 600))
    throw Error(Errc::ScenarioAssertionFailure, "no leader elected");
  auto pkps = net.config().pkp_orgs();
  if (pkps.empty()) throw Error(Errc::BadConfig, "history needs at least one PKP");
  std::size_t per = (static_cast<std::size_t>(std::max(fakturs, 0)) + pkps.size() - 1) / pkps.size();
  const auto& rate = net.config().chaincode.per_request_cap;

  std::vector<std::pair<std::string, std::uint64_t>> ops;
  for (const auto& org : pkps) {
    std::size_t have = available_serials(net.org(org), kYear).size();
    std::size_t want = per + 8;
    while (have < want) {
      auto count = static_cast<std::uint32_t>(std::min<std::size_t>(want - have, rate));
      ops.emplace_back(org, net.post_nsfp(org, kYear, count, fresh_nonce(net, org)));
      have += count;
    }
  }
  if (!await_all(net, ops, 1200))
    throw Error(Errc::ScenarioAssertionFailure, "serial requests did not finish");
  for (const auto& [org, id] : ops)
    if (net.operation(org, id).state != OpState::Committed)
      throw Error(Errc::ScenarioAssertionFailure,
                  "serial request failed: " + net.operation(org, id).detail);
  // Every org should see the new allocations before using them.
  net.run_until([](const Network& n) { return n.synced_height() == n.max_height(); }, 200);

  ops.clear();
  std::uint64_t variant = net.djp().state.faktur_index.size() + 1;
  for (int i = 0; i < fakturs; ++i) {
    const auto& org = pkps[static_cast<std::size_t>(i) % pkps.size()];
    auto serials = available_serials(net.org(org), kYear);
    if (serials.empty()) throw Error(Errc::ScenarioAssertionFailure, org + " ran out of serials");
    ops.emplace_back(org, net.post_faktur(org, sample_faktur(serials.front(), org, kYear, variant++),
                                          fresh_nonce(net, org)));
  }
  if (!await_all(net, ops, 3000))
    throw Error(Errc::ScenarioAssertionFailure, "history fakturs did not finish");
  for (const auto& [org, id] : ops)
    if (net.operation(org, id).state != OpState::Committed)
      throw Error(Errc::ScenarioAssertionFailure,
                  "history faktur failed: " + net.operation(org, id).detail);
  net.run_until([](const Network& n) { return n.synced_height() == n.max_height(); }, 200);
}

// ---------------------------------------------------------------- checks

CheckResult check_chains(const Network& net) {
  CheckResult r;
  auto bad = [&](std::string p) {
    r.ok = false;
    r.problems.push_back(std::move(p));
  };
  std::vector<std::pair<std::string, const ledger::Chain*>> chains;
  for (const auto& o : net.orderers()) chains.emplace_back(o.id, &o.chain);
  for (const auto& n : net.orgs()) chains.emplace_back(n.id, &n.chain);
  const ledger::Chain* longest = nullptr;
  for (const auto& [id, c] : chains) {
    auto rep = ledger::verify_chain(*c);
    if (!rep.ok) bad(id + ": " + rep.detail);
    if (!longest || c->height() > longest->height()) longest = c;
  }
  for (const auto& [id, c] : chains)
    for (std::uint64_t h = 0; h <= c->height(); ++h)
      if (c->at(h).block_hash != longest->at(h).block_hash) {
        bad(id + " diverges at block " + std::to_string(h));
        break;
      }
  for (const auto& v : net.violations())
    bad(v.invariant + " at tick " + std::to_string(v.tick) + ": " + v.detail);
  return r;
}

CheckResult check_states(const Network& net) {
  CheckResult r;
  auto ctx = net.apply_context();
  auto check = [&](const std::string& id, const ledger::Chain& chain,
                   const ledger::WorldState& state) {
    auto replayed = ledger::replay(chain.blocks(), ctx);
    if (replayed.state_hash != state.state_hash || !(replayed == state)) {
      r.ok = false;
      r.problems.push_back(id + " state differs from a replay of its chain");
    }
  };
  for (const auto& o : net.orderers()) check(o.id, o.chain, o.state);
  for (const auto& n : net.orgs()) check(n.id, n.chain, n.state);
  return r;
}

PrivacyReport audit_privacy(const Network& net, std::size_t window) {
  PrivacyReport rep;
  struct Payload {
    Digest hash;
    Bytes plain;
    ledger::Visibility visibility;
  };
  std::vector<Payload> payloads;
  std::set<Digest> seen;
  for (const auto& block : net.djp().chain.blocks()) {
    for (const auto& tx : block.txs) {
      if (!tx.visibility.is_private() ||
          tx.payload_anchor.kind != ledger::PayloadAnchor::Kind::PayloadHash)
        continue;
      const Digest& h = tx.payload_anchor.digest;
      if (!seen.insert(h).second) continue;
      for (const auto& n : net.orgs()) {
        if (auto plain = n.store.read_verified(h)) {
          payloads.push_back({h, std::move(*plain), tx.visibility});
          break;
        }
      }
    }
  }
  rep.payloads = payloads.size();

  auto key = [](const Bytes& b, std::size_t at, std::size_t len) {
    return std::string_view(reinterpret_cast<const char*>(b.data()) + at, len);
  };
  std::unordered_map<std::string_view, std::vector<std::uint32_t>> owners;
  for (std::uint32_t i = 0; i < payloads.size(); ++i) {
    const auto& p = payloads[i].plain;
    for (std::size_t at = 0; at + window <= p.size(); ++at) {
      auto& v = owners[key(p, at, window)];
      if (v.empty() || v.back() != i) v.push_back(i);
    }
  }
  rep.windows = owners.size();

  auto party = [&](const netsim::OrgNode& n, std::uint32_t i) {
    return n.role == identity::OrgRole::DJP || payloads[i].visibility.includes(n.org);
  };
  auto leak = [&](std::string what) {
    if (rep.leaks.size() < 50) rep.leaks.push_back(std::move(what));
  };
  // `org` null means nobody is entitled to what is scanned.
  auto scan = [&](const Bytes& hay, const netsim::OrgNode* org, const std::string& where) {
    rep.bytes_scanned += hay.size();
    for (std::size_t at = 0; at + window <= hay.size(); ++at) {
      auto it = owners.find(key(hay, at, window));
      if (it == owners.end()) continue;
      bool entitled = org && std::any_of(it->second.begin(), it->second.end(),
                                         [&](std::uint32_t i) { return party(*org, i); });
      if (!entitled) {
        leak(where + " holds a fragment of payload " + payloads[it->second.front()].hash.hex());
        return;
      }
    }
  };

  for (const auto& n : net.orgs()) {
    for (const auto& [h, rec] : n.store.records()) scan(rec.plaintext, &n, n.org + " store");
    for (const auto& [addr, blob] : n.cas.raw()) scan(blob, &n, n.org + " CAS replica");
  }
  const auto& chain = net.djp().chain;
  for (const auto& b : chain.blocks())
    scan(b.encode(), nullptr, "block " + std::to_string(b.number));
  const auto& wire = net.transport().wire_log();
  for (std::size_t i = 0; i < wire.size(); ++i)
    scan(wire[i], nullptr, "wire message " + std::to_string(i));
  return rep;
}

// ---------------------------------------------------------------- phishing

ScenarioReport run_phishing(Network& net, const ScenarioOptions& opts) {
  ScenarioReport r;
  r.scenario = ScenarioKind::Phishing;
  r.control = opts.control;
  r.started_at = net.now();
  r.verdict.state_ok = true;
  auto w = open_window(net);
  auto pkps = net.config().pkp_orgs();
  const std::string victim = pkps.front();
  const std::string victim_cert = net.org(victim).cert.cert_id;
  std::uint64_t attacker_nonce = kAttackerNonceBase + net.now() * 1000;

  if (opts.control) {
    std::vector<std::uint64_t> ops;
    for (int i = 0; i < 2; ++i) {
      auto serials = available_serials(net.org(victim), kYear);
      if (serials.empty()) break;
      ops.push_back(net.post_faktur(
          victim, sample_faktur(serials.front(), victim, kYear, 9000 + net.now() + i),
          fresh_nonce(net, victim)));
    }
    for (auto id : ops) net.await(victim, id);
    add_check(r, "victim keeps transacting normally", all_committed(net, victim, ops));
    r.verdict.recovery_ok = all_committed(net, victim, ops);
    finish(r, net, w);
    return r;
  }

  FaultRule steal;
  steal.kind = FaultKind::StealCredential;
  steal.from = net.now() + 1;
  steal.org = victim;
  net.add_fault(steal);
  r.injected_faults.push_back(steal);
  net.run_until([&](const Network& n) { return n.credential_stolen(victim); }, 5);

  json doc{{"type", "nsfp-request"}, {"org", victim}, {"tax_year", kYear}, {"count", 5}};
  auto first = net.forge(victim, TxType::PostNsfp,
                         ledger::PayloadAnchor::content(ledger::ContentAddress::of(
                             as_view(doc.dump()))),
                         ledger::Visibility::broadcast(),
                         cc::NsfpRequestArgs{kYear, 5}.encode(), attacker_nonce++);
  net.attacker_submit(first);
  const auto& djp_org = net.config().djp_org();
  bool revoked = net.run_until(
      [&](const Network& n) {
        const auto& djp = n.org(djp_org);
        const auto& sub = n.attacker_submissions().at(first.tx_id);
        return sub.reply && djp.state.cert_revocations.contains(victim_cert) &&
               djp.state.tx_results.count(first.tx_id);
      },
      600);
  const auto& djp_state = net.org(djp_org).state;
  auto first_result = djp_state.tx_results.find(first.tx_id);
  bool first_ok = first_result != djp_state.tx_results.end() && first_result->second.accepted;
  add_check(r, "stolen credential signs one transaction successfully", first_ok);
  auto dets = detections_since(net, w);
  bool flagged = std::any_of(dets.begin(), dets.end(), [&](const auto& d) {
    return d.category == netsim::category::kCredentialAnomaly && d.subject == victim_cert &&
           d.related == first.tx_id;
  });
  add_check(r, "anomalous credential use is detected", flagged);
  add_check(r, "DJP revokes the stolen certificate", revoked);
  if (revoked) r.responses.push_back("revoked certificate " + victim_cert);

  std::vector<Digest> later;
  for (int k = 0; k < opts.attacker_attempts; ++k) {
    ledger::TransactionEnvelope env;
    switch (k % 3) {
      case 0:
        env = net.forge(victim, TxType::PostNsfp,
                        ledger::PayloadAnchor::content(ledger::ContentAddress::of(
                            as_view(doc.dump() + std::to_string(k)))),
                        ledger::Visibility::broadcast(),
                        cc::NsfpRequestArgs{kYear, 3}.encode(), attacker_nonce++);
        break;
      case 1: {
        auto serials = available_serials(net.org(victim), kYear);
        auto serial = serials.empty() ? cc::NsfpSerial::make("01", '0', "000", 25, 1)
                                      : serials.front();
        auto fake = sample_faktur(serial, victim, kYear, 777 + static_cast<std::uint64_t>(k));
        cc::FakturCommitment c{serial.as_number(), kYear, {victim_cert, Bytes(64, 0x42)}};
        env = net.forge(victim, TxType::PostFaktur, ledger::PayloadAnchor::hash(fake.faktur_hash),
                        ledger::Visibility::between(victim, djp_org), c.encode(),
                        attacker_nonce++);
        break;
      }
      default:
        env = first;  // straight replay
        break;
    }
    // A replayed envelope keeps its tx id; track it under a fresh key.
    net.attacker_submit(env);
    net.run_until(
        [&](const Network& n) { return n.attacker_submissions().at(env.tx_id).reply.has_value(); },
        100);
    later.push_back(env.tx_id);
  }
  std::size_t rejected = 0;
  std::vector<std::string> odd;
  for (const auto& id : later) {
    const auto& sub = net.attacker_submissions().at(id);
    if (sub.reply && sub.reply->status == netsim::wire::SubmitReply::Status::Rejected &&
        sub.reply->reason.rfind(cc::reason::kUnauthorized, 0) == 0)
      ++rejected;
    else
      odd.push_back(id.hex().substr(0, 12) + ": " +
                    (sub.reply ? sub.reply->reason : std::string("no reply")));
  }
  add_check(r, "every post-revocation attacker transaction is rejected as unauthorized",
            rejected == later.size(), join(odd));

  Window tail = w;
  settle(net, tail);
  // Attacker transactions that made it into state: at most the first, flagged.
  std::size_t attacker_accepted = 0;
  for (const auto& [id, sub] : net.attacker_submissions()) {
    auto res = net.djp().state.tx_results.find(id);
    if (res != net.djp().state.tx_results.end() && res->second.accepted) ++attacker_accepted;
  }
  r.metrics["attacker_accepted"] = attacker_accepted;
  r.metrics["attacker_rejected_after_revocation"] = rejected;
  r.verdict.state_ok = attacker_accepted <= 1 && flagged;
  add_check(r, "state holds at most the pre-revocation attacker transaction",
            attacker_accepted <= 1, std::to_string(attacker_accepted) + " accepted");

  auto events = audit_events(net, w);
  bool response_audited = std::any_of(events.begin(), events.end(), [&](const auto& e) {
    return e.phase == "respond" && e.subject == victim_cert;
  });
  add_check(r, "revocation is recorded on chain as a ScenarioEvent", response_audited);
  bool everywhere = std::all_of(net.orgs().begin(), net.orgs().end(), [&](const auto& n) {
    return n.state.cert_revocations.contains(victim_cert);
  });
  r.verdict.recovery_ok = revoked && everywhere && rejected == later.size();
  finish(r, net, w);
  return r;
}

// ---------------------------------------------------------------- injection

ScenarioReport run_injection(Network& net, const ScenarioOptions& opts) {
  ScenarioReport r;
  r.scenario = ScenarioKind::Injection;
  r.control = opts.control;
  r.started_at = net.now();
  r.note =
      "modeled as hostile field injection: no component interprets stored strings, so the "
      "attack surface is faktur validation";
  r.verdict.state_ok = true;
  auto w = open_window(net);
  auto pkps = net.config().pkp_orgs();
  if (pkps.size() < 2) throw Error(Errc::BadConfig, "injection needs two PKPs");
  const std::string victim = pkps[0];
  const std::string attacker = pkps[1];
  const std::string& djp = net.config().djp_org();

  auto next_serial = [&](const std::string& org) {
    auto s = available_serials(net.org(org), kYear);
    if (s.empty()) throw Error(Errc::ScenarioAssertionFailure, org + " has no serials left");
    return s.front();
  };

  if (opts.control) {
    std::vector<std::uint64_t> ops;
    for (int i = 0; i < 2; ++i) {
      ops.push_back(net.post_faktur(
          attacker, sample_faktur(next_serial(attacker), attacker, kYear, 5000 + net.now() + i),
          fresh_nonce(net, attacker)));
      net.await(attacker, ops.back());
    }
    add_check(r, "honest fakturs are accepted", all_committed(net, attacker, ops));
    r.verdict.recovery_ok = all_committed(net, attacker, ops);
    finish(r, net, w);
    return r;
  }

  struct Attempt {
    std::string label;
    cc::Faktur faktur;
    std::string expect;
    std::uint64_t op = 0;
  };
  std::vector<Attempt> attempts;
  std::uint64_t v = 6000 + net.now();
  auto hostile = [](cc::Faktur f) {
    f.line_items.front().description = "'; DROP TABLE faktur; -- ";
    return f;
  };
  {
    auto f = sample_faktur(next_serial(victim), attacker, kYear, v++);
    attempts.push_back({"foreign serial", f, std::string(cc::reason::kOwnership)});
    f = sample_faktur(next_serial(victim), victim, kYear, v++);
    attempts.push_back({"seller impersonation", f, std::string(cc::reason::kOwnership)});
    f = sample_faktur(cc::NsfpSerial::make("01", '0', "000", kYear % 100, 99'999'001), attacker,
                      kYear, v++);
    attempts.push_back({"fabricated serial", f, std::string(cc::reason::kUnknownNsfp)});
    f = sample_faktur(next_serial(attacker), attacker, kYear, v++);
    f.vat_amount += 1;
    f.seal();
    attempts.push_back({"vat off by one", f, std::string(cc::reason::kArithmetic)});
    f = sample_faktur(next_serial(attacker), attacker, kYear, v++);
    f.tax_base += 1000;
    f.seal();
    attempts.push_back({"inflated tax base", f, std::string(cc::reason::kArithmetic)});
    f = hostile(sample_faktur(next_serial(attacker), attacker, kYear, v++));
    f.vat_amount -= 1;
    f.seal();
    attempts.push_back({"hostile text with bad arithmetic", f, std::string(cc::reason::kArithmetic)});
    f = sample_faktur(next_serial(attacker), attacker, kYear - 1, v++);
    attempts.push_back({"year mismatch", f, std::string(cc::reason::kYearMismatch)});
    const auto& index = net.org(attacker).state.faktur_index;
    auto used = std::find_if(index.begin(), index.end(),
                             [&](const auto& e) { return e.second.seller_org == attacker; });
    if (used != index.end()) {
      f = sample_faktur(used->first, attacker, kYear, v++);
      attempts.push_back({"reused serial", f, std::string(cc::reason::kDuplicate)});
    }
  }
  // Sequential, so each attempt's serial choice sees the previous outcome.
  for (auto& a : attempts) {
    a.op = net.post_faktur(attacker, a.faktur, fresh_nonce(net, attacker));
    net.await(attacker, a.op);
  }

  // Skip the exchange entirely: a self-signed endorsement straight to the orderers.
  auto serial = next_serial(attacker);
  auto forged_body = sample_faktur(serial, attacker, kYear, v++);
  const auto& an = net.org(attacker);
  const auto& djp_cert = net.org(djp).cert.cert_id;
  cc::FakturCommitment forged{
      serial.as_number(), kYear,
      {djp_cert, an.keys.sign(cc::FakturCommitment::endorsement_message(
                     forged_body.faktur_hash, serial.as_number(), kYear, attacker))}};
  auto forged_env = ledger::make_envelope(
      TxType::PostFaktur, an.cert.cert_id, an.keys,
      ledger::PayloadAnchor::hash(forged_body.faktur_hash),
      ledger::Visibility::between(attacker, djp), fresh_nonce(net, attacker), net.now(),
      forged.encode());
  auto forged_op = net.submit_envelope(attacker, forged_env);
  net.await(attacker, forged_op);

  std::vector<std::string> wrong;
  std::set<Digest> rejected_hashes;
  for (const auto& a : attempts) {
    const auto& op = net.operation(attacker, a.op);
    rejected_hashes.insert(a.faktur.faktur_hash);
    if (op.state != OpState::Rejected || !has(op.reasons, a.expect))
      wrong.push_back(a.label + " -> " + std::string(netsim::to_string(op.state)) + " [" +
                      join(op.reasons) + "]");
  }
  const auto& fop = net.operation(attacker, forged_op);
  if (fop.state != OpState::Rejected || !has(fop.reasons, cc::reason::kEndorsement))
    wrong.push_back("forged endorsement -> " + std::string(netsim::to_string(fop.state)) + " [" +
                    join(fop.reasons) + "]");
  rejected_hashes.insert(forged_body.faktur_hash);
  add_check(r, "every malicious faktur is rejected with the expected reason", wrong.empty(),
            join(wrong, "; "));
  r.metrics["malicious_attempts"] = attempts.size() + 1;

  // Hostile strings that are otherwise valid go through untouched.
  auto inert = sample_faktur(next_serial(attacker), attacker, kYear, v++);
  inert.line_items.front().description = "Robert'); DROP TABLE faktur;-- \"quoted\" <b>x</b>";
  inert.line_items.back().description = "${jndi:ldap://x} && rm -rf / ; \\x00 % ' \" ;";
  inert.seal();
  auto inert_op = net.post_faktur(attacker, inert, fresh_nonce(net, attacker));
  net.await(attacker, inert_op);
  bool inert_ok = net.operation(attacker, inert_op).state == OpState::Committed;
  bool byte_exact = false;
  if (inert_ok) {
    net.run_until([&](const Network& n) { return n.synced_height() == n.max_height(); }, 200);
    auto stored = net.djp().store.read_verified(inert.faktur_hash);
    auto own = net.org(attacker).store.read_verified(inert.faktur_hash);
    byte_exact = stored && own && *stored == inert.body_bytes() && *own == *stored &&
                 cc::Faktur::decode_body(*stored) == inert &&
                 cc::Faktur::from_json(json::parse(inert.to_json().dump())) == inert;
  }
  add_check(r, "valid faktur with hostile text is accepted and stored byte-exact",
            inert_ok && byte_exact);

  // No rejected body may have been kept anywhere.
  std::size_t kept = 0;
  for (const auto& n : net.orgs())
    for (const auto& h : rejected_hashes)
      if (n.store.contains(h)) ++kept;
  add_check(r, "no store keeps a rejected body", kept == 0, std::to_string(kept) + " kept");

  // Every accepted faktur re-validates from its stored body.
  std::vector<std::string> bad;
  const auto& d = net.djp();
  for (const auto& [s, e] : d.state.faktur_index) {
    auto body = d.store.read_verified(e.faktur_hash);
    if (!body) {
      bad.push_back(s.formatted() + ": body missing");
      continue;
    }
    auto f = cc::Faktur::decode_body(*body);
    auto vat = cc::compute_vat(f.line_items, net.config().chaincode.vat_rate);
    const auto* alloc = d.state.allocation_of(s);
    if (f.nsfp != s || f.seller_org != e.seller_org || vat.tax_base != f.tax_base ||
        vat.vat_amount != f.vat_amount || !alloc || alloc->owner_org != f.seller_org)
      bad.push_back(s.formatted() + ": does not re-validate");
  }
  r.verdict.state_ok = bad.empty() && kept == 0;
  add_check(r, "every accepted faktur re-validates from its stored body", bad.empty(),
            join(bad, "; "));

  // Honest business continues.
  auto honest = net.post_faktur(victim, sample_faktur(next_serial(victim), victim, kYear, v++),
                                fresh_nonce(net, victim));
  net.await(victim, honest);
  r.verdict.recovery_ok = net.operation(victim, honest).state == OpState::Committed;
  add_check(r, "honest submissions still succeed", r.verdict.recovery_ok);
  finish(r, net, w);
  auto dets = r.detections;
  bool input_flagged = std::any_of(dets.begin(), dets.end(), [](const auto& x) {
    return x.category == netsim::category::kInputValidation;
  });
  add_check(r, "rejected bodies raise input-validation detections", input_flagged);
  return r;
}

// ---------------------------------------------------------------- mitm

ScenarioReport run_mitm(Network& net, const ScenarioOptions& opts) {
  ScenarioReport r;
  r.scenario = ScenarioKind::Mitm;
  r.control = opts.control;
  r.started_at = net.now();
  r.verdict.state_ok = true;
  auto w = open_window(net);
  auto pkps = net.config().pkp_orgs();
  std::uint64_t v = 7000 + net.now();

  LogicalTime t0 = net.now() + 1;
  LogicalTime t1 = t0 + opts.tamper_ticks;
  if (!opts.control) {
    FaultRule tamper;
    tamper.kind = FaultKind::TamperBytes;
    tamper.from = t0;
    tamper.until = t1;
    tamper.match_kind = netsim::MessageKind::PrivateData;
    tamper.offset = opts.tamper_offset;
    net.add_fault(tamper);
    r.injected_faults.push_back(tamper);
  }

  // One submission every 5 ticks while the window is open.
  std::vector<std::pair<std::string, std::uint64_t>> attempts;
  std::size_t k = 0;
  while (net.now() + 5 < t1) {
    net.run_until([&](const Network& n) { return n.now() >= t0 + 5 * k; }, 10);
    const auto& org = pkps[k % pkps.size()];
    auto serials = available_serials(net.org(org), kYear);
    if (!serials.empty())
      attempts.emplace_back(org, net.post_faktur(org, sample_faktur(serials.front(), org, kYear, v++),
                                                 fresh_nonce(net, org)));
    ++k;
    net.step();
  }
  await_all(net, attempts, 600);

  std::size_t accepted = 0;
  std::size_t integrity = 0;
  std::size_t detected = 0;
  auto dets = detections_since(net, w);
  for (const auto& [org, id] : attempts) {
    const auto& op = net.operation(org, id);
    if (op.state == OpState::Committed) ++accepted;
    if (op.failure == netsim::OpFailure::Integrity) ++integrity;
    if (std::any_of(dets.begin(), dets.end(), [&](const auto& d) {
          return d.category == netsim::category::kPrivateIntegrity &&
                 d.related == op.exchange->payload_hash;
        }))
      ++detected;
  }
  r.metrics["window_attempts"] = attempts.size();
  r.metrics["window_accepted"] = accepted;
  r.metrics["window_detected"] = detected;
  if (opts.control) {
    add_check(r, "untampered submissions are accepted", accepted == attempts.size(),
              std::to_string(accepted) + "/" + std::to_string(attempts.size()));
  } else {
    add_check(r, "no faktur is accepted while the channel is tampered", accepted == 0,
              std::to_string(accepted) + " accepted");
    add_check(r, "every tampered attempt is detected by the receiver",
              detected == attempts.size() && !attempts.empty(),
              std::to_string(detected) + "/" + std::to_string(attempts.size()));
    add_check(r, "senders see a transport-integrity failure", integrity == attempts.size());
  }
  // Nothing tampered was ever anchored: every anchored faktur's body at DJP
  // still hashes to its anchor.
  auto sweep = dataplane::sweep(net.djp().store, net.djp().chain, net.djp().org);
  r.verdict.state_ok = sweep.clean() && accepted == (opts.control ? attempts.size() : 0);

  // A replica must refuse a CAS publication altered in flight.
  const auto& publisher = pkps.front();
  LogicalTime c0 = net.now() + 1;
  if (!opts.control) {
    FaultRule cas;
    cas.kind = FaultKind::TamperBytes;
    cas.from = c0;
    cas.until = c0 + 20;
    cas.match_kind = netsim::MessageKind::CasPublish;
    cas.offset = -3;
    net.add_fault(cas);
    r.injected_faults.push_back(cas);
  }
  net.step();
  auto nsfp_op = net.post_nsfp(publisher, kYear, 2, fresh_nonce(net, publisher));
  const auto& nop = net.await(publisher, nsfp_op);
  auto address = *nop.cas_address;
  net.run_for(3);
  bool replicas_clean = true;
  bool cas_flagged = false;
  for (const auto& n : net.orgs()) {
    if (n.cas.contains(address)) {
      try {
        n.cas.get(address);
      } catch (const Error&) {
        replicas_clean = false;
      }
    }
  }
  for (const auto& d : detections_since(net, w))
    if (d.category == netsim::category::kCasIntegrity && d.related == address.digest)
      cas_flagged = true;
  add_check(r, "no replica stores altered CAS bytes", replicas_clean);
  if (!opts.control) add_check(r, "altered CAS publication is detected", cas_flagged);

  // Post-hoc tampering of a stored body is visible against the chain.
  auto& store = net.org(publisher).store;
  bool exposed = false;
  for (auto& [h, rec] : store.raw()) {
    if (!rec.tx_id) continue;
    rec.plaintext.back() ^= 0x01;
    exposed = !dataplane::verify_against_chain(rec.plaintext, net.org(publisher).chain, *rec.tx_id);
    rec.plaintext.back() ^= 0x01;
    exposed = exposed && dataplane::verify_against_chain(rec.plaintext, net.org(publisher).chain,
                                                         *rec.tx_id);
    break;
  }
  add_check(r, "stored-body tampering is exposed by the chain", exposed);

  // After the window closes the channel works again.
  std::vector<std::pair<std::string, std::uint64_t>> after;
  for (const auto& org : pkps) {
    auto serials = available_serials(net.org(org), kYear);
    if (!serials.empty())
      after.emplace_back(org, net.post_faktur(org, sample_faktur(serials.front(), org, kYear, v++),
                                              fresh_nonce(net, org)));
  }
  await_all(net, after, 600);
  bool resumed = !after.empty() && std::all_of(after.begin(), after.end(), [&](const auto& p) {
    return net.operation(p.first, p.second).state == OpState::Committed;
  });
  add_check(r, "submissions succeed once tampering stops", resumed);
  r.verdict.recovery_ok = resumed;
  finish(r, net, w);
  return r;
}

// ---------------------------------------------------------------- ransomware

ScenarioReport run_ransomware(Network& net, const ScenarioOptions& opts) {
  ScenarioReport r;
  r.scenario = ScenarioKind::Ransomware;
  r.control = opts.control;
  r.started_at = net.now();
  r.verdict.state_ok = true;
  const std::string victim = net.config().djp_org();

  auto committed = net.djp().state.faktur_index.size();
  if (committed < 30) seed_history(net, static_cast<int>(30 - committed));
  auto w = open_window(net);
  r.started_at = net.now();

  auto& node = net.org(victim);
  auto anchors = dataplane::anchored_private(node.chain, victim);
  r.metrics["anchored_records"] = anchors.size();
  add_check(r, "at least 30 anchored records before the attack", anchors.size() >= 30,
            std::to_string(anchors.size()));

  dataplane::OffchainStore backed = node.store;
  std::optional<Digest> dropped;
  if (opts.drop_backup_record && !backed.records().empty()) {
    dropped = backed.records().begin()->first;
    backed.raw().erase(*dropped);
  }
  Bytes artifact = dataplane::backup(backed);
  r.metrics["backup_bytes"] = artifact.size();
  auto before = node.store;

  if (!opts.control) {
    FaultRule enc;
    enc.kind = FaultKind::EncryptStore;
    enc.from = net.now() + 1;
    enc.org = victim;
    enc.fraction = opts.encrypt_fraction;
    net.add_fault(enc);
    r.injected_faults.push_back(enc);
  }
  net.run_for(2);

  std::set<Digest> damaged;
  for (const auto& [h, rec] : net.org(victim).store.records())
    if (rec.plaintext != before.records().at(h).plaintext) damaged.insert(h);
  r.metrics["encrypted_records"] = damaged.size();

  auto sweep = net.sweep_store(victim);
  std::set<Digest> flagged(sweep.corrupt.begin(), sweep.corrupt.end());
  add_check(r, "sweep flags exactly the encrypted records", flagged == damaged && sweep.missing.empty(),
            std::to_string(flagged.size()) + " flagged, " + std::to_string(damaged.size()) +
                " encrypted");

  auto restored = dataplane::restore(net.org(victim).store, artifact, net.org(victim).chain, victim);
  r.metrics["restore"] = restored.to_json();
  auto seq = net.trace().record(net.now(), netsim::TraceKind::Recover, {node.id},
                                "restored " + std::to_string(restored.verified) + " of " +
                                    std::to_string(anchors.size()) + " records from backup");
  r.responses.push_back("restored " + std::to_string(restored.verified) + " records from backup");
  auto rec_op = net.record_event(
      net.config().djp_org(),
      cc::ScenarioEventArgs{"ransomware", "recover", victim,
                            "restored " + std::to_string(restored.verified) + ", missing " +
                                std::to_string(restored.missing.size()),
                            seq, Digest::of(artifact)},
      net.next_internal_nonce(net.config().djp_org()));
  net.await(net.config().djp_org(), rec_op);
  add_check(r, "recovery is recorded on chain as a ScenarioEvent",
            net.operation(net.config().djp_org(), rec_op).state == OpState::Committed);

  auto post = net.sweep_store(victim);
  std::size_t reverified = 0;
  for (const auto& [h, tx] : anchors)
    if (auto plain = net.org(victim).store.read_verified(h);
        plain && dataplane::verify_against_chain(*plain, net.org(victim).chain, tx))
      ++reverified;
  r.metrics["reverified"] = reverified;
  r.verdict.recovery_ok = reverified == anchors.size() && post.clean();
  if (dropped) {
    bool listed = restored.missing.size() == 1 && restored.missing.front() == *dropped;
    add_check(r, "record absent from the backup is reported missing", listed);
    add_check(r, "recovery is incomplete without that record", !r.verdict.recovery_ok);
  } else {
    add_check(r, "every anchored record verifies after restore", r.verdict.recovery_ok,
              std::to_string(reverified) + "/" + std::to_string(anchors.size()));
    add_check(r, "post-restore sweep is clean", post.clean());
  }
  r.verdict.state_ok = true;
  finish(r, net, w);
  return r;
}

ScenarioReport run(ScenarioKind kind, Network& net, const ScenarioOptions& opts) {
  switch (kind) {
    case ScenarioKind::Phishing: return run_phishing(net, opts);
    case ScenarioKind::Injection: return run_injection(net, opts);
    case ScenarioKind::Mitm: return run_mitm(net, opts);
    case ScenarioKind::Ransomware: return run_ransomware(net, opts);
  }
  throw Error(Errc::InvalidArgument, "unknown scenario");
}

ScenarioReport run_fresh(ScenarioKind kind, netsim::NetworkConfig config,
                         const ScenarioOptions& opts) {
  config.capture_wire = true;
  auto net = Network::spawn(std::move(config));
  int history = opts.history_fakturs;
  if (kind == ScenarioKind::Ransomware) history = std::max(history, 30);
  seed_history(*net, history);
  return run(kind, *net, opts);
}

}  // namespace fakturchain::scenarios
