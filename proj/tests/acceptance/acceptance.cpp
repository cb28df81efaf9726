// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "fakturchain/common/error.hpp"
#include "fakturchain/dataplane/dataplane.hpp"
#include "fakturchain/gateway/gateway.hpp"
#include "fakturchain/ledger/apply.hpp"
#include "fakturchain/ledger/chain.hpp"
#include "fakturchain/netsim/raft_cluster.hpp"
#include "fakturchain/scenarios/scenarios.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace fakturchain;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::unique_ptr<netsim::Network> up(std::uint64_t seed) {
  auto net = netsim::Network::spawn(netsim::NetworkConfig::standard(seed));
  if (!net->run_until([](const netsim::Network& n) { return n.leader().has_value(); }, 600))
    throw Error(Errc::NotCommitted, "no leader");
  return net;
}

void settle(netsim::Network& net) {
  net.run_until([](const netsim::Network& n) { return n.synced_height() == n.max_height(); }, 600);
}

// Every PKP requests `serials` serials, then `fakturs` fakturs are committed
// round-robin across the PKPs.
void workload(netsim::Network& net, std::uint32_t serials, int fakturs) {
  auto pkps = net.config().pkp_orgs();
  for (const auto& org : pkps) {
    const auto& op = net.await(org, net.post_nsfp(org, 2025, serials, scenarios::fresh_nonce(net, org)));
    if (op.state != netsim::OpState::Committed) throw Error(Errc::NotCommitted, "nsfp: " + op.to_json().dump());
  }
  settle(net);
  for (int i = 0; i < fakturs; ++i) {
    const auto& org = pkps[i % pkps.size()];
    auto serial = testing::available_serials(net.org(org)).front();
    auto f = testing::simple_faktur(serial, org, 10'000 + 137 * i);
    const auto& op = net.await(org, net.post_faktur(org, f, scenarios::fresh_nonce(net, org)));
    if (op.state != netsim::OpState::Committed) throw Error(Errc::NotCommitted, "faktur: " + op.to_json().dump());
  }
  settle(net);
}

// ------------------------------------------------------------ access table

Outcome table_conformance() {
  // Participants per transaction: GetNsfp and GetFaktur for PKP and DJP,
  // PostNsfp and PostFaktur for PKP only. Orderers appear nowhere.
  const std::map<std::string, std::set<std::string>> table = {
      {"GetNsfp", {"PKP", "DJP"}},
      {"GetFaktur", {"PKP", "DJP"}},
      {"PostNsfp", {"PKP"}},
      {"PostFaktur", {"PKP"}},
  };
  auto net = up(101);
  workload(*net, 10, 0);
  gateway::Gateway alpha_gw(*net, "PT Alpha");
  gateway::Gateway djp_gw(*net, "DJP");
  std::uint64_t nonce = 1000;

  int cells = 0, agree = 0;
  std::string bad;
  for (const char* role : {"PKP", "DJP", "ORDERER"}) {
    for (const auto& [route, roles] : table) {
      bool allowed = roles.contains(role);
      std::string method = route.rfind("Get", 0) == 0 ? "GET" : "POST";
      std::string target = route.find("Nsfp") != std::string::npos ? "/api/v1/nsfp" : "/api/v1/faktur";
      std::string who = std::string(role) == "PKP" ? "PT Alpha" : "DJP";
      json body = nullptr;
      if (route == "PostNsfp") body = {{"tax_year", 2025}, {"count", 1}};
      if (route == "PostFaktur")
        body = testing::simple_faktur(testing::available_serials(net->org("PT Alpha")).front(), who).to_json();
      const identity::Certificate* cert;
      const crypto::KeyPair* keys;
      if (std::string(role) == "ORDERER") {
        cert = &net->orderers().front().cert;
        keys = &net->orderers().front().keys;
      } else {
        cert = &net->org(who).cert;
        keys = &net->org(who).keys;
      }
      auto& gw = std::string(role) == "PKP" ? alpha_gw : djp_gw;
      auto resp = gw.handle(gateway::ApiRequest::make(method, target, body, *cert, *keys, method == "GET" ? 0 : nonce++));
      identity::Action action{};
      for (auto a : identity::kAllActions)
        if (identity::to_string(a) == route) action = a;
      bool direct = static_cast<bool>(identity::authorize(*cert, action));
      bool via_gateway = resp.status == 200;
      bool refused_as_forbidden = resp.status == 403;
      ++cells;
      if (direct == allowed && via_gateway == allowed && (allowed || refused_as_forbidden)) {
        ++agree;
      } else if (bad.empty()) {
        bad = std::string(role) + "/" + route + " status " + std::to_string(resp.status);
      }
    }
  }
  return {cells == 12 && agree == 12,
          std::to_string(agree) + "/" + std::to_string(cells) + " cells match" + (bad.empty() ? "" : ", first miss " + bad)};
}

// ------------------------------------------------------------ ledger integrity

Outcome ledger_integrity() {
  auto t0 = std::chrono::steady_clock::now();
  auto net = up(202);
  workload(*net, 20, 30);
  std::size_t serials = 0;
  for (const auto& [id, a] : net->djp().state.allocations) serials += a.serials.size();
  auto fakturs = net->djp().state.faktur_index.size();
  if (net->orgs().size() != 4 || serials < 50 || fakturs < 30)
    return {false, "workload too small: " + std::to_string(serials) + " serials, " + std::to_string(fakturs) + " fakturs"};
  for (const auto& n : net->orgs())
    if (!ledger::verify_chain(n.chain.blocks()).ok) return {false, n.org + " chain does not verify"};

  Bytes file = ledger::block_store::serialize(net->djp().chain.blocks());
  if (!ledger::block_store::verify(file).ok) return {false, "clean block file does not verify"};
  // Record boundaries computed here from the length prefixes, not taken
  // from the parser under test.
  std::vector<std::size_t> starts;
  for (std::size_t off = 0; off + 4 <= file.size();) {
    starts.push_back(off);
    std::uint32_t len = (std::uint32_t(file[off]) << 24) | (std::uint32_t(file[off + 1]) << 16) |
                        (std::uint32_t(file[off + 2]) << 8) | std::uint32_t(file[off + 3]);
    off += 4 + len;
  }
  std::mt19937_64 rng(2025);
  int located = 0;
  std::string miss;
  for (int i = 0; i < 100; ++i) {
    std::size_t pos = rng() % file.size();
    auto mutated = file;
    mutated[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    auto rep = ledger::block_store::verify(mutated);
    auto block = static_cast<std::uint64_t>(std::upper_bound(starts.begin(), starts.end(), pos) - starts.begin() - 1);
    if (!rep.ok && rep.first_bad_block == block)
      ++located;
    else if (miss.empty())
      miss = ", offset " + std::to_string(pos) + " expected block " + std::to_string(block) + ": " + rep.detail;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream d;
  d << serials << " serials, " << fakturs << " fakturs, " << starts.size() << " blocks; " << located
    << "/100 mutations located at the mutated block; " << secs << " s" << miss;
  return {located == 100 && secs < 60.0, d.str()};
}

// ------------------------------------------------------------ replay

Outcome replay_determinism() {
  auto net = up(303);
  workload(*net, 10, 12);
  // A revocation and a rejected submission make the history less uniform.
  const auto& rev = net->await("DJP", net->revoke_cert("DJP", net->org("PT Gamma").cert.cert_id, "test", false,
                                                       scenarios::fresh_nonce(*net, "DJP")));
  if (rev.state != netsim::OpState::Committed) return {false, "revocation did not commit"};
  net->await("PT Gamma", net->post_nsfp("PT Gamma", 2025, 1, scenarios::fresh_nonce(*net, "PT Gamma")));
  settle(*net);

  // Node A replays the DJP chain; node B replays the same sequence after a
  // round trip through the block file.
  const auto& blocks = net->djp().chain.blocks();
  auto from_file = ledger::block_store::parse(ledger::block_store::serialize(blocks)).blocks;
  if (from_file.size() != blocks.size()) return {false, "block file round trip lost blocks"};
  auto ctx = net->apply_context();
  ledger::WorldState a, b;
  std::size_t heights = 0;
  for (std::size_t h = 1; h < blocks.size(); ++h) {
    a = ledger::apply_committed(a, blocks[h], ctx);
    ledger::apply_committed_in_place(b, from_file[h], ctx);
    if (a.state_hash != b.state_hash || a != b)
      return {false, "state diverges at height " + std::to_string(h)};
    ++heights;
  }
  for (const auto& n : net->orgs())
    if (n.state.state_hash != a.state_hash) return {false, n.org + " live state differs from replay"};
  return {heights > 10, std::to_string(heights) + " heights, identical state_hash at each; live nodes agree"};
}

// ------------------------------------------------------------ raft

Outcome raft_suite() {
  constexpr LogicalTime kBound = 200;
  int runs = 0, violations = 0, late = 0, with_crash = 0, with_partition = 0;
  LogicalTime worst = 0;
  std::string first;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    for (int nodes : {3, 5}) {
      netsim::ClusterOptions opts;
      opts.nodes = nodes;
      opts.seed = seed;
      opts.faults = netsim::RaftCluster::random_schedule(seed, netsim::RaftCluster::node_ids(nodes), 400, true);
      for (const auto& f : opts.faults) {
        with_crash += f.kind == netsim::FaultKind::CrashNode;
        with_partition += f.kind == netsim::FaultKind::Partition;
      }
      netsim::RaftCluster c(opts);
      c.run_until([](const netsim::RaftCluster& k) { return k.first_commit().has_value(); }, kBound);
      if (!c.first_commit() || *c.first_commit() > kBound) {
        ++late;
        if (first.empty()) first = "seed " + std::to_string(seed) + "/" + std::to_string(nodes) + " no commit by bound";
      } else {
        worst = std::max(worst, *c.first_commit());
      }
      c.run_until([](const netsim::RaftCluster&) { return false; }, 600);
      if (!c.violations().empty()) {
        ++violations;
        if (first.empty()) first = "seed " + std::to_string(seed) + ": " + c.violations().front();
      }
      ++runs;
    }
  }
  std::ostringstream d;
  d << runs << " runs (" << with_crash << " crash rules, " << with_partition << " partition rules), " << violations
    << " with violations, " << late << " past the " << kBound << "-tick bound, worst first commit at tick " << worst;
  if (!first.empty()) d << "; " << first;
  return {runs >= 200 && violations == 0 && late == 0 && with_crash > 0 && with_partition > 0, d.str()};
}

// ------------------------------------------------------------ privacy

Outcome privacy_partition() {
  constexpr std::size_t kWindow = 16;
  auto net = up(404);
  workload(*net, 15, 24);
  // Rejected bodies in the mix: wrong arithmetic and a foreign serial.
  auto bad = testing::simple_faktur(testing::available_serials(net->org("PT Beta")).front(), "PT Beta");
  bad.vat_amount += 1;
  bad.seal();
  net->await("PT Beta", net->post_faktur("PT Beta", bad, scenarios::fresh_nonce(*net, "PT Beta")));
  auto foreign = testing::simple_faktur(testing::available_serials(net->org("PT Alpha")).front(), "PT Gamma");
  net->await("PT Gamma", net->post_faktur("PT Gamma", foreign, scenarios::fresh_nonce(*net, "PT Gamma")));
  settle(*net);

  const auto& djp = net->djp();
  auto anchored = dataplane::anchored_private(djp.chain, djp.org);
  std::size_t djp_holds = 0, sender_holds = 0;
  // window -> index of payloads containing it; payload -> its two parties
  std::unordered_map<std::string, std::vector<std::size_t>> windows;
  std::vector<std::pair<std::string, std::string>> parties;
  for (const auto& [hash, tx_id] : anchored) {
    auto vis = ledger::anchor_lookup(djp.chain, tx_id).visibility;
    auto plain = djp.store.read_verified(hash);
    if (plain) ++djp_holds;
    if (net->org(vis.sender()).store.read_verified(hash) == plain && plain) ++sender_holds;
    if (!plain) continue;
    std::size_t idx = parties.size();
    parties.emplace_back(vis.sender(), vis.receiver());
    for (std::size_t i = 0; i + kWindow <= plain->size(); ++i)
      windows[std::string(plain->begin() + i, plain->begin() + i + kWindow)].push_back(idx);
  }
  auto runs_in = [&](ByteView hay) {
    std::set<std::string> found;
    for (std::size_t i = 0; i + kWindow <= hay.size(); ++i) {
      std::string w(hay.begin() + i, hay.begin() + i + kWindow);
      if (windows.contains(w)) found.insert(w);
    }
    return found;
  };

  std::size_t leaks = 0, scanned = 0;
  std::string first;
  // Org stores and CAS replicas. A run counts against an org only if it
  // comes from a payload the org is not party to and does not also occur
  // in one it is party to (shared field names, for instance).
  for (const auto& n : net->orgs()) {
    std::vector<Bytes> held;
    for (const auto& [h, rec] : n.store.records()) held.push_back(rec.plaintext);
    for (const auto& [a, bytes] : n.cas.raw()) held.push_back(bytes);
    for (const auto& hay : held) {
      scanned += hay.size();
      for (const auto& w : runs_in(hay)) {
        bool entitled = false;
        for (auto idx : windows.at(w)) entitled |= parties[idx].first == n.org || parties[idx].second == n.org;
        if (!entitled) {
          ++leaks;
          if (first.empty()) first = n.org + " store";
        }
      }
    }
  }
  // Chains, the wire log and the trace carry no run at all.
  for (const auto& n : net->orgs()) {
    auto file = ledger::block_store::serialize(n.chain.blocks());
    scanned += file.size();
    if (auto f = runs_in(file); !f.empty()) leaks += f.size(), first = first.empty() ? n.org + " chain" : first;
  }
  for (const auto& m : net->transport().wire_log()) {
    scanned += m.size();
    if (auto f = runs_in(m); !f.empty()) leaks += f.size(), first = first.empty() ? "wire" : first;
  }
  auto trace = net->trace().to_jsonl();
  scanned += trace.size();
  if (auto f = runs_in(to_bytes(trace)); !f.empty()) leaks += f.size(), first = first.empty() ? "trace" : first;

  // The scanner must see a planted run, or zero leaks proves nothing.
  bool scanner_live = false;
  if (auto plain = djp.store.read_verified(anchored.begin()->first)) {
    Bytes planted = to_bytes("junk before ");
    planted.insert(planted.end(), plain->begin() + 7, plain->begin() + 7 + kWindow);
    scanner_live = runs_in(planted).size() == 1;
  }
  bool library_agrees = scenarios::audit_privacy(*net, kWindow).ok();
  std::ostringstream d;
  d << anchored.size() << " private payloads, " << scanned << " bytes scanned, " << leaks << " fragments found"
    << (first.empty() ? "" : " (first in " + first + ")") << "; DJP holds " << djp_holds << "/" << anchored.size()
    << ", senders hold " << sender_holds << "/" << anchored.size();
  return {anchored.size() >= 24 && scanner_live && leaks == 0 && library_agrees && djp_holds == anchored.size() &&
              sender_holds == anchored.size() && !net->transport().wire_log().empty(),
          d.str()};
}

// ------------------------------------------------------------ chaincode oracle

Outcome chaincode_oracle() {
  int vat = testing::vat_mismatches(1000, 31337);
  auto t = testing::decision_trial(1000, 4242);
  int adversarial = testing::adversarial_rejections(500, 777);
  std::ostringstream d;
  d << "compute_vat " << vat << " mismatches / 1000; post_faktur " << t.mismatches << " mismatches / "
    << t.invoices << " (" << t.accepted << " accepted); adversarial " << adversarial << "/500 rejected";
  if (!t.first_mismatches.empty()) d << "; " << t.first_mismatches.front();
  return {vat == 0 && t.invoices == 1000 && t.mismatches == 0 && t.malformed_results == 0 && adversarial == 500,
          d.str()};
}

// ------------------------------------------------------------ scenarios

bool resolves(const netsim::Network& net, const std::function<bool(const chaincode::ScenarioEventArgs&, const Digest&)>& match) {
  const auto& djp = net.djp();
  for (const auto& b : djp.chain.blocks())
    for (const auto& tx : b.txs) {
      if (tx.tx_type != ledger::TxType::ScenarioEvent) continue;
      auto r = djp.state.tx_results.find(tx.tx_id);
      if (r == djp.state.tx_results.end() || !r->second.accepted) continue;
      if (match(chaincode::ScenarioEventArgs::decode(tx.args), tx.tx_id)) return true;
    }
  return false;
}

Outcome scenario_verdicts() {
  int runs = 0, failed = 0, unresolved = 0, control_detections = 0, silent_attacks = 0;
  std::size_t detections = 0, audits = 0;
  std::string first, ransom;
  bool ransom_ok = true;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    for (auto kind : scenarios::kAllScenarios) {
      for (bool control : {false, true}) {
        scenarios::ScenarioOptions opts;
        opts.control = control;
        auto config = netsim::NetworkConfig::standard(seed);
        config.capture_wire = true;
        auto net = netsim::Network::spawn(config);
        scenarios::seed_history(*net, kind == scenarios::ScenarioKind::Ransomware ? 30 : opts.history_fakturs);
        auto r = scenarios::run(kind, *net, opts);
        ++runs;
        std::string tag = std::string(scenarios::to_string(kind)) + (control ? "/control" : "") + " seed " + std::to_string(seed);
        if (!r.passed() || !r.verdict.all()) {
          ++failed;
          if (first.empty()) first = tag + ": " + r.summary();
        }
        if (control) control_detections += static_cast<int>(r.detections.size());
        if (!control && r.detections.empty()) ++silent_attacks;
        for (const auto& det : r.detections) {
          ++detections;
          if (!resolves(*net, [&](const auto& a, const Digest&) { return a.phase == "detect" && a.trace_ref == det.trace_seq; }))
            ++unresolved;
        }
        for (const auto& id : r.audit_tx_ids) {
          ++audits;
          if (!resolves(*net, [&](const auto&, const Digest& tx) { return tx == id; })) ++unresolved;
        }
        if (kind == scenarios::ScenarioKind::Ransomware && !control) {
          const auto& m = r.metrics;
          auto total = m.at("restore").at("total").get<std::size_t>();
          auto verified = m.at("restore").at("verified").get<std::size_t>();
          bool ok = total == m.at("anchored_records").get<std::size_t>() && verified == total && total >= 30;
          ransom_ok &= ok;
          ransom = std::to_string(verified) + "/" + std::to_string(total) + " anchored records verified after restore";
        }
      }
    }
  }
  std::ostringstream d;
  d << runs << " runs, " << failed << " failed; " << detections << " detections and " << audits
    << " audit events, " << unresolved << " unresolved on chain; " << control_detections
    << " control detections; " << ransom;
  if (!first.empty()) d << "; " << first;
  return {failed == 0 && unresolved == 0 && control_detections == 0 && silent_attacks == 0 && ransom_ok, d.str()};
}

// ------------------------------------------------------------ cli

int sh(const std::string& args) {
  int status = std::system((std::string(FC_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_round_trip() {
  auto dir = fs::temp_directory_path() / "fc-acceptance-cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto flow = [&](const std::string& name) -> std::pair<int, fs::path> {
    auto out = " --out '" + (dir / name).string() + "'";
    auto trace = dir / (name + ".jsonl");
    for (const auto& cmd : {
             "bootstrap-network" + out + " --seed 2026",
             "submit-nsfp" + out + " --org 'PT Alpha' --year 2025 --count 5",
             "submit-faktur" + out + " --org 'PT Alpha' --item 'Jasa:2:500000' --buyer 012345678901234 --date 2025-05-02",
             "verify-chain" + out + " --org 'PT Alpha'",
             "verify-chain" + out + " --org DJP",
             "export-trace" + out + " --file '" + trace.string() + "'",
         }) {
      if (int rc = sh(cmd); rc != 0) return {rc, cmd};
    }
    return {0, trace};
  };
  auto [rc1, t1] = flow("first");
  if (rc1 != 0) return {false, "exit " + std::to_string(rc1) + " from: " + t1.string()};
  auto [rc2, t2] = flow("second");
  if (rc2 != 0) return {false, "exit " + std::to_string(rc2) + " on re-run from: " + t2.string()};
  auto a = slurp(t1), b = slurp(t2);
  fs::remove_all(dir);
  bool same = !a.empty() && a == b;
  return {same, "all steps exit 0; traces " + std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                    " bytes, " + (same ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"access-table-conformance", table_conformance},
      {"ledger-integrity", ledger_integrity},
      {"replay-determinism", replay_determinism},
      {"raft-safety-suite", raft_suite},
      {"privacy-partition", privacy_partition},
      {"chaincode-oracle-equivalence", chaincode_oracle},
      {"scenario-verdicts", scenario_verdicts},
      {"cli-round-trip", cli_round_trip},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
