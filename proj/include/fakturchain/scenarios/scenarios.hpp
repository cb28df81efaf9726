// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakturchain/chaincode/faktur.hpp"
#include "fakturchain/netsim/config.hpp"
#include "fakturchain/netsim/network.hpp"

namespace fakturchain::scenarios {

enum class ScenarioKind : std::uint8_t { Phishing = 1, Injection, Mitm, Ransomware };

inline constexpr ScenarioKind kAllScenarios[] = {ScenarioKind::Phishing, ScenarioKind::Injection,
                                                 ScenarioKind::Mitm, ScenarioKind::Ransomware};

std::string_view to_string(ScenarioKind k);
ScenarioKind parse_scenario(std::string_view name);  // throws NotFound

struct ScenarioOptions {
  // Same workload, no fault injected.
  bool control = false;
  // Committed fakturs to have on chain before the attack (ransomware needs 30).
  int history_fakturs = 12;
  // phishing
  int attacker_attempts = 3;
  // mitm
  LogicalTime tamper_ticks = 50;
  std::int64_t tamper_offset = -120;
  // ransomware
  double encrypt_fraction = 0.4;
  bool drop_backup_record = false;

  nlohmann::json to_json() const;
  // Unknown keys are ignored; wrong types throw InvalidArgument.
  static ScenarioOptions from_json(const nlohmann::json& j);
};

struct Verdict {
  bool chain_ok = false;
  bool state_ok = false;
  bool privacy_ok = false;
  bool recovery_ok = false;

  bool all() const { return chain_ok && state_ok && privacy_ok && recovery_ok; }
  nlohmann::json to_json() const;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ScenarioReport {
  ScenarioKind scenario = ScenarioKind::Phishing;
  bool control = false;
  LogicalTime started_at = 0;
  LogicalTime finished_at = 0;
  std::vector<netsim::FaultRule> injected_faults;
  std::vector<netsim::Detection> detections;
  std::vector<std::string> responses;
  Verdict verdict;
  std::vector<Digest> audit_tx_ids;
  std::vector<Check> checks;
  nlohmann::json metrics = nlohmann::json::object();
  std::string note;
  Digest trace_fingerprint;

  // Every check held.
  bool passed() const;
  std::vector<std::string> failures() const;
  nlohmann::json to_json() const;
  std::string summary() const;
};

// Throws ScenarioAssertionFailure naming the failed checks.
void require_passed(const ScenarioReport& report);

// The attacks. Each expects a network with a leader and some committed
// history (see seed_history) and leaves it running.
ScenarioReport run_phishing(netsim::Network& net, const ScenarioOptions& opts = {});
ScenarioReport run_injection(netsim::Network& net, const ScenarioOptions& opts = {});
ScenarioReport run_mitm(netsim::Network& net, const ScenarioOptions& opts = {});
ScenarioReport run_ransomware(netsim::Network& net, const ScenarioOptions& opts = {});
ScenarioReport run(ScenarioKind kind, netsim::Network& net, const ScenarioOptions& opts = {});

// Spawns `config` with wire capture on, seeds history and runs `kind`.
ScenarioReport run_fresh(ScenarioKind kind, netsim::NetworkConfig config,
                         const ScenarioOptions& opts = {});

// --- workload helpers ---

// Waits for a leader, issues serials to every PKP and commits `fakturs`
// fakturs round-robin across them. Throws ScenarioAssertionFailure if the
// network does not get there.
void seed_history(netsim::Network& net, int fakturs);
// Smallest client nonce above everything the org has used or has in flight.
std::uint64_t fresh_nonce(const netsim::Network& net, std::string_view org);
// Serials the org still holds unused, per its own node.
std::vector<chaincode::NsfpSerial> available_serials(const netsim::OrgNode& node, int year);
// A well-formed faktur with correct arithmetic, sealed.
chaincode::Faktur sample_faktur(const chaincode::NsfpSerial& serial, std::string seller,
                                int year, std::uint64_t variant);

// --- re-runnable checks behind the verdict ---

struct CheckResult {
  bool ok = true;
  std::vector<std::string> problems;
};

// Every chain verifies, chains agree block for block up to the shortest,
// and the invariant monitor recorded nothing.
CheckResult check_chains(const netsim::Network& net);
// Every node's world state equals a replay of its own chain.
CheckResult check_states(const netsim::Network& net);

struct PrivacyReport {
  std::size_t payloads = 0;
  std::size_t windows = 0;
  std::size_t bytes_scanned = 0;
  std::vector<std::string> leaks;

  bool ok() const { return leaks.empty(); }
};

// Looks for any `window`-byte run of an anchored private payload where it
// must not be: in a non-party org's store or CAS replica (beyond runs that
// org legitimately holds in its own payloads), in any chain, and in the
// captured wire log.
PrivacyReport audit_privacy(const netsim::Network& net, std::size_t window = 16);

}  // namespace fakturchain::scenarios
