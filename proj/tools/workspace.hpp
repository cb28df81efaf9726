// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

// A CLI workspace is a directory holding network.json (the genesis
// configuration) and journal.jsonl (every command that changed the network,
// in order). Each invocation rebuilds the network by replaying the journal,
// so the directory is the whole state; block files and the trace are
// derived artifacts rewritten after each change.

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakturchain/gateway/gateway.hpp"
#include "fakturchain/netsim/network.hpp"

namespace fakturchain::tools {

class Workspace {
 public:
  // Writes network.json and an empty journal. Throws BadConfig when the
  // directory already holds a network.
  static Workspace create(const std::filesystem::path& dir, const netsim::NetworkConfig& config);
  // Throws NotFound when dir has no network.json.
  static Workspace open(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const { return dir_; }
  const netsim::NetworkConfig& config() const { return config_; }
  const std::vector<nlohmann::json>& journal() const { return journal_; }
  void set_config(netsim::NetworkConfig config);

  // Spawns the network and replays every journal entry through the
  // gateways. The result of entry i is in results()[i].
  netsim::Network& replay();
  netsim::Network& network() { return *net_; }
  gateway::Gateway& gateway(const std::string& org);
  const std::vector<gateway::ApiResponse>& results() const { return results_; }

  // Runs one more command on the replayed network and journals it.
  gateway::ApiResponse execute(nlohmann::json entry);

  // Block file per org, trace.jsonl and status.json.
  void write_artifacts();
  std::filesystem::path block_file(const std::string& org) const;
  std::filesystem::path trace_file() const { return dir_ / "trace.jsonl"; }

 private:
  explicit Workspace(std::filesystem::path dir) : dir_(std::move(dir)) {}
  gateway::ApiResponse apply(const nlohmann::json& entry);
  void settle();

  std::filesystem::path dir_;
  netsim::NetworkConfig config_;
  std::vector<nlohmann::json> journal_;
  std::unique_ptr<netsim::Network> net_;
  std::vector<std::unique_ptr<gateway::Gateway>> gateways_;
  std::vector<gateway::ApiResponse> results_;
};

// "PT Alpha" -> "pt-alpha"
std::string slug(const std::string& name);

}  // namespace fakturchain::tools
