// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "workspace.hpp"

#include <cctype>
#include <fstream>

#include "fakturchain/common/error.hpp"
#include "fakturchain/ledger/chain.hpp"
#include "fakturchain/scenarios/scenarios.hpp"

namespace fakturchain::tools {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string slug(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!out.empty() && out.back() != '-')
      out += '-';
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

Workspace Workspace::create(const fs::path& dir, const netsim::NetworkConfig& config) {
  if (fs::exists(dir / "network.json"))
    throw Error(Errc::BadConfig, dir.string() + " already holds a network");
  config.validate();
  fs::create_directories(dir);
  Workspace ws(dir);
  ws.set_config(config);
  std::ofstream(dir / "journal.jsonl", std::ios::trunc);
  return ws;
}

Workspace Workspace::open(const fs::path& dir) {
  if (!fs::exists(dir / "network.json"))
    throw Error(Errc::NotFound, "no network.json in " + dir.string() +
                                    " (run bootstrap-network first)");
  Workspace ws(dir);
  ws.config_ = netsim::NetworkConfig::load(dir / "network.json");
  std::ifstream in(dir / "journal.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      ws.journal_.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(Errc::Malformed, "journal.jsonl: " + std::string(e.what()));
    }
  }
  return ws;
}

void Workspace::set_config(netsim::NetworkConfig config) {
  config.validate();
  config_ = std::move(config);
  config_.save(dir_ / "network.json");
}

gateway::Gateway& Workspace::gateway(const std::string& org) {
  for (auto& g : gateways_)
    if (g->org() == org) return *g;
  gateways_.push_back(std::make_unique<gateway::Gateway>(*net_, org));
  return *gateways_.back();
}

void Workspace::settle() {
  net_->run_until(
      [](const netsim::Network& n) { return n.synced_height() == n.max_height(); }, 200);
}

netsim::Network& Workspace::replay() {
  gateways_.clear();
  results_.clear();
  net_ = netsim::Network::spawn(config_);
  net_->run_until([](const netsim::Network& n) { return n.leader().has_value(); }, 600);
  for (const auto& entry : journal_) results_.push_back(apply(entry));
  settle();
  return *net_;
}

gateway::ApiResponse Workspace::apply(const json& entry) {
  const auto cmd = entry.at("cmd").get<std::string>();
  const auto org = entry.at("org").get<std::string>();
  auto& node = net_->org(org);
  std::string method;
  std::string target;
  json body;
  if (cmd == "submit-nsfp") {
    method = "POST";
    target = "/api/v1/nsfp";
    body = {{"tax_year", entry.at("tax_year")}, {"count", entry.at("count")}};
  } else if (cmd == "submit-faktur") {
    method = "POST";
    target = "/api/v1/faktur";
    body = entry.at("faktur");
  } else if (cmd == "revoke-cert") {
    method = "POST";
    target = "/api/v1/admin/revoke";
    body = {{"cert_id", entry.at("cert_id")}, {"reason", entry.value("reason", "")}};
  } else if (cmd == "update-profile") {
    method = "PUT";
    target = "/api/v1/profile";
    body = entry.at("profile");
  } else {
    throw Error(Errc::Malformed, "unknown journal command " + cmd);
  }
  auto req = gateway::ApiRequest::make(method, target, body, node.cert, node.keys,
                                       scenarios::fresh_nonce(*net_, org));
  auto resp = gateway(org).handle(req);
  settle();
  return resp;
}

gateway::ApiResponse Workspace::execute(json entry) {
  auto resp = apply(entry);
  journal_.push_back(entry);
  results_.push_back(resp);
  std::ofstream out(dir_ / "journal.jsonl", std::ios::app);
  out << entry.dump() << '\n';
  return resp;
}

fs::path Workspace::block_file(const std::string& org) const {
  return dir_ / "blocks" / (slug(org) + ".blk");
}

void Workspace::write_artifacts() {
  fs::create_directories(dir_ / "blocks");
  json status{{"tick", net_->now()}, {"orgs", json::array()}};
  for (const auto& n : net_->orgs()) {
    ledger::block_store::write_file(block_file(n.org), n.chain.blocks());
    status["orgs"].push_back({{"org", n.org},
                              {"height", n.chain.height()},
                              {"head", n.chain.head().block_hash.hex()},
                              {"state_hash", n.state.state_hash.hex()},
                              {"block_file", block_file(n.org).filename().string()}});
  }
  net_->trace().write_jsonl(trace_file());
  status["trace_fingerprint"] = net_->trace().fingerprint().hex();
  std::ofstream(dir_ / "status.json", std::ios::trunc) << status.dump(2) << '\n';
}

}  // namespace fakturchain::tools
