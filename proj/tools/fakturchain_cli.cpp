// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fakturchain/chaincode/faktur.hpp"
#include "fakturchain/common/error.hpp"
#include "fakturchain/gateway/gateway.hpp"
#include "fakturchain/gateway/http.hpp"
#include "fakturchain/ledger/chain.hpp"
#include "fakturchain/scenarios/scenarios.hpp"
#include "workspace.hpp"

namespace {

using namespace fakturchain;
using json = nlohmann::json;
namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::string org;
  std::optional<std::uint64_t> seed;
  std::string out = "fc-workspace";
};

void add_common(CLI::App* cmd, Common& c, bool org = false) {
  cmd->add_option("--config", c.config, "network configuration file (JSON)");
  auto* o = cmd->add_option("--org", c.org, "organization name");
  if (org) o->required();
  cmd->add_option("--seed", c.seed, "network seed");
  cmd->add_option("--out", c.out, "workspace directory");
}

netsim::NetworkConfig base_config(const Common& c) {
  auto config = c.config.empty() ? netsim::NetworkConfig::standard(c.seed.value_or(1))
                                 : netsim::NetworkConfig::load(c.config);
  if (c.seed) config.seed = *c.seed;
  return config;
}

int report(const gateway::ApiResponse& resp) {
  std::cout << resp.body.dump(2) << "\n";
  if (!resp.ok()) {
    auto reasons = resp.reasons();
    std::cerr << "rejected (" << resp.status << "): " << resp.body.value("detail", resp.error());
    for (const auto& r : reasons) std::cerr << " [" << r << "]";
    std::cerr << "\n";
    return 1;
  }
  return 0;
}

// Fills in what the command line may leave out: seller, serial, arithmetic.
json complete_faktur(json f, const netsim::Network& net, const std::string& org) {
  if (!f.contains("seller_org")) f["seller_org"] = org;
  if (!f.contains("transaction_date")) throw Error(Errc::InvalidArgument, "faktur needs transaction_date");
  if (!f.contains("buyer_tax_id")) throw Error(Errc::InvalidArgument, "faktur needs buyer_tax_id");
  if (!f.contains("nsfp") || f.at("nsfp") == "next") {
    int year = chaincode::Date::parse(f.at("transaction_date").get<std::string>()).year;
    auto serials = scenarios::available_serials(net.org(org), year);
    if (serials.empty())
      throw Error(Errc::NotFound, org + " holds no unused serial for " + std::to_string(year));
    f["nsfp"] = serials.front().formatted();
  }
  if (!f.contains("tax_base") || !f.contains("vat_amount")) {
    f["tax_base"] = 0;
    f["vat_amount"] = 0;
    auto parsed = chaincode::Faktur::from_json(f);
    auto vat = chaincode::compute_vat(parsed.line_items, net.config().chaincode.vat_rate);
    f["tax_base"] = vat.tax_base;
    f["vat_amount"] = vat.vat_amount;
  }
  return f;
}

json parse_item(const std::string& spec) {
  // "description:quantity:unit_price"; the description may itself hold ':'.
  auto last = spec.rfind(':');
  auto mid = last == std::string::npos ? std::string::npos : spec.rfind(':', last - 1);
  if (mid == std::string::npos || last == 0)
    throw Error(Errc::InvalidArgument, "item must be description:quantity:unit_price");
  return {{"description", spec.substr(0, mid)},
          {"quantity", spec.substr(mid + 1, last - mid - 1)},
          {"unit_price", std::stoll(spec.substr(last + 1))}};
}

std::atomic<bool>* g_stop = nullptr;
void on_signal(int) {
  if (g_stop) *g_stop = true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fakturchain: permissioned e-Faktur ledger simulator"};
  app.require_subcommand(1);
  Common c;

  auto* boot = app.add_subcommand("bootstrap-network", "create a workspace and its genesis");
  add_common(boot, c);

  auto* issue = app.add_subcommand("issue-cert", "enroll an organization and export its certificate");
  add_common(issue, c, true);
  std::string role = "pkp";
  issue->add_option("--role", role, "pkp or djp (for new organizations)");

  auto* nsfp = app.add_subcommand("submit-nsfp", "request serial numbers");
  add_common(nsfp, c, true);
  int year = 2025;
  std::int64_t count = 10;
  nsfp->add_option("--year", year, "tax year");
  nsfp->add_option("--count", count, "how many serials");

  auto* faktur = app.add_subcommand("submit-faktur", "submit a faktur");
  add_common(faktur, c, true);
  std::string faktur_file;
  std::vector<std::string> items;
  std::string buyer;
  std::string date;
  std::string serial = "next";
  faktur->add_option("--file", faktur_file, "faktur JSON");
  faktur->add_option("--item", items, "line item description:quantity:unit_price");
  faktur->add_option("--buyer", buyer, "buyer tax id");
  faktur->add_option("--date", date, "transaction date YYYY-MM-DD");
  faktur->add_option("--nsfp", serial, "serial to use, or 'next'");

  auto* query = app.add_subcommand("query", "read through an organization's gateway");
  add_common(query, c, true);
  std::string what = "nsfp";
  std::string q_nsfp;
  std::uint64_t number = 0;
  std::int64_t from = 0;
  query->add_option("--what", what, "nsfp, faktur, efaktur, block or events")
      ->check(CLI::IsMember({"nsfp", "faktur", "efaktur", "block", "events"}));
  query->add_option("--nsfp", q_nsfp, "serial filter");
  query->add_option("--number", number, "block number");
  query->add_option("--from", from, "event sequence to resume after");

  auto* verify = app.add_subcommand("verify-chain", "check a block file");
  add_common(verify, c);
  std::string block_path;
  verify->add_option("--file", block_path, "block file (default: the org's file in the workspace)");

  auto* scen = app.add_subcommand("run-scenario", "run an attack scenario on a fresh network");
  add_common(scen, c);
  std::string scen_name;
  bool control = false;
  std::string report_path;
  scen->add_option("name", scen_name, "phishing, injection, mitm or ransomware")->required();
  scen->add_flag("--control", control, "run the workload without the fault");
  scen->add_option("--report", report_path, "write the JSON report here");

  auto* trace = app.add_subcommand("export-trace", "replay the workspace and write its trace");
  add_common(trace, c);
  std::string trace_path;
  trace->add_option("--file", trace_path, "output path (default: <workspace>/trace.jsonl)");

  auto* serve = app.add_subcommand("serve", "serve an organization's gateway over HTTP");
  add_common(serve, c, true);
  std::string host = "127.0.0.1";
  int port = 8080;
  int tick_ms = 50;
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port (0 picks one)");
  serve->add_option("--tick-ms", tick_ms, "advance the network every N ms while idle");

  CLI11_PARSE(app, argc, argv);

  try {
    if (boot->parsed()) {
      auto ws = tools::Workspace::create(c.out, base_config(c));
      auto& net = ws.replay();
      ws.write_artifacts();
      json out{{"workspace", ws.dir().string()},
               {"seed", ws.config().seed},
               {"leader", net.leader().value_or("")},
               {"orgs", json::array()}};
      for (const auto& n : net.orgs())
        out["orgs"].push_back({{"org", n.org},
                               {"role", identity::to_string(n.role)},
                               {"cert_id", n.cert.cert_id}});
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (verify->parsed()) {
      fs::path file = block_path;
      if (file.empty()) {
        auto ws = tools::Workspace::open(c.out);
        file = ws.block_file(c.org.empty() ? ws.config().djp_org() : c.org);
      }
      auto bytes = ledger::block_store::read_file(file);
      auto rep = ledger::block_store::verify(bytes);
      auto loaded = ledger::block_store::parse(bytes);
      json out{{"file", file.string()}, {"ok", rep.ok}, {"records", loaded.blocks.size()}};
      if (!rep.ok) {
        out["first_bad_block"] = rep.first_bad_block.value_or(0);
        out["detail"] = rep.detail;
        std::cout << out.dump(2) << "\n";
        std::cerr << "chain broken at block " << rep.first_bad_block.value_or(0) << ": "
                  << rep.detail << "\n";
        return 1;
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (scen->parsed()) {
      auto kind = scenarios::parse_scenario(scen_name);
      netsim::NetworkConfig config;
      if (c.config.empty() && fs::exists(fs::path(c.out) / "network.json")) {
        config = tools::Workspace::open(c.out).config();
        if (c.seed) config.seed = *c.seed;
      } else {
        config = base_config(c);
      }
      config.faults.clear();
      scenarios::ScenarioOptions opts;
      opts.control = control;
      auto r = scenarios::run_fresh(kind, config, opts);
      std::cout << r.summary();
      if (!report_path.empty()) std::ofstream(report_path) << r.to_json().dump(2) << "\n";
      return r.passed() ? 0 : 1;
    }

    auto ws = tools::Workspace::open(c.out);
    auto& net = ws.replay();

    if (issue->parsed()) {
      if (!ws.config().find_org(c.org)) {
        if (!ws.journal().empty())
          throw Error(Errc::BadConfig,
                      "membership is fixed once transactions exist; enroll " + c.org +
                          " in a new workspace");
        auto config = ws.config();
        config.orgs.push_back({c.org, identity::parse_role(role == "djp" ? "DJP" : "PKP")});
        ws.set_config(config);
        ws.replay();
      }
      const auto& cert = ws.network().org(c.org).cert;
      fs::create_directories(ws.dir() / "certs");
      std::ofstream(ws.dir() / "certs" / (tools::slug(c.org) + ".json")) << cert.to_json().dump(2)
                                                                         << "\n";
      ws.write_artifacts();
      std::cout << cert.to_json().dump(2) << "\n";
      return 0;
    }

    if (nsfp->parsed()) {
      auto resp = ws.execute({{"cmd", "submit-nsfp"}, {"org", c.org}, {"tax_year", year}, {"count", count}});
      ws.write_artifacts();
      return report(resp);
    }

    if (faktur->parsed()) {
      json f;
      if (!faktur_file.empty()) {
        std::ifstream in(faktur_file);
        if (!in) throw Error(Errc::NotFound, "cannot read " + faktur_file);
        f = json::parse(in);
      } else {
        f = json::object();
        f["line_items"] = json::array();
        for (const auto& i : items) f["line_items"].push_back(parse_item(i));
      }
      if (!buyer.empty()) f["buyer_tax_id"] = buyer;
      if (!date.empty()) f["transaction_date"] = date;
      if (!f.contains("nsfp") || serial != "next") f["nsfp"] = serial;
      f = complete_faktur(f, net, c.org);
      auto resp = ws.execute({{"cmd", "submit-faktur"}, {"org", c.org}, {"faktur", f}});
      ws.write_artifacts();
      return report(resp);
    }

    if (query->parsed()) {
      std::string target;
      if (what == "nsfp") {
        target = "/api/v1/nsfp";
      } else if (what == "faktur") {
        target = "/api/v1/faktur" + (q_nsfp.empty() ? std::string{} : "?nsfp=" + q_nsfp);
      } else if (what == "efaktur") {
        if (q_nsfp.empty()) throw Error(Errc::InvalidArgument, "efaktur needs --nsfp");
        target = "/api/v1/faktur?render=efaktur&nsfp=" + q_nsfp;
      } else if (what == "block") {
        target = "/api/v1/blocks/" + std::to_string(number);
      } else {
        target = "/api/v1/events?from=" + std::to_string(from);
      }
      const auto& node = net.org(c.org);
      auto req = gateway::ApiRequest::make("GET", target, nullptr, node.cert, node.keys, 0);
      auto resp = ws.gateway(c.org).handle(req);
      if (what == "efaktur" && resp.ok()) std::cerr << resp.body.value("text", "");
      return report(resp);
    }

    if (trace->parsed()) {
      fs::path file = trace_path.empty() ? ws.trace_file() : fs::path(trace_path);
      net.trace().write_jsonl(file);
      std::cout << json{{"file", file.string()},
                        {"events", net.trace().size()},
                        {"fingerprint", net.trace().fingerprint().hex()}}
                       .dump(2)
                << "\n";
      return 0;
    }

    if (serve->parsed()) {
      std::mutex lock;
      gateway::HttpServer server(ws.gateway(c.org), net, lock);
      server.set_tick_interval(std::chrono::milliseconds(tick_ms));
      int bound = server.start(host, port);
      std::cout << json{{"org", c.org}, {"host", host}, {"port", bound}}.dump() << std::endl;
      std::atomic<bool> stop{false};
      g_stop = &stop;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      while (!stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
