// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "fakturchain/common/error.hpp"
#include "fakturchain/gateway/gateway.hpp"
#include "fakturchain/scenarios/scenarios.hpp"
#include "fixtures.hpp"

namespace fakturchain::gateway {
namespace {

using nlohmann::json;

struct Api : ::testing::Test {
  std::unique_ptr<netsim::Network> net;
  std::map<std::string, std::unique_ptr<Gateway>> gw;
  std::uint64_t nonce = 1;

  void SetUp() override {
    net = netsim::Network::spawn(netsim::NetworkConfig::standard(21));
    ASSERT_TRUE(net->run_until([](const netsim::Network& n) { return n.leader().has_value(); }, 600));
    for (const auto& n : net->orgs()) gw[n.org] = std::make_unique<Gateway>(*net, n.org);
  }

  // `as` signs; `at` is the gateway that serves the call.
  ApiResponse call(const std::string& as, const std::string& at, const std::string& method,
                   const std::string& target, json body = nullptr) {
    const auto& n = net->org(as);
    return gw.at(at)->handle(ApiRequest::make(method, target, std::move(body), n.cert, n.keys,
                                              method == "GET" ? 0 : nonce++));
  }
  ApiResponse call(const std::string& as, const std::string& method, const std::string& target,
                   json body = nullptr) {
    return call(as, as, method, target, std::move(body));
  }
  ApiResponse call_orderer(const std::string& at, const std::string& method, const std::string& target,
                           json body = nullptr) {
    const auto& o = net->orderers().front();
    return gw.at(at)->handle(ApiRequest::make(method, target, std::move(body), o.cert, o.keys, nonce++));
  }
  void settle() {
    net->run_until([](const netsim::Network& n) { return n.synced_height() == n.max_height(); }, 400);
  }
  std::string free_serial(const std::string& org) {
    return testing::available_serials(net->org(org)).front().formatted();
  }
  json faktur_body(const std::string& org, const std::string& serial, chaincode::Rupiah price = 150000) {
    auto f = testing::simple_faktur(chaincode::NsfpSerial::parse(serial), org, price);
    return f.to_json();
  }
  void seed() {
    ASSERT_TRUE(call("PT Alpha", "POST", "/api/v1/nsfp", {{"tax_year", 2025}, {"count", 5}}).ok());
    ASSERT_TRUE(call("PT Beta", "POST", "/api/v1/nsfp", {{"tax_year", 2025}, {"count", 5}}).ok());
    settle();
  }
};

TEST_F(Api, Authentication) {
  auto& alpha = net->org("PT Alpha");
  auto req = ApiRequest::make("GET", "/api/v1/nsfp", nullptr, alpha.cert, alpha.keys, 0);
  EXPECT_EQ(gw["PT Alpha"]->handle(req).status, 200);

  auto bad_sig = req;
  bad_sig.target = "/api/v1/nsfp?owner=x";
  EXPECT_EQ(gw["PT Alpha"]->handle(bad_sig).status, 401);

  auto unknown = req;
  unknown.cert_id = "cert-unknown";
  EXPECT_EQ(gw["PT Alpha"]->handle(unknown).status, 401);

  // A key the CA never certified, presenting Alpha's cert id.
  auto rogue = crypto::KeyPair::from_seed(Digest::of("rogue"));
  auto forged = ApiRequest::make("GET", "/api/v1/nsfp", nullptr, alpha.cert, rogue, 0);
  EXPECT_EQ(gw["PT Alpha"]->handle(forged).status, 401);
}

TEST_F(Api, EveryResponseCarriesCommittedHeight) {
  seed();
  for (const auto& target : {"/api/v1/nsfp", "/api/v1/nope", "/api/v1/blocks/999"}) {
    auto r = call("PT Alpha", "GET", target);
    EXPECT_EQ(r.body.at("committed_height"), net->org("PT Alpha").chain.height()) << target;
  }
}

// The access table over the four transaction routes, for each role.
TEST_F(Api, RoleRouteMatrix) {
  seed();
  std::map<std::string, std::map<std::string, bool>> expected = {
      {"PKP", {{"GetNsfp", true}, {"GetFaktur", true}, {"PostNsfp", true}, {"PostFaktur", true}}},
      {"DJP", {{"GetNsfp", true}, {"GetFaktur", true}, {"PostNsfp", false}, {"PostFaktur", false}}},
      {"ORDERER", {{"GetNsfp", false}, {"GetFaktur", false}, {"PostNsfp", false}, {"PostFaktur", false}}},
  };
  int cells = 0;
  for (const auto& [role, routes] : expected) {
    for (const auto& [route, allowed] : routes) {
      std::string at = role == "PKP" ? "PT Alpha" : "DJP";
      std::string method = route.rfind("Get", 0) == 0 ? "GET" : "POST";
      std::string target = route.find("Nsfp") != std::string::npos ? "/api/v1/nsfp" : "/api/v1/faktur";
      json body = nullptr;
      if (route == "PostNsfp") body = {{"tax_year", 2025}, {"count", 1}};
      if (route == "PostFaktur") body = faktur_body(role == "PKP" ? "PT Alpha" : "DJP", free_serial("PT Alpha"));
      ApiResponse r = role == "ORDERER" ? call_orderer(at, method, target, body)
                    : call(role == "PKP" ? "PT Alpha" : "DJP", at, method, target, body);
      if (allowed)
        EXPECT_EQ(r.status, 200) << role << " " << route << " " << r.body;
      else
        EXPECT_EQ(r.status, 403) << role << " " << route << " " << r.body;
      ++cells;
    }
  }
  EXPECT_EQ(cells, 12);
}

TEST_F(Api, GatewaySubmitsOnlyForItsOwnOrg) {
  auto r = call("PT Beta", "PT Alpha", "POST", "/api/v1/nsfp", {{"tax_year", 2025}, {"count", 1}});
  EXPECT_EQ(r.status, 403);
}

TEST_F(Api, RoutingErrors) {
  EXPECT_EQ(call("PT Alpha", "GET", "/api/v1/unknown").status, 404);
  EXPECT_EQ(call("PT Alpha", "GET", "/elsewhere").status, 404);
  EXPECT_EQ(call("PT Alpha", "PUT", "/api/v1/nsfp", json::object()).status, 405);
  EXPECT_EQ(call("PT Alpha", "GET", "/api/v1/profile").status, 405);
  EXPECT_EQ(call("PT Alpha", "GET", "/api/v1/blocks/x").status, 400);
  EXPECT_EQ(call("PT Alpha", "POST", "/api/v1/nsfp", {{"tax_year", 2025}}).status, 400);
  EXPECT_EQ(call("PT Alpha", "POST", "/api/v1/nsfp", {{"tax_year", 2025}, {"count", 0}}).status, 400);
  EXPECT_EQ(call("PT Alpha", "POST", "/api/v1/nsfp", {{"tax_year", 2025}, {"count", "many"}}).status, 400);
}

TEST_F(Api, NonceRules) {
  auto& alpha = net->org("PT Alpha");
  auto body = json{{"tax_year", 2025}, {"count", 2}};
  auto req = ApiRequest::make("POST", "/api/v1/nsfp", body, alpha.cert, alpha.keys, 500);
  auto first = gw["PT Alpha"]->handle(req);
  ASSERT_EQ(first.status, 200);
  // Retrying the identical request returns the same outcome without a second allocation.
  auto again = gw["PT Alpha"]->handle(req);
  EXPECT_EQ(again.body.at("tx_id"), first.body.at("tx_id"));
  settle();
  EXPECT_EQ(net->org("PT Alpha").state.allocations.size(), 1u);
  // The same nonce for a different request is a replay.
  auto other = ApiRequest::make("POST", "/api/v1/nsfp", json{{"tax_year", 2025}, {"count", 3}},
                                alpha.cert, alpha.keys, 500);
  auto r = gw["PT Alpha"]->handle(other);
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(r.reasons(), std::vector<std::string>{"replay"});
  // A fresh gateway still refuses a nonce the ledger has seen.
  Gateway fresh(*net, "PT Alpha");
  EXPECT_EQ(fresh.handle(other).status, 409);
  auto high = ApiRequest::make("POST", "/api/v1/nsfp", body, alpha.cert, alpha.keys, 1ULL << 63);
  EXPECT_EQ(gw["PT Alpha"]->handle(high).status, 400);
}

TEST_F(Api, ReadYourWrites) {
  for (int i = 0; i < 5; ++i) {
    auto post = call("PT Alpha", "POST", "/api/v1/nsfp", {{"tax_year", 2025}, {"count", 1 + i}});
    ASSERT_EQ(post.status, 200) << post.body;
    auto id = post.body.at("allocation").at("allocation_id");
    EXPECT_GE(post.body.at("committed_height").get<std::uint64_t>(), post.body.at("block_number").get<std::uint64_t>());
    auto get = call("PT Alpha", "GET", "/api/v1/nsfp?owner=PT%20Alpha");
    bool found = false;
    for (const auto& a : get.body.at("allocations")) found |= a.at("allocation_id") == id;
    EXPECT_TRUE(found) << i;
  }
}

TEST_F(Api, FakturLifecycle) {
  seed();
  auto serial = free_serial("PT Alpha");
  auto body = faktur_body("PT Alpha", serial);
  auto wrong = body;
  wrong["faktur_hash"] = Digest::of("other").hex();
  auto mismatch = call("PT Alpha", "POST", "/api/v1/faktur", wrong);
  EXPECT_EQ(mismatch.status, 409);
  EXPECT_EQ(mismatch.reasons(), std::vector<std::string>{"hash-mismatch"});

  auto ok = call("PT Alpha", "POST", "/api/v1/faktur", body);
  ASSERT_EQ(ok.status, 200) << ok.body;
  EXPECT_EQ(ok.body.at("faktur_hash"), body.at("faktur_hash"));
  settle();

  auto dup = call("PT Alpha", "POST", "/api/v1/faktur", faktur_body("PT Alpha", serial, 99));
  EXPECT_EQ(dup.status, 409);
  EXPECT_EQ(dup.reasons(), std::vector<std::string>{"duplicate"});

  auto foreign = call("PT Beta", "POST", "/api/v1/faktur", faktur_body("PT Beta", free_serial("PT Alpha")));
  EXPECT_EQ(foreign.status, 409);
  EXPECT_EQ(foreign.reasons(), std::vector<std::string>{"ownership"});

  auto mine = call("PT Alpha", "GET", "/api/v1/faktur?nsfp=" + serial);
  ASSERT_EQ(mine.body.at("fakturs").size(), 1u);
  EXPECT_EQ(mine.body["fakturs"][0].at("faktur"), body);
  auto theirs = call("PT Beta", "GET", "/api/v1/faktur?nsfp=" + serial);
  EXPECT_TRUE(theirs.body.at("fakturs").empty());
  auto djp = call("DJP", "GET", "/api/v1/faktur");
  ASSERT_EQ(djp.body.at("fakturs").size(), 1u);
  EXPECT_TRUE(djp.body["fakturs"][0].contains("faktur"));
}

TEST_F(Api, EfakturRendering) {
  seed();
  auto serial = free_serial("PT Alpha");
  ASSERT_TRUE(call("PT Alpha", "PUT", "/api/v1/profile",
                   {{"display_name", "PT Alpha Sejahtera"}, {"address", "Jl. Merdeka 1"},
                    {"tax_id", "012345678901234"}, {"endpoint", ""}})
                  .ok());
  auto post = call("PT Alpha", "POST", "/api/v1/faktur", faktur_body("PT Alpha", serial));
  ASSERT_TRUE(post.ok());
  settle();
  auto doc = call("PT Alpha", "GET", "/api/v1/faktur?render=efaktur&nsfp=" + serial);
  ASSERT_EQ(doc.status, 200) << doc.body;
  auto hash = post.body.at("faktur_hash").get<std::string>();
  EXPECT_EQ(doc.body.at("verification_hash"), hash);
  EXPECT_NE(doc.body.at("text").get<std::string>().find(hash), std::string::npos);
  EXPECT_NE(doc.body.at("text").get<std::string>().find("PT Alpha Sejahtera"), std::string::npos);
  // The hash printed on the invoice is the one anchored in the block.
  auto block = call("PT Alpha", "GET", "/api/v1/blocks/" + std::to_string(doc.body.at("block_number").get<int>()));
  bool anchored = false;
  for (const auto& tx : block.body.at("txs"))
    anchored |= tx.value("payload_anchor", std::string{}).find(hash) != std::string::npos;
  EXPECT_TRUE(anchored) << block.body;

  EXPECT_EQ(call("PT Beta", "GET", "/api/v1/faktur?render=efaktur&nsfp=" + serial).status, 403);
  EXPECT_EQ(call("DJP", "GET", "/api/v1/faktur?render=efaktur&nsfp=" + serial).status, 200);
  EXPECT_EQ(call("PT Alpha", "GET", "/api/v1/faktur?render=efaktur&nsfp=" + free_serial("PT Alpha")).status, 404);

  // The seller's private copy is gone: the document cannot be produced.
  net->org("PT Alpha").store.clear();
  EXPECT_EQ(call("PT Alpha", "GET", "/api/v1/faktur?render=efaktur&nsfp=" + serial).status, 409);
}

TEST_F(Api, BlocksAreRedactedForNonParties) {
  seed();
  auto post = call("PT Alpha", "POST", "/api/v1/faktur", faktur_body("PT Alpha", free_serial("PT Alpha")));
  ASSERT_TRUE(post.ok());
  settle();
  auto number = std::to_string(post.body.at("block_number").get<int>());
  auto tx_id = post.body.at("tx_id");
  auto find = [&](const ApiResponse& r) {
    for (const auto& tx : r.body.at("txs"))
      if (tx.at("tx_id") == tx_id) return tx;
    return json();
  };
  EXPECT_FALSE(find(call("PT Alpha", "GET", "/api/v1/blocks/" + number)).contains("redacted"));
  EXPECT_FALSE(find(call("DJP", "GET", "/api/v1/blocks/" + number)).contains("redacted"));
  EXPECT_EQ(find(call("PT Beta", "GET", "/api/v1/blocks/" + number)).value("redacted", false), true);
  auto h = net->org("PT Beta").chain.height();
  EXPECT_EQ(call("PT Beta", "GET", "/api/v1/blocks/" + std::to_string(h + 1)).status, 404);
}

// Feed soundness: numbering is contiguous, resuming yields exactly the
// suffix, nobody sees a private event they are not party to, and DJP sees
// every committed transaction.
TEST_F(Api, EventFeed) {
  seed();
  for (int i = 0; i < 3; ++i) {
    ASSERT_TRUE(call("PT Alpha", "POST", "/api/v1/faktur", faktur_body("PT Alpha", free_serial("PT Alpha"), 100 + i)).ok());
    ASSERT_TRUE(call("PT Beta", "POST", "/api/v1/faktur", faktur_body("PT Beta", free_serial("PT Beta"), 200 + i)).ok());
  }
  settle();
  std::size_t committed = 0;
  for (const auto& b : net->djp().chain.blocks()) committed += b.txs.size();

  for (const char* who : {"DJP", "PT Alpha", "PT Beta", "PT Gamma"}) {
    auto all = call(who, "GET", "/api/v1/events").body.at("events");
    std::uint64_t prev_seq = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
      EXPECT_EQ(all[i].at("class_sequence"), i + 1) << who;
      EXPECT_GT(all[i].at("sequence").get<std::uint64_t>(), prev_seq);
      prev_seq = all[i].at("sequence");
      const auto& vis = all[i].at("visibility");
      if (std::string(who) != "DJP" && vis.is_object() && vis.contains("sender")) {
        EXPECT_TRUE(vis.at("sender") == who || vis.at("receiver") == who) << who << vis;
      }
    }
    std::size_t private_events = 0;
    for (const auto& e : all) private_events += e.at("visibility").at("kind") == "private";
    if (std::string(who) == "DJP") {
      EXPECT_EQ(all.size(), committed);
      EXPECT_EQ(private_events, 6u);
    } else {
      EXPECT_EQ(private_events, std::string(who) == "PT Gamma" ? 0u : 3u) << who;
    }
    for (std::size_t k = 0; k <= all.size(); k += 3) {
      auto tail = call(who, "GET", "/api/v1/events?from=" + std::to_string(k)).body.at("events");
      ASSERT_EQ(tail.size(), all.size() - k) << who << " from " << k;
      for (std::size_t i = 0; i < tail.size(); ++i) EXPECT_EQ(tail[i], all[k + i]);
    }
    auto page = call(who, "GET", "/api/v1/events?from=0&limit=2").body;
    EXPECT_LE(page.at("events").size(), 2u);
  }
  EXPECT_EQ(call("DJP", "GET", "/api/v1/events?from=-1").status, 400);
  EXPECT_EQ(call("DJP", "GET", "/api/v1/events?from=abc").status, 400);
}

TEST_F(Api, RevocationIsVisibleInOneFeedUpdate) {
  seed();
  auto before = call("DJP", "GET", "/api/v1/events").body.at("next").get<std::uint64_t>();
  auto beta = net->org("PT Beta").cert.cert_id;
  auto r = call("DJP", "POST", "/api/v1/admin/revoke", {{"cert_id", beta}, {"reason", "phished"}});
  ASSERT_EQ(r.status, 200) << r.body;
  auto update = call("DJP", "GET", "/api/v1/events?from=" + std::to_string(before)).body.at("events");
  bool seen = false;
  for (const auto& e : update) seen |= e.at("tx_type") == "RevokeCert" && e.at("accepted") == true;
  EXPECT_TRUE(seen) << update;

  auto again = call("DJP", "POST", "/api/v1/admin/revoke", {{"cert_id", beta}});
  EXPECT_EQ(again.status, 409);
  EXPECT_EQ(again.reasons(), std::vector<std::string>{"already-revoked"});
  EXPECT_EQ(call("DJP", "POST", "/api/v1/admin/revoke", {{"cert_id", "cert-nobody"}}).status, 404);
  EXPECT_EQ(call("PT Alpha", "DJP", "POST", "/api/v1/admin/revoke", {{"cert_id", beta}}).status, 403);
  settle();
  EXPECT_EQ(call("PT Beta", "GET", "/api/v1/nsfp").status, 401);
}

TEST_F(Api, Profile) {
  auto r = call("PT Alpha", "PUT", "/api/v1/profile", {{"display_name", "A"}, {"tax_id", "123"}});
  EXPECT_EQ(r.status, 400);
  r = call("PT Alpha", "PUT", "/api/v1/profile", {{"display_name", "A"}, {"tax_id", "0123456789012345"}});
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(gw["PT Alpha"]->profile().display_name, "A");
  EXPECT_EQ(call("PT Beta", "PT Alpha", "PUT", "/api/v1/profile", {{"display_name", "B"}}).status, 403);
  EXPECT_TRUE(OrgProfile::valid_tax_id("012345678901234"));
  EXPECT_FALSE(OrgProfile::valid_tax_id("01234567890123a"));
}

TEST_F(Api, ScenarioRoute) {
  auto r = call("DJP", "POST", "/api/v1/scenario/injection", {{"seed", 3}});
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(r.body.at("passed"), true);
  EXPECT_EQ(call("PT Alpha", "DJP", "POST", "/api/v1/scenario/injection", json::object()).status, 403);
  EXPECT_EQ(call("DJP", "POST", "/api/v1/scenario/ddos", json::object()).status, 404);
  // The live network is untouched.
  EXPECT_TRUE(net->detections().empty());
}

TEST(ParseTarget, DecodesQuery) {
  auto [path, q] = parse_target("/api/v1/nsfp?owner=PT%20Alpha&tax_year=2025&x=a+b");
  EXPECT_EQ(path, "/api/v1/nsfp");
  EXPECT_EQ(q.at("owner"), "PT Alpha");
  EXPECT_EQ(q.at("tax_year"), "2025");
  EXPECT_EQ(q.at("x"), "a b");
  EXPECT_TRUE(parse_target("/p").second.empty());
}

TEST(ApiRequest, SigningBytesLayout) {
  ApiRequest r;
  r.method = "POST";
  r.target = "/api/v1/nsfp";
  r.nonce = 7;
  r.body = {{"count", 1}};
  EXPECT_EQ(to_string(r.signing_bytes()), "POST\n/api/v1/nsfp\n7\n{\"count\":1}");
  r.body = nullptr;
  EXPECT_EQ(to_string(r.signing_bytes()), "POST\n/api/v1/nsfp\n7\n");
}

}  // namespace
}  // namespace fakturchain::gateway
