// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "fakturchain/common/error.hpp"
#include "fakturchain/gateway/http.hpp"
#include "fixtures.hpp"

namespace fakturchain::gateway {
namespace {

struct Http : ::testing::Test {
  std::unique_ptr<netsim::Network> net;
  std::mutex lock;
  std::unique_ptr<Gateway> alpha_gw;
  std::unique_ptr<HttpServer> server;
  int port = 0;
  std::uint64_t nonce = 1;

  void SetUp() override {
    net = netsim::Network::spawn(netsim::NetworkConfig::standard(44));
    ASSERT_TRUE(net->run_until([](const netsim::Network& n) { return n.leader().has_value(); }, 600));
    alpha_gw = std::make_unique<Gateway>(*net, "PT Alpha");
    server = std::make_unique<HttpServer>(*alpha_gw, *net, lock);
    port = server->start("127.0.0.1", 0);
  }
  void TearDown() override { server->stop(); }

  ApiResponse send(const std::string& method, const std::string& target, nlohmann::json body = nullptr) {
    const auto& n = net->org("PT Alpha");
    return http_call("127.0.0.1", port,
                     ApiRequest::make(method, target, std::move(body), n.cert, n.keys,
                                      method == "GET" ? 0 : nonce++));
  }
};

TEST_F(Http, SubmitAndReadBack) {
  auto post = send("POST", "/api/v1/nsfp", {{"tax_year", 2025}, {"count", 3}});
  ASSERT_EQ(post.status, 200) << post.body;
  auto get = send("GET", "/api/v1/nsfp?owner=PT%20Alpha");
  ASSERT_EQ(get.status, 200);
  ASSERT_EQ(get.body.at("allocations").size(), 1u);
  EXPECT_EQ(get.body["allocations"][0].at("serials").size(), 3u);

  auto serial = testing::available_serials(net->org("PT Alpha")).front();
  auto f = testing::simple_faktur(serial, "PT Alpha");
  auto faktur = send("POST", "/api/v1/faktur", f.to_json());
  ASSERT_EQ(faktur.status, 200) << faktur.body;
  auto doc = send("GET", "/api/v1/faktur?render=efaktur&nsfp=" + serial.formatted());
  EXPECT_EQ(doc.status, 200);
  EXPECT_EQ(doc.body.at("verification_hash"), faktur.body.at("faktur_hash"));
}

TEST_F(Http, SignatureIsCheckedOverTheWire) {
  const auto& n = net->org("PT Alpha");
  auto req = ApiRequest::make("POST", "/api/v1/nsfp", {{"tax_year", 2025}, {"count", 1}}, n.cert, n.keys, 9);
  req.body["count"] = 2;
  EXPECT_EQ(http_call("127.0.0.1", port, req).status, 401);
  req.signature.clear();
  EXPECT_EQ(http_call("127.0.0.1", port, req).status, 401);
}

TEST_F(Http, MalformedHeadersAndBodies) {
  httplib::Client c("127.0.0.1", port);
  auto r = c.Post("/api/v1/nsfp", httplib::Headers{{kCertHeader, "x"}, {kNonceHeader, "abc"}}, "{}",
                  "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  r = c.Post("/api/v1/nsfp", httplib::Headers{{kCertHeader, "x"}, {kNonceHeader, "1"}, {kSignatureHeader, "00"}},
             "{not json", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  EXPECT_FALSE(nlohmann::json::parse(r->body, nullptr, false).is_discarded());
}

TEST_F(Http, PreflightAndCors) {
  httplib::Client c("127.0.0.1", port);
  auto r = c.Options("/api/v1/faktur");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 204);
  EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_NE(r->get_header_value("Access-Control-Allow-Headers").find(kSignatureHeader), std::string::npos);
  auto get = c.Get("/api/v1/nsfp");
  ASSERT_TRUE(get);
  EXPECT_EQ(get->status, 401);
  EXPECT_EQ(get->get_header_value("Access-Control-Allow-Origin"), "*");
}

TEST_F(Http, ConcurrentClientsGetDistinctCommits) {
  std::vector<std::thread> clients;
  std::vector<int> status(4);
  for (int i = 0; i < 4; ++i)
    clients.emplace_back([&, i] {
      const auto& n = net->org("PT Alpha");
      auto req = ApiRequest::make("POST", "/api/v1/nsfp", {{"tax_year", 2025}, {"count", 1}}, n.cert, n.keys,
                                  100 + i);
      status[i] = http_call("127.0.0.1", port, req).status;
    });
  for (auto& t : clients) t.join();
  for (int s : status) EXPECT_EQ(s, 200);
  std::lock_guard g(lock);
  EXPECT_EQ(net->org("PT Alpha").state.allocations.size(), 4u);
}

TEST_F(Http, TickerAdvancesIdleNetwork) {
  HttpServer ticking(*alpha_gw, *net, lock);
  ticking.set_tick_interval(std::chrono::milliseconds(2));
  ticking.start("127.0.0.1", 0);
  LogicalTime before;
  {
    std::lock_guard g(lock);
    before = net->now();
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  ticking.stop();
  std::lock_guard g(lock);
  EXPECT_GT(net->now(), before);
}

TEST(HttpCall, UnreachableServer) {
  ApiRequest req;
  req.method = "GET";
  req.target = "/api/v1/nsfp";
  EXPECT_THROW(http_call("127.0.0.1", 1, req), Error);
}

}  // namespace
}  // namespace fakturchain::gateway
