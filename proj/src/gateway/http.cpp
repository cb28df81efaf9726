// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/gateway/http.hpp"

#include <atomic>
#include <thread>

#include <httplib.h>

#include "fakturchain/common/error.hpp"

namespace fakturchain::gateway {

namespace {

void write_response(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  res.set_header("Access-Control-Allow-Origin", "*");
  res.set_content(api.body.dump(), "application/json");
}

ApiResponse bad_request(std::string detail) {
  return {400, {{"error", "InvalidArgument"}, {"detail", std::move(detail)}}};
}

}  // namespace

struct HttpServer::Impl {
  Gateway& gateway;
  netsim::Network& net;
  std::mutex& lock;
  httplib::Server server;
  std::thread listener;
  std::thread ticker;
  std::atomic<bool> running{false};

  Impl(Gateway& g, netsim::Network& n, std::mutex& l) : gateway(g), net(n), lock(l) {}

  void serve(const httplib::Request& req, httplib::Response& res) {
    if (req.method == "OPTIONS") {
      res.status = 204;
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
      res.set_header("Access-Control-Allow-Headers",
                     std::string("Content-Type, ") + kCertHeader + ", " + kNonceHeader + ", " +
                         kSignatureHeader);
      return;
    }
    ApiRequest api;
    api.method = req.method;
    api.target = req.target.empty() ? req.path : req.target;
    api.cert_id = req.get_header_value(kCertHeader);
    try {
      auto nonce = req.get_header_value(kNonceHeader);
      api.nonce = nonce.empty() ? 0 : std::stoull(nonce);
      api.signature = from_hex(req.get_header_value(kSignatureHeader));
      api.body = req.body.empty() ? nlohmann::json() : nlohmann::json::parse(req.body);
    } catch (const std::exception& e) {
      write_response(res, bad_request(std::string("bad request: ") + e.what()));
      return;
    }
    std::lock_guard guard(lock);
    write_response(res, gateway.handle(api));
  }
};

HttpServer::HttpServer(Gateway& gateway, netsim::Network& net, std::mutex& lock)
    : impl_(std::make_unique<Impl>(gateway, net, lock)) {
  // Real method handlers rather than a pre-routing hook: httplib reads the
  // request body only once a route has matched.
  auto handler = [this](const httplib::Request& req, httplib::Response& res) { impl_->serve(req, res); };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  impl_->server.Put(".*", handler);
  impl_->server.Delete(".*", handler);
  impl_->server.Patch(".*", handler);
  impl_->server.Options(".*", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error(Errc::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
  impl_->running = true;
  impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  if (tick_.count() > 0) {
    impl_->ticker = std::thread([this] {
      while (impl_->running) {
        std::this_thread::sleep_for(tick_);
        std::lock_guard guard(impl_->lock);
        if (impl_->net.now() + 1 < impl_->net.config().tick_limit) impl_->net.step();
      }
    });
  }
  return bound;
}

void HttpServer::wait() {
  if (impl_->listener.joinable()) impl_->listener.join();
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->running = false;
  impl_->server.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
  if (impl_->ticker.joinable()) impl_->ticker.join();
}

ApiResponse http_call(const std::string& host, int port, const ApiRequest& req) {
  httplib::Client client(host, port);
  client.set_read_timeout(120, 0);
  httplib::Headers headers{{kCertHeader, req.cert_id},
                           {kNonceHeader, std::to_string(req.nonce)},
                           {kSignatureHeader, to_hex(req.signature)}};
  std::string body = req.body.is_null() ? std::string{} : req.body.dump();
  httplib::Result result;
  if (req.method == "GET") {
    result = client.Get(req.target, headers);
  } else if (req.method == "POST") {
    result = client.Post(req.target, headers, body, "application/json");
  } else if (req.method == "PUT") {
    result = client.Put(req.target, headers, body, "application/json");
  } else {
    throw Error(Errc::InvalidArgument, "unsupported method " + req.method);
  }
  if (!result)
    throw Error(Errc::InvalidArgument, "request failed: " + httplib::to_string(result.error()));
  ApiResponse resp;
  resp.status = result->status;
  resp.body = result->body.empty() ? nlohmann::json::object()
                                   : nlohmann::json::parse(result->body, nullptr, false);
  if (resp.body.is_discarded()) resp.body = {{"error", "bad-response"}, {"detail", result->body}};
  return resp;
}

}  // namespace fakturchain::gateway
