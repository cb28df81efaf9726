// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>

#include "fakturchain/gateway/gateway.hpp"

namespace fakturchain::gateway {

// Request headers carrying the caller's signature.
inline constexpr const char* kCertHeader = "X-Cert-Id";
inline constexpr const char* kNonceHeader = "X-Nonce";
inline constexpr const char* kSignatureHeader = "X-Signature";  // hex

// Serves a Gateway over HTTP/JSON. Every request takes `lock`, which must
// guard the network the gateway runs on, so concurrent clients see a
// consistent committed snapshot and submissions are applied one at a time.
class HttpServer {
 public:
  HttpServer(Gateway& gateway, netsim::Network& net, std::mutex& lock);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds (port 0 picks a free one), serves on a background thread and
  // returns the port. Throws InvalidArgument when binding fails.
  int start(const std::string& host, int port);
  // With a nonzero interval the network also advances one tick per
  // interval while idle, so peers keep syncing between requests.
  void set_tick_interval(std::chrono::milliseconds interval) { tick_ = interval; }
  // Blocks until stop() is called from elsewhere.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::chrono::milliseconds tick_{0};
};

// Sends a signed request and decodes the JSON reply. Throws
// InvalidArgument when the server cannot be reached.
ApiResponse http_call(const std::string& host, int port, const ApiRequest& req);

}  // namespace fakturchain::gateway
