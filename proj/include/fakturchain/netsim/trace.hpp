// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakturchain/common/digest.hpp"

namespace fakturchain::netsim {

enum class TraceKind : std::uint8_t {
  Send = 1,
  Deliver,
  Drop,
  Delay,
  Tamper,
  Crash,
  Revive,
  Commit,
  Apply,
  Detect,
  Fault,
  Respond,
  Recover,
};

std::string_view to_string(TraceKind k);

struct TraceEvent {
  std::uint64_t seq = 0;
  LogicalTime tick = 0;
  TraceKind kind = TraceKind::Send;
  std::vector<std::string> subjects;
  std::string detail;
  std::optional<Digest> digest;
  std::uint64_t message_id = 0;  // 0 when not about a message

  nlohmann::json to_json() const;
  static TraceEvent from_json(const nlohmann::json& j);
  bool operator==(const TraceEvent&) const = default;
};

// Append-only, totally ordered by seq (which also orders ticks).
class Trace {
 public:
  std::uint64_t record(LogicalTime tick, TraceKind kind,
                       std::vector<std::string> subjects, std::string detail = {},
                       std::optional<Digest> digest = std::nullopt,
                       std::uint64_t message_id = 0);

  const std::vector<TraceEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  const TraceEvent& at(std::uint64_t seq) const { return events_.at(seq - 1); }
  std::vector<TraceEvent> of_kind(TraceKind kind) const;

  std::string to_jsonl() const;
  void write_jsonl(const std::filesystem::path& path) const;
  static std::vector<TraceEvent> read_jsonl(const std::filesystem::path& path);
  // Digest of the JSONL export.
  Digest fingerprint() const;

 private:
  std::vector<TraceEvent> events_;
};

}  // namespace fakturchain::netsim
