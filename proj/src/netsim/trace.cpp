// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/netsim/trace.hpp"

#include <fstream>

#include "fakturchain/common/error.hpp"

namespace fakturchain::netsim {

namespace {

constexpr std::pair<TraceKind, std::string_view> kNames[] = {
    {TraceKind::Send, "send"},       {TraceKind::Deliver, "deliver"},
    {TraceKind::Drop, "drop"},       {TraceKind::Delay, "delay"},
    {TraceKind::Tamper, "tamper"},   {TraceKind::Crash, "crash"},
    {TraceKind::Revive, "revive"},   {TraceKind::Commit, "commit"},
    {TraceKind::Apply, "apply"},     {TraceKind::Detect, "detect"},
    {TraceKind::Fault, "fault"},     {TraceKind::Respond, "respond"},
    {TraceKind::Recover, "recover"},
};

TraceKind parse_kind(std::string_view s) {
  for (const auto& [k, n] : kNames)
    if (n == s) return k;
  throw Error(Errc::Malformed, "unknown trace kind '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(TraceKind k) {
  for (const auto& [kind, name] : kNames)
    if (kind == k) return name;
  return "?";
}

nlohmann::json TraceEvent::to_json() const {
  nlohmann::json j{{"seq", seq}, {"tick", tick}, {"kind", to_string(kind)}, {"subjects", subjects}};
  if (!detail.empty()) j["detail"] = detail;
  if (digest) j["digest"] = digest->hex();
  if (message_id) j["msg"] = message_id;
  return j;
}

TraceEvent TraceEvent::from_json(const nlohmann::json& j) {
  try {
    TraceEvent e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.tick = j.at("tick").get<LogicalTime>();
    e.kind = parse_kind(j.at("kind").get<std::string>());
    e.subjects = j.at("subjects").get<std::vector<std::string>>();
    e.detail = j.value("detail", "");
    if (j.contains("digest")) e.digest = Digest::from_hex(j.at("digest").get<std::string>());
    e.message_id = j.value("msg", std::uint64_t{0});
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::Malformed, std::string("trace event: ") + ex.what());
  }
}

std::uint64_t Trace::record(LogicalTime tick, TraceKind kind,
                            std::vector<std::string> subjects, std::string detail,
                            std::optional<Digest> digest, std::uint64_t message_id) {
  TraceEvent e;
  e.seq = events_.size() + 1;
  e.tick = tick;
  e.kind = kind;
  e.subjects = std::move(subjects);
  e.detail = std::move(detail);
  e.digest = digest;
  e.message_id = message_id;
  events_.push_back(std::move(e));
  return events_.back().seq;
}

std::vector<TraceEvent> Trace::of_kind(TraceKind kind) const {
  std::vector<TraceEvent> out;
  for (const auto& e : events_)
    if (e.kind == kind) out.push_back(e);
  return out;
}

std::string Trace::to_jsonl() const {
  std::string out;
  for (const auto& e : events_) {
    out += e.to_json().dump();
    out += '\n';
  }
  return out;
}

void Trace::write_jsonl(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
  for (const auto& e : events_) f << e.to_json().dump() << '\n';
}

std::vector<TraceEvent> Trace::read_jsonl(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::NotFound, path.string());
  std::vector<TraceEvent> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(TraceEvent::from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(Errc::Malformed, ex.what());
    }
  }
  return out;
}

Digest Trace::fingerprint() const { return Digest::of(to_jsonl()); }

}  // namespace fakturchain::netsim
