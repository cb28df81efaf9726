// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/gateway/gateway.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <sstream>

#include "fakturchain/common/error.hpp"
#include "fakturchain/dataplane/dataplane.hpp"
#include "fakturchain/scenarios/scenarios.hpp"

namespace fakturchain::gateway {

namespace {

namespace cc = chaincode;
using json = nlohmann::json;
using ledger::TxType;

ApiResponse reply(int status, json body = json::object()) {
  return ApiResponse{status, std::move(body)};
}

ApiResponse fail(int status, std::string error, std::string detail,
                 std::vector<std::string> reasons = {}) {
  json body{{"error", std::move(error)}, {"detail", std::move(detail)}};
  if (!reasons.empty()) body["reasons"] = std::move(reasons);
  return reply(status, std::move(body));
}

int status_for(Errc code) {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::Malformed:
    case Errc::BadSequence:
    case Errc::BadCount:
    case Errc::BadYear:
    case Errc::BadConfig:
      return 400;
    case Errc::UnknownCert:
    case Errc::AuthFailure:
      return 401;
    case Errc::Forbidden:
      return 403;
    case Errc::NotFound:
    case Errc::NotCommitted:
      return 404;
    case Errc::AlreadyRevoked:
    case Errc::IntegrityFailure:
    case Errc::NotEligible:
      return 409;
    default:
      return 500;
  }
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string url_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && hex_value(s[i + 1]) >= 0 && hex_value(s[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2]));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

bool sees_everything(const identity::Certificate& caller) {
  return caller.org_role == identity::OrgRole::DJP;
}

bool can_see(const identity::Certificate& caller, const ledger::Visibility& v) {
  return !v.is_private() || sees_everything(caller) || v.includes(caller.subject);
}

const std::string* query_value(const std::map<std::string, std::string>& q,
                               const std::string& key) {
  auto it = q.find(key);
  return it == q.end() ? nullptr : &it->second;
}

json event_data(const netsim::OrgNode& node, const ledger::TransactionEnvelope& tx,
                const std::map<Digest, cc::NsfpSerial>& faktur_by_tx, bool accepted) {
  if (!accepted) return json::object();
  try {
    switch (tx.tx_type) {
      case TxType::PostNsfp:
        for (const auto& [id, alloc] : node.state.allocations) {
          if (alloc.issued_tx_id != tx.tx_id) continue;
          json serials = json::array();
          for (const auto& s : alloc.serials) serials.push_back(s.formatted());
          return {{"allocation_id", alloc.allocation_id},
                  {"owner_org", alloc.owner_org},
                  {"tax_year", alloc.tax_year},
                  {"serials", serials}};
        }
        return json::object();
      case TxType::PostFaktur: {
        auto it = faktur_by_tx.find(tx.tx_id);
        if (it == faktur_by_tx.end()) return json::object();
        const auto& e = node.state.faktur_index.at(it->second);
        return {{"nsfp", it->second.formatted()},
                {"faktur_hash", e.faktur_hash.hex()},
                {"seller_org", e.seller_org},
                {"receiver_org", e.receiver_org}};
      }
      case TxType::RevokeCert: {
        auto args = cc::RevokeArgs::decode(tx.args);
        return {{"cert_id", args.cert_id},
                {"reason", args.reason},
                {"revoke_serials", args.revoke_serials}};
      }
      case TxType::ScenarioEvent:
        return cc::ScenarioEventArgs::decode(tx.args).to_json();
    }
  } catch (const Error&) {
  }
  return json::object();
}

std::string event_kind(TxType t, bool accepted) {
  if (!accepted) return "tx-rejected";
  switch (t) {
    case TxType::PostNsfp: return "nsfp-issued";
    case TxType::PostFaktur: return "faktur-anchored";
    case TxType::RevokeCert: return "cert-revoked";
    case TxType::ScenarioEvent: return "audit-event";
  }
  return "unknown";
}

}  // namespace

// ---------------------------------------------------------------- wire types

Bytes ApiRequest::signing_bytes() const {
  std::string text = method + "\n" + target + "\n" + std::to_string(nonce) + "\n" +
                     (body.is_null() ? std::string{} : body.dump());
  return to_bytes(text);
}

ApiRequest ApiRequest::make(std::string method, std::string target, json body,
                            const identity::Certificate& caller, const crypto::KeyPair& keys,
                            std::uint64_t nonce) {
  ApiRequest r{std::move(method), std::move(target), caller.cert_id, nonce, {}, std::move(body)};
  r.signature = keys.sign(r.signing_bytes());
  return r;
}

std::vector<std::string> ApiResponse::reasons() const {
  if (!body.contains("reasons")) return {};
  return body.at("reasons").get<std::vector<std::string>>();
}

bool OrgProfile::valid_tax_id(std::string_view id) {
  return (id.size() == 15 || id.size() == 16) &&
         std::all_of(id.begin(), id.end(), [](char c) { return c >= '0' && c <= '9'; });
}

json OrgProfile::to_json() const {
  return {{"display_name", display_name},
          {"address", address},
          {"tax_id", tax_id},
          {"endpoint", endpoint}};
}

OrgProfile OrgProfile::from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidArgument, "profile must be an object");
  OrgProfile p;
  try {
    p.display_name = j.value("display_name", std::string{});
    p.address = j.value("address", std::string{});
    p.tax_id = j.value("tax_id", std::string{});
    p.endpoint = j.value("endpoint", std::string{});
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("profile: ") + e.what());
  }
  if (!valid_tax_id(p.tax_id))
    throw Error(Errc::InvalidArgument, "tax id must be 15 or 16 digits");
  return p;
}

json EventRecord::to_json() const {
  return {{"sequence", sequence},
          {"class_sequence", class_sequence},
          {"block_number", block_number},
          {"index", index},
          {"tx_id", tx_id.hex()},
          {"kind", kind},
          {"tx_type", ledger::to_string(tx_type)},
          {"visibility", visibility.to_json()},
          {"accepted", accepted},
          {"reasons", reasons},
          {"data", data}};
}

std::pair<std::string, std::map<std::string, std::string>> parse_target(std::string_view target) {
  std::map<std::string, std::string> query;
  auto q = target.find('?');
  std::string path(target.substr(0, q));
  if (q == std::string_view::npos) return {path, query};
  std::string_view rest = target.substr(q + 1);
  while (!rest.empty()) {
    auto amp = rest.find('&');
    auto part = rest.substr(0, amp);
    auto eq = part.find('=');
    if (!part.empty()) {
      if (eq == std::string_view::npos)
        query[url_decode(part)] = "";
      else
        query[url_decode(part.substr(0, eq))] = url_decode(part.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    rest = rest.substr(amp + 1);
  }
  return {path, query};
}

// ---------------------------------------------------------------- events

std::vector<EventRecord> subscribe_events(const netsim::OrgNode& node,
                                          const identity::Certificate& caller,
                                          std::int64_t from) {
  if (from < 0) throw Error(Errc::BadSequence, "from must be >= 0");
  std::map<Digest, cc::NsfpSerial> faktur_by_tx;
  for (const auto& [serial, e] : node.state.faktur_index) faktur_by_tx.emplace(e.tx_id, serial);

  std::vector<EventRecord> out;
  std::uint64_t global = 0;
  std::uint64_t mine = 0;
  for (const auto& block : node.chain.blocks()) {
    for (std::uint32_t i = 0; i < block.txs.size(); ++i) {
      const auto& tx = block.txs[i];
      auto res = node.state.tx_results.find(tx.tx_id);
      // A re-ordered duplicate keeps its first position only.
      if (res == node.state.tx_results.end() || res->second.block_number != block.number ||
          res->second.index != i)
        continue;
      ++global;
      if (!can_see(caller, tx.visibility)) continue;
      ++mine;
      if (mine <= static_cast<std::uint64_t>(from)) continue;
      EventRecord ev;
      ev.sequence = global;
      ev.class_sequence = mine;
      ev.block_number = block.number;
      ev.index = i;
      ev.tx_id = tx.tx_id;
      ev.tx_type = tx.tx_type;
      ev.visibility = tx.visibility;
      ev.accepted = res->second.accepted;
      ev.reasons = res->second.reasons;
      ev.kind = event_kind(tx.tx_type, ev.accepted);
      ev.data = event_data(node, tx, faktur_by_tx, ev.accepted);
      out.push_back(std::move(ev));
    }
  }
  return out;
}

// ---------------------------------------------------------------- e-Faktur

json EfakturDocument::to_json() const {
  json j{{"faktur", faktur.to_json()},
         {"seller_org", faktur.seller_org},
         {"seller_cert_id", seller_cert_id},
         {"nsfp", faktur.nsfp.formatted()},
         {"verification_hash", verification_hash.hex()},
         {"block_number", block_number},
         {"tx_id", tx_id.hex()}};
  if (seller_profile) j["seller_profile"] = seller_profile->to_json();
  return j;
}

std::string EfakturDocument::render_text() const {
  std::ostringstream out;
  out << "FAKTUR PAJAK\n";
  out << "Kode dan Nomor Seri Faktur Pajak: " << faktur.nsfp.formatted() << "\n\n";
  out << "Pengusaha Kena Pajak\n";
  out << "  Nama   : "
      << (seller_profile && !seller_profile->display_name.empty() ? seller_profile->display_name
                                                                  : faktur.seller_org)
      << "\n";
  if (seller_profile) {
    out << "  Alamat : " << seller_profile->address << "\n";
    out << "  NPWP   : " << seller_profile->tax_id << "\n";
  }
  out << "\nPembeli\n  NPWP   : " << faktur.buyer_tax_id << "\n";
  out << "\nTanggal: " << faktur.transaction_date.to_string() << "\n\n";
  int n = 0;
  for (const auto& item : faktur.line_items) {
    out << "  " << ++n << ". " << item.description << "  " << item.quantity.to_string() << " x "
        << item.unit_price << "\n";
  }
  out << "\nDasar Pengenaan Pajak : " << faktur.tax_base << "\n";
  out << "PPN                   : " << faktur.vat_amount << "\n\n";
  out << "Verification hash: " << verification_hash.hex() << "\n";
  out << "Block " << block_number << ", tx " << tx_id.hex() << "\n";
  return out.str();
}

EfakturDocument render_efaktur(const netsim::OrgNode& node, const identity::Certificate& caller,
                               const cc::NsfpSerial& nsfp, const OrgProfile* seller_profile) {
  auto it = node.state.faktur_index.find(nsfp);
  if (it == node.state.faktur_index.end())
    throw Error(Errc::NotCommitted, "no accepted faktur for " + nsfp.formatted());
  const auto& entry = it->second;
  if (!sees_everything(caller) && caller.subject != entry.seller_org)
    throw Error(Errc::Forbidden, "only the seller and the authority may render this faktur");
  auto payload = node.store.read_verified(entry.faktur_hash);
  if (!payload)
    throw Error(Errc::IntegrityFailure, "private copy of " + nsfp.formatted() +
                                            " is missing or damaged at " + node.org);
  if (!dataplane::verify_against_chain(*payload, node.chain, entry.tx_id))
    throw Error(Errc::IntegrityFailure, "private copy does not match the chain");

  EfakturDocument doc;
  doc.faktur = cc::Faktur::decode_body(*payload);
  doc.verification_hash = entry.faktur_hash;
  doc.block_number = entry.block_number;
  doc.tx_id = entry.tx_id;
  doc.payload = std::move(*payload);
  if (const auto* tx = node.chain.find_tx(entry.tx_id)) doc.seller_cert_id = tx->creator_cert_id;
  if (seller_profile) doc.seller_profile = *seller_profile;
  return doc;
}

// ---------------------------------------------------------------- gateway

Gateway::Gateway(netsim::Network& net, std::string org) : net_(net), org_(std::move(org)) {
  net_.org(org_);  // throws NotFound early
  profile_.display_name = org_;
}

netsim::OrgNode& Gateway::node() { return net_.org(org_); }

ApiResponse Gateway::handle(const ApiRequest& req) {
  ApiResponse resp;
  try {
    const auto* cert = net_.membership().find(req.cert_id);
    if (!cert) {
      resp = fail(401, "unauthenticated", "unknown certificate " + req.cert_id);
    } else if (auto ok = identity::verify_signature(*cert, req.signing_bytes(), req.signature,
                                                    node().state.cert_revocations, net_.now(),
                                                    net_.membership().root_key());
               !ok) {
      resp = fail(401, "unauthenticated", ok.reason);
    } else {
      resp = req.mutating() ? mutate(req, Caller{cert}) : route(req, Caller{cert});
    }
  } catch (const Error& e) {
    resp = fail(status_for(e.code()), std::string(to_string(e.code())), e.what());
  } catch (const json::exception& e) {
    resp = fail(400, "InvalidArgument", e.what());
  }
  resp.body["committed_height"] = node().chain.height();
  return resp;
}

ApiResponse Gateway::mutate(const ApiRequest& req, const Caller& caller) {
  if (req.nonce & netsim::kInternalNonceBit)
    return fail(400, "InvalidArgument", "nonce must be below 2^63");

  auto key = std::make_pair(req.cert_id, req.nonce);
  Digest digest = Digest::of(req.signing_bytes());
  auto it = slots_.find(key);
  if (it != slots_.end()) {
    if (it->second.request_digest != digest)
      return fail(409, "rejected", "nonce already used for a different request",
                  {std::string(cc::reason::kReplay)});
    if (it->second.response) return *it->second.response;
    if (it->second.op_id) {
      auto resp = await_op(*it->second.op_id);
      if (resp.status != 503) it->second.response = resp;
      return resp;
    }
  }
  const auto& used = node().state.used_nonces;
  if (auto u = used.find(req.cert_id); u != used.end() && u->second.contains(req.nonce))
    return fail(409, "rejected", "nonce already committed", {std::string(cc::reason::kReplay)});

  auto& slot = slots_[key];
  slot.request_digest = digest;
  auto before = node().next_op;
  ApiResponse resp = route(req, caller);
  if (node().next_op != before) slot.op_id = before;
  if (resp.status != 503 || !slot.op_id) slot.response = resp;
  return resp;
}

ApiResponse Gateway::route(const ApiRequest& req, const Caller& caller) {
  auto [path, query] = parse_target(req.target);
  const std::string prefix = "/api/v1/";
  if (path.rfind(prefix, 0) != 0) return fail(404, "NotFound", "no route " + path);
  std::string rest = path.substr(prefix.size());
  const auto& m = req.method;

  if (rest == "nsfp") {
    if (m == "POST") return post_nsfp(req, caller);
    if (m == "GET") return get_nsfp(query, caller);
  } else if (rest == "faktur") {
    if (m == "POST") return post_faktur(req, caller);
    if (m == "GET") return get_faktur(query, caller);
  } else if (rest.rfind("blocks/", 0) == 0) {
    if (m == "GET") return get_block(std::string_view(rest).substr(7), caller);
  } else if (rest == "events") {
    if (m == "GET") return get_events(query, caller);
  } else if (rest == "profile") {
    if (m == "PUT") return put_profile(req, caller);
  } else if (rest == "admin/revoke") {
    if (m == "POST") return admin_revoke(req, caller);
  } else if (rest.rfind("scenario/", 0) == 0) {
    if (m == "POST") return run_scenario(std::string_view(rest).substr(9), req, caller);
  } else {
    return fail(404, "NotFound", "no route " + path);
  }
  return fail(405, "MethodNotAllowed", m + " " + path);
}

ApiResponse Gateway::await_op(std::uint64_t op_id) {
  const auto& op = net_.await(org_, op_id, op_budget);
  json body = op.to_json();
  if (op.envelope) body["tx_id"] = op.envelope->tx_id.hex();
  switch (op.state) {
    case netsim::OpState::Committed: {
      body["status"] = "committed";
      if (op.kind == netsim::OpKind::PostNsfp) {
        for (const auto& [id, alloc] : node().state.allocations)
          if (alloc.issued_tx_id == op.envelope->tx_id) body["allocation"] = alloc.to_json();
      } else if (op.kind == netsim::OpKind::PostFaktur) {
        body["faktur_hash"] = op.exchange->payload_hash.hex();
        body["nsfp"] = op.faktur->nsfp.formatted();
      }
      return reply(200, std::move(body));
    }
    case netsim::OpState::Rejected:
    case netsim::OpState::Failed: {
      int status = 409;
      std::string error = "rejected";
      switch (op.failure) {
        case netsim::OpFailure::Auth: status = 401; error = "unauthenticated"; break;
        case netsim::OpFailure::Unavailable: status = 503; error = "unavailable"; break;
        case netsim::OpFailure::Integrity:
          body["reasons"] = std::vector<std::string>{"transport-integrity"};
          break;
        default: break;
      }
      body["error"] = error;
      return reply(status, std::move(body));
    }
    default:
      body["error"] = "unavailable";
      body["detail"] = "transaction still pending after the retry budget";
      return reply(503, std::move(body));
  }
}

ApiResponse Gateway::post_nsfp(const ApiRequest& req, const Caller& caller) {
  if (auto d = identity::authorize(*caller.cert, identity::Action::PostNsfp); !d)
    return fail(403, "Forbidden", d.reason);
  if (caller.cert->subject != org_)
    return fail(403, "Forbidden", "this gateway submits for " + org_ + " only");
  const auto& b = req.body;
  if (!b.is_object() || !b.contains("tax_year") || !b.contains("count"))
    return fail(400, "InvalidArgument", "body needs tax_year and count");
  auto year = b.at("tax_year").get<int>();
  auto count = b.at("count").get<std::int64_t>();
  if (count <= 0 || count > std::numeric_limits<std::uint32_t>::max())
    return fail(400, "BadCount", "count out of range", {std::string(cc::reason::kBadCount)});
  auto id = net_.post_nsfp(org_, year, static_cast<std::uint32_t>(count), req.nonce);
  return await_op(id);
}

ApiResponse Gateway::get_nsfp(const std::map<std::string, std::string>& query,
                              const Caller& caller) {
  cc::NsfpFilter filter;
  if (const auto* v = query_value(query, "owner")) filter.owner = *v;
  if (const auto* v = query_value(query, "tax_year")) {
    auto y = parse_u64(*v);
    if (!y) return fail(400, "InvalidArgument", "tax_year must be an integer");
    filter.tax_year = static_cast<int>(*y);
  }
  if (const auto* v = query_value(query, "status")) filter.status = cc::parse_serial_status(*v);
  auto allocations = cc::get_nsfp(node().state, *caller.cert, filter);
  json arr = json::array();
  for (const auto& a : allocations) arr.push_back(a.to_json());
  return reply(200, {{"allocations", arr}});
}

ApiResponse Gateway::post_faktur(const ApiRequest& req, const Caller& caller) {
  if (auto d = identity::authorize(*caller.cert, identity::Action::PostFaktur); !d)
    return fail(403, "Forbidden", d.reason);
  if (caller.cert->subject != org_)
    return fail(403, "Forbidden", "this gateway submits for " + org_ + " only");
  if (!req.body.is_object()) return fail(400, "InvalidArgument", "body must be a faktur object");
  auto faktur = cc::Faktur::from_json(req.body);
  if (faktur.seller_org.empty()) faktur.seller_org = org_;
  Digest claimed = faktur.faktur_hash;
  faktur.seal();
  if (!claimed.is_zero() && claimed != faktur.faktur_hash)
    return fail(409, "rejected", "faktur_hash does not match the body",
                {std::string(cc::reason::kHashMismatch)});
  auto id = net_.post_faktur(org_, std::move(faktur), req.nonce);
  return await_op(id);
}

ApiResponse Gateway::get_faktur(const std::map<std::string, std::string>& query,
                                const Caller& caller) {
  cc::FakturFilter filter;
  if (const auto* v = query_value(query, "nsfp")) filter.nsfp = cc::NsfpSerial::parse(*v);
  if (const auto* v = query_value(query, "seller")) filter.seller = *v;

  if (const auto* r = query_value(query, "render"); r && *r == "efaktur") {
    if (!filter.nsfp) return fail(400, "InvalidArgument", "render needs nsfp");
    if (auto d = identity::authorize(*caller.cert, identity::Action::GetFaktur); !d)
      return fail(403, "Forbidden", d.reason);
    const OrgProfile* profile = nullptr;
    auto entry = node().state.faktur_index.find(*filter.nsfp);
    if (entry != node().state.faktur_index.end() && entry->second.seller_org == org_)
      profile = &profile_;
    auto doc = render_efaktur(node(), *caller.cert, *filter.nsfp, profile);
    json body = doc.to_json();
    body["text"] = doc.render_text();
    return reply(200, std::move(body));
  }

  const auto& store = node().store;
  auto views = cc::get_faktur(node().state, *caller.cert, filter,
                              [&](const Digest& h) { return store.read_verified(h); });
  json arr = json::array();
  for (const auto& v : views) {
    json item{{"nsfp", v.nsfp.formatted()},
              {"faktur_hash", v.entry.faktur_hash.hex()},
              {"seller_org", v.entry.seller_org},
              {"receiver_org", v.entry.receiver_org},
              {"tx_id", v.entry.tx_id.hex()},
              {"block_number", v.entry.block_number}};
    if (v.payload) {
      try {
        item["faktur"] = cc::Faktur::decode_body(*v.payload).to_json();
      } catch (const Error&) {
        item["payload_error"] = "undecodable";
      }
    }
    arr.push_back(std::move(item));
  }
  return reply(200, {{"fakturs", arr}});
}

ApiResponse Gateway::get_block(std::string_view number, const Caller& caller) {
  auto n = parse_u64(number);
  if (!n) return fail(400, "InvalidArgument", "block number must be an integer");
  const auto& chain = node().chain;
  if (*n > chain.height()) return fail(404, "NotFound", "no block " + std::string(number));
  const auto& b = chain.at(*n);
  json txs = json::array();
  for (const auto& tx : b.txs) {
    json t;
    if (can_see(*caller.cert, tx.visibility)) {
      t = tx.summary_json();
      if (auto r = node().state.tx_results.find(tx.tx_id); r != node().state.tx_results.end()) {
        t["accepted"] = r->second.accepted;
        t["reasons"] = r->second.reasons;
      }
    } else {
      t = {{"tx_id", tx.tx_id.hex()}, {"redacted", true}};
    }
    txs.push_back(std::move(t));
  }
  return reply(200, {{"number", b.number},
                     {"prev_hash", b.prev_hash.hex()},
                     {"data_hash", b.data_hash.hex()},
                     {"block_hash", b.block_hash.hex()},
                     {"committed_term", b.committed_term},
                     {"committed_at", b.committed_at},
                     {"txs", txs}});
}

ApiResponse Gateway::get_events(const std::map<std::string, std::string>& query,
                                const Caller& caller) {
  std::int64_t from = 0;
  if (const auto* v = query_value(query, "from")) {
    std::int64_t parsed = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), parsed);
    if (ec != std::errc{} || p != v->data() + v->size() || v->empty())
      throw Error(Errc::BadSequence, "from must be an integer");
    from = parsed;
  }
  std::size_t limit = 0;
  if (const auto* v = query_value(query, "limit")) {
    auto l = parse_u64(*v);
    if (!l) return fail(400, "InvalidArgument", "limit must be an integer");
    limit = *l;
  }
  auto events = subscribe_events(node(), *caller.cert, from);
  if (limit && events.size() > limit) events.resize(limit);
  json arr = json::array();
  for (const auto& e : events) arr.push_back(e.to_json());
  std::uint64_t next = events.empty() ? static_cast<std::uint64_t>(from)
                                      : events.back().class_sequence;
  return reply(200, {{"events", arr}, {"next", next}});
}

ApiResponse Gateway::put_profile(const ApiRequest& req, const Caller& caller) {
  if (caller.cert->subject != org_)
    return fail(403, "Forbidden", "only " + org_ + " may change its profile");
  profile_ = OrgProfile::from_json(req.body);
  return reply(200, {{"profile", profile_.to_json()}});
}

ApiResponse Gateway::admin_revoke(const ApiRequest& req, const Caller& caller) {
  if (auto d = identity::authorize(*caller.cert, identity::Action::Revoke); !d)
    return fail(403, "Forbidden", d.reason);
  if (caller.cert->subject != org_)
    return fail(403, "Forbidden", "this gateway submits for " + org_ + " only");
  const auto& b = req.body;
  if (!b.is_object() || !b.contains("cert_id"))
    return fail(400, "InvalidArgument", "body needs cert_id");
  auto cert_id = b.at("cert_id").get<std::string>();
  if (!net_.membership().find(cert_id))
    return fail(404, "NotFound", "unknown certificate " + cert_id,
                {std::string(cc::reason::kUnknownCert)});
  if (node().state.cert_revocations.contains(cert_id))
    return fail(409, "rejected", cert_id + " is already revoked",
                {std::string(cc::reason::kAlreadyRevoked)});
  auto id = net_.revoke_cert(org_, cert_id, b.value("reason", std::string("revoked by DJP")),
                             b.value("revoke_serials", false), req.nonce);
  return await_op(id);
}

ApiResponse Gateway::run_scenario(std::string_view name, const ApiRequest& req,
                                  const Caller& caller) {
  if (auto d = identity::authorize(*caller.cert, identity::Action::Admin); !d)
    return fail(403, "Forbidden", d.reason);
  auto kind = scenarios::parse_scenario(name);
  auto opts = scenarios::ScenarioOptions::from_json(req.body.is_null() ? json::object() : req.body);
  // Attacks run against a fresh copy of this deployment, never the live one.
  auto config = net_.config();
  config.faults.clear();
  if (req.body.is_object() && req.body.contains("seed")) config.seed = req.body.at("seed").get<std::uint64_t>();
  auto report = scenarios::run_fresh(kind, config, opts);
  json body = report.to_json();
  body["passed"] = report.passed();
  return reply(200, std::move(body));
}

}  // namespace fakturchain::gateway
