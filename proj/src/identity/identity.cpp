// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/identity/identity.hpp"

#include "fakturchain/common/codec.hpp"
#include "fakturchain/common/digest.hpp"
#include "fakturchain/common/error.hpp"

namespace fakturchain::identity {

using nlohmann::json;

std::string_view to_string(OrgRole role) {
  switch (role) {
    case OrgRole::PKP: return "PKP";
    case OrgRole::DJP: return "DJP";
    case OrgRole::ORDERER: return "ORDERER";
  }
  return "?";
}

std::string_view to_string(Action action) {
  switch (action) {
    case Action::PostNsfp: return "PostNsfp";
    case Action::PostFaktur: return "PostFaktur";
    case Action::GetNsfp: return "GetNsfp";
    case Action::GetFaktur: return "GetFaktur";
    case Action::Revoke: return "Revoke";
    case Action::Admin: return "Admin";
  }
  return "?";
}

OrgRole parse_role(std::string_view s) {
  for (auto r : kAllRoles) {
    if (to_string(r) == s) return r;
  }
  throw Error(Errc::InvalidArgument, "unknown role '" + std::string(s) + "'");
}

namespace {

json signing_json(const Certificate& c) {
  // std::map-backed objects serialise with sorted keys.
  return json{{"cert_id", c.cert_id},
              {"expires_at", c.expires_at},
              {"issued_at", c.issued_at},
              {"org_role", std::string(to_string(c.org_role))},
              {"subject", c.subject},
              {"verification_key", to_hex(c.verification_key)}};
}

}  // namespace

std::string Certificate::signing_text() const { return signing_json(*this).dump(); }

std::string Certificate::canonical_text() const { return to_json().dump(); }

json Certificate::to_json() const {
  auto j = signing_json(*this);
  j["issuer_signature"] = to_hex(issuer_signature);
  return j;
}

Certificate Certificate::from_json(const json& j) {
  try {
    Certificate c;
    c.cert_id = j.at("cert_id").get<std::string>();
    c.subject = j.at("subject").get<std::string>();
    c.org_role = parse_role(j.at("org_role").get<std::string>());
    c.verification_key = from_hex(j.at("verification_key").get<std::string>());
    c.issued_at = j.at("issued_at").get<LogicalTime>();
    c.expires_at = j.at("expires_at").get<LogicalTime>();
    c.issuer_signature = from_hex(j.at("issuer_signature").get<std::string>());
    return c;
  } catch (const json::exception& e) {
    throw Error(Errc::Malformed, std::string("certificate: ") + e.what());
  }
}

bool RevocationList::contains(std::string_view cert_id) const {
  return entries_.find(cert_id) != entries_.end();
}

const RevocationEntry* RevocationList::find(std::string_view cert_id) const {
  auto it = entries_.find(cert_id);
  return it == entries_.end() ? nullptr : &it->second;
}

RevocationList RevocationList::with(RevocationEntry entry) const {
  RevocationList copy = *this;
  copy.add(std::move(entry));
  return copy;
}

void RevocationList::add(RevocationEntry entry) {
  if (contains(entry.cert_id)) {
    throw Error(Errc::AlreadyRevoked, entry.cert_id);
  }
  auto id = entry.cert_id;
  entries_.emplace(std::move(id), std::move(entry));
}

json RevocationList::to_json() const {
  json arr = json::array();
  for (const auto& [id, e] : entries_) {
    arr.push_back(
        json{{"cert_id", id}, {"reason", e.reason}, {"revoked_at", e.revoked_at}});
  }
  return json{{"entries", arr}};
}

std::string RevocationList::canonical_text() const { return to_json().dump(); }

RevocationList RevocationList::from_json(const json& j) {
  RevocationList rl;
  try {
    for (const auto& e : j.at("entries")) {
      rl.add({e.at("cert_id").get<std::string>(),
              e.at("revoked_at").get<LogicalTime>(),
              e.at("reason").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(Errc::Malformed, std::string("revocation list: ") + e.what());
  }
  return rl;
}

CertificateAuthority::CertificateAuthority(std::string name,
                                           crypto::KeyPair root)
    : name_(std::move(name)), root_(std::move(root)) {}

Certificate CertificateAuthority::issue_certificate(std::string_view subject,
                                                    OrgRole role,
                                                    Bytes verification_key,
                                                    Validity validity,
                                                    const RevocationList& rl) {
  if (subject.empty()) {
    throw Error(Errc::InvalidArgument, "empty subject");
  }
  if (validity.until <= validity.from) {
    throw Error(Errc::BadValidity, "expires_at must follow issued_at");
  }
  for (const auto& [id, cert] : issued_) {
    if (cert.subject == subject && cert.org_role == role &&
        !rl.contains(id) && cert.expires_at > validity.from) {
      throw Error(Errc::DuplicateSubjectRole,
                  std::string(subject) + "/" + std::string(to_string(role)) +
                      " already holds " + id);
    }
  }

  Encoder id_src;
  id_src.str(name_).bytes(root_key()).u64(++serial_);
  Certificate cert;
  cert.cert_id = "cert-" + Digest::of(id_src.buffer()).hex().substr(0, 24);
  cert.subject = std::string(subject);
  cert.org_role = role;
  cert.verification_key = std::move(verification_key);
  cert.issued_at = validity.from;
  cert.expires_at = validity.until;
  cert.issuer_signature = root_.sign(as_view(cert.signing_text()));
  issued_.emplace(cert.cert_id, cert);
  return cert;
}

RevocationList CertificateAuthority::revoke(const RevocationList& rl,
                                            std::string_view cert_id,
                                            std::string reason,
                                            LogicalTime now) const {
  if (!issued(cert_id)) {
    throw Error(Errc::UnknownCert, std::string(cert_id));
  }
  return rl.with({std::string(cert_id), now, std::move(reason)});
}

bool CertificateAuthority::issued(std::string_view cert_id) const {
  return issued_.find(cert_id) != issued_.end();
}

const Certificate* CertificateAuthority::find(std::string_view cert_id) const {
  auto it = issued_.find(cert_id);
  return it == issued_.end() ? nullptr : &it->second;
}

std::vector<Certificate> CertificateAuthority::certificates() const {
  std::vector<Certificate> out;
  for (const auto& [id, c] : issued_) out.push_back(c);
  return out;
}

bool verify_certificate(const Certificate& cert, ByteView root_key) {
  if (cert.expires_at <= cert.issued_at) return false;
  return crypto::verify(root_key, as_view(cert.signing_text()),
                        cert.issuer_signature);
}

AuthzDecision verify_signature(const Certificate& cert, ByteView message,
                               ByteView signature, const RevocationList& rl,
                               LogicalTime now, ByteView root_key) {
  if (!verify_certificate(cert, root_key)) {
    return AuthzDecision::deny("certificate not issued by the network root");
  }
  if (const auto* entry = rl.find(cert.cert_id)) {
    return AuthzDecision::deny("certificate revoked at " +
                               std::to_string(entry->revoked_at) + ": " +
                               entry->reason);
  }
  if (now < cert.issued_at || now >= cert.expires_at) {
    return AuthzDecision::deny("certificate expired or not yet valid");
  }
  if (!crypto::verify(cert.verification_key, message, signature)) {
    return AuthzDecision::deny("signature does not verify");
  }
  return AuthzDecision::allow();
}

bool role_allows(OrgRole role, Action action) {
  switch (role) {
    case OrgRole::PKP:
      return action == Action::PostNsfp || action == Action::PostFaktur ||
             action == Action::GetNsfp || action == Action::GetFaktur;
    case OrgRole::DJP:
      return action == Action::GetNsfp || action == Action::GetFaktur ||
             action == Action::Revoke || action == Action::Admin;
    case OrgRole::ORDERER:
      return false;
  }
  return false;
}

AuthzDecision authorize(const Certificate& cert, Action action) {
  if (role_allows(cert.org_role, action)) return AuthzDecision::allow();
  return AuthzDecision::deny("role " + std::string(to_string(cert.org_role)) +
                             " may not perform " +
                             std::string(to_string(action)));
}

}  // namespace fakturchain::identity
