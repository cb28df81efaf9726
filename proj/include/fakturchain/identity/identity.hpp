// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakturchain/common/bytes.hpp"
#include "fakturchain/common/crypto.hpp"

namespace fakturchain::identity {

enum class OrgRole : std::uint8_t { PKP = 1, DJP = 2, ORDERER = 3 };

enum class Action : std::uint8_t {
  PostNsfp = 1,
  PostFaktur,
  GetNsfp,
  GetFaktur,
  Revoke,
  Admin,
};

inline constexpr OrgRole kAllRoles[] = {OrgRole::PKP, OrgRole::DJP,
                                        OrgRole::ORDERER};
inline constexpr Action kAllActions[] = {
    Action::PostNsfp, Action::PostFaktur, Action::GetNsfp,
    Action::GetFaktur, Action::Revoke,    Action::Admin};

std::string_view to_string(OrgRole role);
std::string_view to_string(Action action);
OrgRole parse_role(std::string_view s);  // throws Error(InvalidArgument)

struct Validity {
  LogicalTime from = 0;
  LogicalTime until = 0;
};

// Identity credential binding an organization to a verification key.
// The issuer signature covers the canonical text of every other field.
struct Certificate {
  std::string cert_id;
  std::string subject;
  OrgRole org_role = OrgRole::PKP;
  Bytes verification_key;
  LogicalTime issued_at = 0;
  LogicalTime expires_at = 0;
  Bytes issuer_signature;

  // Canonical sorted-key text of all fields except issuer_signature.
  std::string signing_text() const;
  // Canonical sorted-key text of all fields.
  std::string canonical_text() const;

  nlohmann::json to_json() const;
  static Certificate from_json(const nlohmann::json& j);

  bool operator==(const Certificate&) const = default;
};

struct RevocationEntry {
  std::string cert_id;
  LogicalTime revoked_at = 0;
  std::string reason;

  bool operator==(const RevocationEntry&) const = default;
};

// Append-only set of revoked certificate ids.
class RevocationList {
 public:
  bool contains(std::string_view cert_id) const;
  const RevocationEntry* find(std::string_view cert_id) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, RevocationEntry, std::less<>>& entries() const {
    return entries_;
  }

  // Copy with one more entry. Throws AlreadyRevoked.
  RevocationList with(RevocationEntry entry) const;
  // In-place variant used by the single writer.
  void add(RevocationEntry entry);

  std::string canonical_text() const;
  nlohmann::json to_json() const;
  static RevocationList from_json(const nlohmann::json& j);

  bool operator==(const RevocationList&) const = default;

 private:
  std::map<std::string, RevocationEntry, std::less<>> entries_;
};

struct AuthzDecision {
  bool allowed = false;
  std::string reason;

  static AuthzDecision allow() { return {true, {}}; }
  static AuthzDecision deny(std::string why) { return {false, std::move(why)}; }
  explicit operator bool() const { return allowed; }
};

// The network's single root of trust. Holds the root key and the registry of
// every certificate it has issued.
class CertificateAuthority {
 public:
  CertificateAuthority(std::string name, crypto::KeyPair root);

  const std::string& name() const { return name_; }
  const Bytes& root_key() const { return root_.public_key(); }

  // Throws BadValidity, InvalidArgument (empty subject) or
  // DuplicateSubjectRole when an unrevoked certificate for the same
  // (subject, role) is still valid at validity.from.
  Certificate issue_certificate(std::string_view subject, OrgRole role,
                                Bytes verification_key, Validity validity,
                                const RevocationList& rl);

  // Throws UnknownCert or AlreadyRevoked.
  RevocationList revoke(const RevocationList& rl, std::string_view cert_id,
                        std::string reason, LogicalTime now) const;

  bool issued(std::string_view cert_id) const;
  const Certificate* find(std::string_view cert_id) const;
  std::vector<Certificate> certificates() const;

 private:
  std::string name_;
  crypto::KeyPair root_;
  std::uint64_t serial_ = 0;
  std::map<std::string, Certificate, std::less<>> issued_;
};

bool verify_certificate(const Certificate& cert, ByteView root_key);

AuthzDecision verify_signature(const Certificate& cert, ByteView message,
                               ByteView signature, const RevocationList& rl,
                               LogicalTime now, ByteView root_key);

// Role/action matrix: PKP writes and reads application assets, DJP reads and
// administers, orderers hold no application rights.
AuthzDecision authorize(const Certificate& cert, Action action);
bool role_allows(OrgRole role, Action action);

}  // namespace fakturchain::identity
