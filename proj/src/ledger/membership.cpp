// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/ledger/membership.hpp"

namespace fakturchain::ledger {

Membership::Membership(Bytes root_key,
                       const std::vector<identity::Certificate>& certs)
    : root_key_(std::move(root_key)) {
  for (const auto& c : certs) certs_.emplace(c.cert_id, c);
}

const identity::Certificate* Membership::find(std::string_view cert_id) const {
  auto it = certs_.find(cert_id);
  return it == certs_.end() ? nullptr : &it->second;
}

const identity::Certificate* Membership::find_subject(
    std::string_view subject, identity::OrgRole role) const {
  for (const auto& [id, c] : certs_) {
    if (c.subject == subject && c.org_role == role) return &c;
  }
  return nullptr;
}

std::vector<identity::Certificate> Membership::certificates() const {
  std::vector<identity::Certificate> out;
  for (const auto& [id, c] : certs_) out.push_back(c);
  return out;
}

identity::AuthzDecision Membership::authenticate(
    const TransactionEnvelope& env, const identity::RevocationList& rl,
    LogicalTime now) const {
  const auto* cert = find(env.creator_cert_id);
  if (cert == nullptr) {
    return identity::AuthzDecision::deny("unknown creator certificate " +
                                         env.creator_cert_id);
  }
  if (env.compute_tx_id() != env.tx_id) {
    return identity::AuthzDecision::deny("tx_id does not match envelope");
  }
  auto sig = identity::verify_signature(*cert, env.signing_bytes(),
                                        env.signature, rl, now, root_key_);
  if (!sig) return sig;
  return identity::authorize(*cert, required_action(env.tx_type));
}

}  // namespace fakturchain::ledger
