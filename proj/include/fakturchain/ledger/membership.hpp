// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fakturchain/identity/identity.hpp"
#include "fakturchain/ledger/envelope.hpp"

namespace fakturchain::ledger {

// Read-only directory of the network's certificates plus the root key they
// chain to. Every node holds an identical copy from genesis.
class Membership {
 public:
  Membership() = default;
  Membership(Bytes root_key, const std::vector<identity::Certificate>& certs);

  const Bytes& root_key() const { return root_key_; }
  const identity::Certificate* find(std::string_view cert_id) const;
  // First certificate for (subject, role), if any.
  const identity::Certificate* find_subject(std::string_view subject,
                                            identity::OrgRole role) const;
  std::vector<identity::Certificate> certificates() const;

  // Signature, certificate chain, revocation, expiry, tx_id integrity and
  // role authorization for the envelope's type.
  identity::AuthzDecision authenticate(const TransactionEnvelope& env,
                                       const identity::RevocationList& rl,
                                       LogicalTime now) const;

 private:
  Bytes root_key_;
  std::map<std::string, identity::Certificate, std::less<>> certs_;
};

}  // namespace fakturchain::ledger
