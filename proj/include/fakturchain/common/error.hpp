// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fakturchain {

enum class Errc {
  InvalidArgument,
  Malformed,
  NotFound,
  // identity
  DuplicateSubjectRole,
  UnknownCert,
  AlreadyRevoked,
  BadValidity,
  // ledger
  UnauthorizedTx,
  EmptyBatch,
  // consensus
  NotLeader,
  // chaincode
  NotEligible,
  BadCount,
  BadYear,
  Overflow,
  Forbidden,
  // dataplane
  EmptyPayload,
  IntegrityFailure,
  AuthFailure,
  DecryptFailure,
  MalformedBackup,
  // netsim / gateway / scenarios
  BadConfig,
  BadSequence,
  NotCommitted,
  ScenarioAssertionFailure,
};

std::string_view to_string(Errc code);

// All recoverable failures surface as this exception; the code is the
// machine-readable part and what() carries the human detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fakturchain
