// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/common/error.hpp"

namespace fakturchain {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Malformed: return "Malformed";
    case Errc::NotFound: return "NotFound";
    case Errc::DuplicateSubjectRole: return "DuplicateSubjectRole";
    case Errc::UnknownCert: return "UnknownCert";
    case Errc::AlreadyRevoked: return "AlreadyRevoked";
    case Errc::BadValidity: return "BadValidity";
    case Errc::UnauthorizedTx: return "UnauthorizedTx";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::NotLeader: return "NotLeader";
    case Errc::NotEligible: return "NotEligible";
    case Errc::BadCount: return "BadCount";
    case Errc::BadYear: return "BadYear";
    case Errc::Overflow: return "Overflow";
    case Errc::Forbidden: return "Forbidden";
    case Errc::EmptyPayload: return "EmptyPayload";
    case Errc::IntegrityFailure: return "IntegrityFailure";
    case Errc::AuthFailure: return "AuthFailure";
    case Errc::DecryptFailure: return "DecryptFailure";
    case Errc::MalformedBackup: return "MalformedBackup";
    case Errc::BadConfig: return "BadConfig";
    case Errc::BadSequence: return "BadSequence";
    case Errc::NotCommitted: return "NotCommitted";
    case Errc::ScenarioAssertionFailure: return "ScenarioAssertionFailure";
  }
  return "Unknown";
}

}  // namespace fakturchain
