// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "fakturchain/chaincode/chaincode.hpp"
#include "fakturchain/ledger/chain.hpp"
#include "fakturchain/ledger/membership.hpp"
#include "fakturchain/ledger/world_state.hpp"

namespace fakturchain::ledger {

struct ApplyContext {
  const Membership& membership;
  const chaincode::ChaincodeConfig& config;
};

// Runs every transaction of a committed block through authentication,
// replay protection and the chaincode. Invalid transactions become
// rejection records; the block itself is never refused. The block must be
// the successor of state.height (throws InvalidArgument otherwise).
WorldState apply_committed(const WorldState& state, const Block& block,
                           const ApplyContext& ctx);
void apply_committed_in_place(WorldState& state, const Block& block,
                              const ApplyContext& ctx);

// Folds apply_committed over blocks[1..] starting from a fresh state.
WorldState replay(std::span<const Block> blocks, const ApplyContext& ctx);

}  // namespace fakturchain::ledger
