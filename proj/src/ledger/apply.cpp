// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include "fakturchain/ledger/apply.hpp"

#include "fakturchain/common/error.hpp"

namespace fakturchain::ledger {

namespace {

namespace cc = chaincode;

std::string reason_for(Errc code) {
  switch (code) {
    case Errc::BadCount: return std::string(cc::reason::kBadCount);
    case Errc::BadYear: return std::string(cc::reason::kBadYear);
    case Errc::NotEligible:
    case Errc::Overflow: return std::string(cc::reason::kNotEligible);
    case Errc::Malformed: return std::string(cc::reason::kMalformed);
    default: return "rejected";
  }
}

cc::ValidationResult dispatch(WorldState& state,
                              const identity::Certificate& creator,
                              const TransactionEnvelope& tx,
                              const ApplyContext& ctx,
                              const cc::TxContext& tx_ctx) {
  switch (tx.tx_type) {
    case TxType::PostNsfp: {
      cc::ValidationResult r;
      try {
        auto args = cc::NsfpRequestArgs::decode(tx.args);
        if (tx.payload_anchor.kind != PayloadAnchor::Kind::ContentAddress ||
            tx.visibility.is_private()) {
          r.reasons.emplace_back(cc::reason::kVisibility);
          return r;
        }
        cc::issue_nsfp(state, creator, args.tax_year,
                       static_cast<int>(args.count), ctx.config, tx_ctx);
        r.accepted = true;
      } catch (const Error& e) {
        r.reasons.push_back(reason_for(e.code()));
      }
      return r;
    }
    case TxType::PostFaktur:
      return cc::commit_faktur(state, creator, tx, ctx.membership, tx_ctx);
    case TxType::RevokeCert: {
      try {
        auto args = cc::RevokeArgs::decode(tx.args);
        return cc::apply_revocation(state, creator, args, ctx.membership, tx_ctx);
      } catch (const Error&) {
        cc::ValidationResult r;
        r.reasons.emplace_back(cc::reason::kMalformed);
        return r;
      }
    }
    case TxType::ScenarioEvent:
      return cc::record_event(state, tx, tx_ctx);
  }
  return {};
}

}  // namespace

void apply_committed_in_place(WorldState& state, const Block& block,
                              const ApplyContext& ctx) {
  if (block.number != state.height + 1) {
    throw Error(Errc::InvalidArgument,
                "block " + std::to_string(block.number) +
                    " does not follow state height " + std::to_string(state.height));
  }
  for (std::uint32_t i = 0; i < block.txs.size(); ++i) {
    const auto& tx = block.txs[i];
    if (state.tx_results.contains(tx.tx_id)) continue;  // re-ordered duplicate

    TxResult result{block.number, i, tx.tx_type, false, {}};
    cc::TxContext tx_ctx{block.committed_at, tx.tx_id, block.number};
    auto auth = ctx.membership.authenticate(tx, state.cert_revocations,
                                            block.committed_at);
    if (!auth) {
      result.reasons.emplace_back(cc::reason::kUnauthorized);
    } else if (state.used_nonces[tx.creator_cert_id].contains(tx.nonce)) {
      result.reasons.emplace_back(cc::reason::kReplay);
    } else {
      state.used_nonces[tx.creator_cert_id].insert(tx.nonce);
      const auto& creator = *ctx.membership.find(tx.creator_cert_id);
      auto r = dispatch(state, creator, tx, ctx, tx_ctx);
      result.accepted = r.accepted;
      result.reasons = std::move(r.reasons);
    }
    state.tx_results.emplace(tx.tx_id, std::move(result));
  }
  state.height = block.number;
  state.seal();
}

WorldState apply_committed(const WorldState& state, const Block& block,
                           const ApplyContext& ctx) {
  WorldState next = state;
  apply_committed_in_place(next, block, ctx);
  return next;
}

WorldState replay(std::span<const Block> blocks, const ApplyContext& ctx) {
  WorldState state;
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    apply_committed_in_place(state, blocks[i], ctx);
  }
  return state;
}

}  // namespace fakturchain::ledger
