// Copyright 2026 The fakturchain Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "fakturchain/common/error.hpp"
#include "fakturchain/dataplane/dataplane.hpp"
#include "fakturchain/ledger/chain.hpp"
#include "fixtures.hpp"

namespace fakturchain::dataplane {
namespace {

using identity::OrgRole;

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return Errc::InvalidArgument;
}

TEST(Cas, PutIsIdempotentAndContentAddressed) {
  CasStore s;
  auto a = s.put(to_bytes("nsfp batch"));
  EXPECT_EQ(s.put(to_bytes("nsfp batch")), a);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_NE(s.put(to_bytes("nsfp batcH")), a);
  EXPECT_EQ(code_of([&] { s.put(Bytes{}); }), Errc::EmptyPayload);
}

TEST(Cas, GetRoundTripNotFoundAndCorruption) {
  CasStore s;
  auto a = s.put(to_bytes("payload"));
  EXPECT_EQ(s.get(a), to_bytes("payload"));
  EXPECT_EQ(code_of([&] { s.get(ContentAddress::of(to_bytes("other"))); }), Errc::NotFound);
  s.raw()[a][0] ^= 1;
  EXPECT_EQ(code_of([&] { s.get(a); }), Errc::IntegrityFailure);
}

TEST(Cas, ReplicaAcceptsOnlyMatchingBytes) {
  CasStore s;
  auto p = to_bytes("alloc");
  EXPECT_FALSE(s.accept_replica(ContentAddress::of(p), to_bytes("allod")));
  EXPECT_TRUE(s.accept_replica(ContentAddress::of(p), p));
  EXPECT_TRUE(s.contains(ContentAddress::of(p)));
}

struct Exchange : ::testing::Test {
  identity::CertificateAuthority ca{"DJP", crypto::KeyPair::from_seed(Digest::of("root"))};
  identity::RevocationList rl;
  crypto::KeyPair ka = crypto::KeyPair::from_seed(Digest::of("a"));
  crypto::KeyPair kd = crypto::KeyPair::from_seed(Digest::of("d"));
  crypto::KeyPair kb = crypto::KeyPair::from_seed(Digest::of("b"));
  identity::Certificate alpha = ca.issue_certificate("PT Alpha", OrgRole::PKP, ka.public_key(), {0, 1000}, rl);
  identity::Certificate djp = ca.issue_certificate("DJP", OrgRole::DJP, kd.public_key(), {0, 1000}, rl);
  identity::Certificate beta = ca.issue_certificate("PT Beta", OrgRole::PKP, kb.public_key(), {0, 1000}, rl);
  Party pa{alpha, ka};
  Party pd{djp, kd};
  Party pb{beta, kb};
  Trust trust() const { return {ca.root_key(), rl, 10}; }
  Bytes payload = to_bytes("faktur body with goods, prices and VAT: 1,000,000 / 110,000");
};

TEST_F(Exchange, OnlyTheTwoPartiesHoldThePlaintext) {
  OffchainStore sa, sd, sb;
  auto r = private_send(pa, pd, payload, 1, sa, sd, trust());
  EXPECT_EQ(r.payload_hash, Digest::of(payload));
  EXPECT_EQ(*sa.read_verified(r.payload_hash), payload);
  EXPECT_EQ(*sd.read_verified(r.payload_hash), payload);
  EXPECT_EQ(sd.find(r.payload_hash)->counterpart, "PT Alpha");
  EXPECT_EQ(sb.size(), 0u);
  EXPECT_FALSE(shares_fragment(r.envelope.encode(), payload, 16));
  EXPECT_TRUE(verify_receipt(djp, r.envelope, r.receipt, trust()));
}

TEST_F(Exchange, WrongReceiverCannotOpen) {
  auto env = seal_private(pa, djp, payload, 2, trust());
  EXPECT_EQ(code_of([&] { open_private(pb, alpha, env, trust()); }), Errc::AuthFailure);
}

TEST_F(Exchange, RevokedPartiesAreRefused) {
  auto revoked = ca.revoke(rl, djp.cert_id, "compromised", 5);
  Trust t{ca.root_key(), revoked, 10};
  EXPECT_EQ(code_of([&] { seal_private(pa, djp, payload, 3, t); }), Errc::AuthFailure);
  auto env = seal_private(pa, djp, payload, 3, trust());
  auto rev_a = ca.revoke(rl, alpha.cert_id, "phished", 5);
  Trust ta{ca.root_key(), rev_a, 10};
  EXPECT_EQ(code_of([&] { open_private(pd, alpha, env, ta); }), Errc::AuthFailure);
}

TEST_F(Exchange, TamperedCiphertextNeverConfirms) {
  for (std::size_t i = 0; i < 200; i += 7) {
    auto env = seal_private(pa, djp, payload, 4, trust());
    env.ciphertext[i % env.ciphertext.size()] ^= 0x20;
    EXPECT_EQ(code_of([&] { open_private(pd, alpha, env, trust()); }), Errc::DecryptFailure);
  }
  // A swapped payload hash breaks the sender signature first.
  auto env = seal_private(pa, djp, payload, 4, trust());
  env.payload_hash = Digest::of("forged");
  EXPECT_EQ(code_of([&] { open_private(pd, alpha, env, trust()); }), Errc::AuthFailure);
}

TEST_F(Exchange, FailedSendStoresNothing) {
  OffchainStore sa, sd;
  auto revoked = ca.revoke(rl, djp.cert_id, "x", 5);
  Trust t{ca.root_key(), revoked, 10};
  EXPECT_THROW(private_send(pa, pd, payload, 5, sa, sd, t), Error);
  EXPECT_EQ(sa.size() + sd.size(), 0u);
}

TEST_F(Exchange, EnvelopeEncodingRoundTrip) {
  auto env = seal_private(pa, djp, payload, 6, trust());
  EXPECT_EQ(PrivateEnvelope::decode(env.encode()), env);
  auto bytes = env.encode();
  bytes.pop_back();
  EXPECT_EQ(code_of([&] { PrivateEnvelope::decode(bytes); }), Errc::Malformed);
}

TEST_F(Exchange, CasGetChecksCaller) {
  CasStore s;
  auto a = s.put(to_bytes("x"));
  EXPECT_EQ(cas_get(s, a, alpha, trust()), to_bytes("x"));
  auto revoked = ca.revoke(rl, alpha.cert_id, "x", 1);
  EXPECT_EQ(code_of([&] { cas_get(s, a, alpha, Trust{ca.root_key(), revoked, 10}); }), Errc::AuthFailure);
}

// A chain with private anchors for a set of payloads, built directly.
struct Anchored : Exchange {
  ledger::Chain chain;
  std::vector<Bytes> payloads;
  std::vector<Digest> tx_ids;
  OffchainStore store;

  void SetUp() override {
    std::vector<ledger::TransactionEnvelope> txs;
    for (int i = 0; i < 20; ++i) {
      Bytes p = to_bytes("private faktur number " + std::to_string(i) + std::string(40, 'x'));
      auto env = ledger::make_envelope(ledger::TxType::PostFaktur, alpha.cert_id, ka,
                                       ledger::PayloadAnchor::hash(Digest::of(p)),
                                       ledger::Visibility::between("PT Alpha", "DJP"), i + 1, 1, {});
      payloads.push_back(p);
      tx_ids.push_back(env.tx_id);
      txs.push_back(env);
      store.put(p, "DJP", env.tx_id);
    }
    chain.append_block(std::move(txs), 1, 1,
                       [](const ledger::TransactionEnvelope&) { return identity::AuthzDecision::allow(); });
  }
};

TEST_F(Anchored, VerifyAgainstChain) {
  EXPECT_TRUE(verify_against_chain(payloads[3], chain, tx_ids[3]));
  EXPECT_FALSE(verify_against_chain(payloads[4], chain, tx_ids[3]));
  EXPECT_EQ(code_of([&] { verify_against_chain(payloads[3], chain, Digest::of("?")); }), Errc::NotFound);
  EXPECT_EQ(anchored_private(chain, "DJP").size(), 20u);
  EXPECT_EQ(anchored_private(chain, "PT Beta").size(), 0u);
}

TEST_F(Anchored, SweepFindsCorruptAndMissing) {
  EXPECT_TRUE(sweep(store, chain, "DJP").clean());
  auto damaged = store;
  damaged.raw().at(Digest::of(payloads[0])).plaintext[0] ^= 0xff;
  damaged.raw().erase(Digest::of(payloads[1]));
  auto rep = sweep(damaged, chain, "DJP");
  EXPECT_EQ(rep.checked, 20u);
  EXPECT_EQ(rep.corrupt, std::vector<Digest>{Digest::of(payloads[0])});
  EXPECT_EQ(rep.missing, std::vector<Digest>{Digest::of(payloads[1])});
}

TEST_F(Anchored, BackupRestoreVerifiesEveryRecord) {
  auto artifact = backup(store);
  OffchainStore victim = store;
  for (auto& [h, rec] : victim.raw())
    for (auto& b : rec.plaintext) b ^= 0x5a;  // "encrypted"
  auto rep = restore(victim, artifact, chain, "DJP");
  EXPECT_EQ(rep.total, 20u);
  EXPECT_EQ(rep.verified, 20u);
  EXPECT_TRUE(rep.corrupt.empty());
  EXPECT_TRUE(rep.missing.empty());
  EXPECT_EQ(victim, store);
  EXPECT_TRUE(sweep(victim, chain, "DJP").clean());
}

TEST_F(Anchored, RestoreReportsDamagedBackupRecords) {
  auto artifact = backup(store);
  // Damage the plaintext of one record inside the artifact.
  auto needle = payloads[5];
  auto it = std::search(artifact.begin(), artifact.end(), needle.begin(), needle.end());
  ASSERT_NE(it, artifact.end());
  *it ^= 1;
  OffchainStore target;
  auto rep = restore(target, artifact, chain, "DJP");
  EXPECT_EQ(rep.verified, 19u);
  EXPECT_EQ(rep.total, rep.verified + rep.corrupt.size());
  EXPECT_EQ(rep.corrupt, std::vector<Digest>{Digest::of(payloads[5])});
  EXPECT_TRUE(rep.missing.empty());
  EXPECT_FALSE(target.contains(Digest::of(payloads[5])));
}

TEST_F(Anchored, RestoreReportsAnchorsAbsentFromBackup) {
  OffchainStore partial = store;
  partial.raw().erase(Digest::of(payloads[7]));
  auto artifact = backup(partial);
  OffchainStore target;
  auto rep = restore(target, artifact, chain, "DJP");
  EXPECT_EQ(rep.verified, 19u);
  EXPECT_EQ(rep.missing, std::vector<Digest>{Digest::of(payloads[7])});
}

TEST_F(Anchored, MalformedBackup) {
  OffchainStore target;
  EXPECT_EQ(code_of([&] { restore(target, to_bytes("not a backup"), chain, "DJP"); }), Errc::MalformedBackup);
  auto artifact = backup(store);
  artifact.resize(artifact.size() / 2);
  EXPECT_EQ(code_of([&] { restore(target, artifact, chain, "DJP"); }), Errc::MalformedBackup);
}

TEST(OffchainStore, KeysAreContentHashes) {
  OffchainStore s;
  auto h = s.put(to_bytes("abc"), "DJP");
  EXPECT_EQ(h, Digest::of("abc"));
  EXPECT_FALSE(s.find(h)->tx_id);
  s.put(to_bytes("abc"), "someone else", Digest::of("tx"));
  EXPECT_EQ(s.find(h)->counterpart, "DJP");
  EXPECT_EQ(s.find(h)->tx_id, Digest::of("tx"));
  s.raw().at(h).plaintext.push_back('!');
  EXPECT_FALSE(s.read_verified(h));
}

}  // namespace
}  // namespace fakturchain::dataplane
