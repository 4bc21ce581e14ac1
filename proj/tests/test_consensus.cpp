/*
 * Copyright (C) 2026 The pvx Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <gtest/gtest.h>

#include "pvx/consensus.hpp"
#include "support/ledger_world.hpp"

using namespace pvx;
using pvx::testing::LedgerWorld;

namespace {

Transaction issue(LedgerWorld& lw, std::uint64_t amount) {
  PaymentIntent in;
  in.kind = TxKind::Issue;
  in.actor = "cb";
  in.to_account = "alice-acct";
  in.amount = amount;
  return lw.build(in);
}

WorldConfig config(std::size_t n, std::size_t f, std::uint64_t seed) {
  WorldConfig c;
  c.n = n;
  c.f = f;
  c.seed = seed;
  return c;
}

bool committed_everywhere(const World& w, std::uint64_t height) { return w.reached(height) == w.honest_count(); }

}  // namespace

TEST(Consensus, SingleNodeCommitsImmediately) {
  LedgerWorld lw;
  World w(config(1, 0, 1), lw.vctx, lw.state);
  w.submit_client_tx(0, issue(lw, 5));
  EXPECT_EQ(w.replica(0).last_executed(), 1u);
  EXPECT_EQ(w.replica(0).state().balance("alice-acct"), 5u);
  EXPECT_EQ(w.stats().sent, 0u);
}

TEST(Consensus, RejectsUnderQuorumConfiguration) {
  LedgerWorld lw;
  EXPECT_THROW(World(config(3, 1, 1), lw.vctx, lw.state), std::invalid_argument);
}

TEST(Consensus, FinalizesWithOneCrashedReplica) {
  LedgerWorld lw;
  auto c = config(4, 1, 7);
  c.faults.resize(4);
  c.faults[2].crash_at = 0;
  World w(c, lw.vctx, lw.state);
  w.submit_client_tx(1, issue(lw, 5));
  ASSERT_TRUE(w.run_until([&] { return committed_everywhere(w, 1); }, 1'000'000));
  for (NodeId i : {0u, 1u, 3u}) EXPECT_EQ(w.replica(i).state().balance("alice-acct"), 5u);
  EXPECT_EQ(w.replica(2).last_executed(), 0u);
  EXPECT_TRUE(w.logs_consistent());
}

TEST(Consensus, CrashedPrimaryIsReplaced) {
  LedgerWorld lw;
  auto c = config(4, 1, 3);
  c.faults.resize(4);
  c.faults[0].crash_at = 0;
  World w(c, lw.vctx, lw.state);
  w.submit_client_tx(1, issue(lw, 5));
  ASSERT_TRUE(w.run_until([&] { return committed_everywhere(w, 1); }, 5'000'000));
  EXPECT_GE(w.replica(1).installed_view(), 1u);
  EXPECT_TRUE(w.logs_consistent());
}

TEST(Consensus, ForwardsToPrimary) {
  LedgerWorld lw;
  World w(config(4, 1, 2), lw.vctx, lw.state);
  w.submit_client_tx(3, issue(lw, 9));
  EXPECT_TRUE(w.replica(3).in_mempool(wire_digest(*lw.group, issue(lw, 9))));
  ASSERT_TRUE(w.run_until([&] { return w.replica(0).last_executed() == 1; }, 1'000'000));
  EXPECT_EQ(w.replica(0).chain()[0]->txs.size(), 1u);
  EXPECT_EQ(w.replica(0).installed_view(), 0u);
}

TEST(Consensus, DoubleSpendIsNeverCommittedAndLogged) {
  LedgerWorld lw;
  lw.seed_outputs(4);
  lw.fund("alice-acct", 50);
  ASSERT_TRUE(lw.submit(lw.shield("alice", 50)).accepted());
  PaymentIntent in;
  in.kind = TxKind::Unshield;
  in.payer = &lw.wallets["alice"];
  in.to_account = "shop-acct";
  in.amount = 20;
  Transaction first = lw.build(in);
  in.amount = 30;
  Transaction second = lw.build(in);  // spends the same output

  const auto base = lw.state.height;
  World w(config(4, 1, 11), lw.vctx, lw.state);
  w.submit_client_tx(0, first);
  ASSERT_TRUE(w.run_until([&] { return committed_everywhere(w, base + 1); }, 1'000'000));
  w.submit_client_tx(0, second);
  w.run_until(w.now() + 500'000);
  EXPECT_EQ(w.replica(0).last_executed(), base + 1);
  ASSERT_FALSE(w.rejections().empty());
  EXPECT_EQ(w.rejections().back().verdict.reason, RejectReason::DoubleSpend);
  EXPECT_EQ(w.rejections().back().tx, wire_digest(*lw.group, second));
}

TEST(Consensus, ConflictingTxsInOneBatchKeepOnlyOne) {
  LedgerWorld lw;
  lw.seed_outputs(4);
  lw.fund("alice-acct", 50);
  ASSERT_TRUE(lw.submit(lw.shield("alice", 50)).accepted());
  PaymentIntent in;
  in.kind = TxKind::Unshield;
  in.payer = &lw.wallets["alice"];
  in.to_account = "shop-acct";
  in.amount = 20;
  Transaction a = lw.build(in);
  in.amount = 30;
  Transaction b = lw.build(in);
  // Both are valid alone; the primary's block keeps only one.
  auto c = config(4, 1, 5);
  World w4(c, lw.vctx, lw.state);
  w4.submit_client_tx(1, a);
  w4.submit_client_tx(1, b);
  w4.run_until(2'000'000);
  ASSERT_EQ(w4.replica(0).last_executed(), lw.state.height + 1);
  EXPECT_TRUE(w4.replica(0).state().balance("shop-acct") == 20 || w4.replica(0).state().balance("shop-acct") == 30);
  EXPECT_TRUE(w4.logs_consistent());
}

TEST(Consensus, EquivocatingPrimaryCannotSplitHonestNodes) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    LedgerWorld lw;
    auto c = config(4, 1, seed);
    c.faults.resize(4);
    c.faults[0].equivocate_height = 1;
    World w(c, lw.vctx, lw.state);
    for (std::uint64_t k = 1; k <= 3; ++k) w.submit_client_tx(1, issue(lw, k));
    ASSERT_TRUE(w.run_until([&] { return committed_everywhere(w, 1); }, 10'000'000)) << seed;
    EXPECT_TRUE(w.logs_consistent()) << seed;
    EXPECT_GE(w.max_view(), 1u) << seed;
  }
}

TEST(Consensus, TotalLossStallsAndViewsGrow) {
  LedgerWorld lw;
  auto c = config(4, 1, 9);
  c.net.drop = 1.0;
  World w(c, lw.vctx, lw.state);
  w.submit_client_tx(1, issue(lw, 5));
  w.run_until(1'000'000);
  std::uint64_t v1 = w.max_view();
  w.run_until(20'000'000);
  EXPECT_EQ(w.commits(), 0u);
  EXPECT_GE(v1, 1u);
  EXPECT_GT(w.max_view(), v1);
  EXPECT_GT(w.stats().timers, 0u);
}

TEST(Consensus, LiveUnderThirtyPercentDrop) {
  LedgerWorld lw;
  auto c = config(7, 2, 21);
  c.net.drop = 0.3;
  World w(c, lw.vctx, lw.state);
  for (std::uint64_t k = 1; k <= 20; ++k) w.submit_client_tx(static_cast<NodeId>(k % 7), issue(lw, k));
  ASSERT_TRUE(w.run_until([&] { return w.reached(1) == 7 && w.replica(0).state().balance("alice-acct") == 210 &&
                                       w.replica(6).state().balance("alice-acct") == 210; },
                          60'000'000));
  EXPECT_TRUE(w.logs_consistent());
}

TEST(Consensus, ReplicasAgreeOnStateDigest) {
  LedgerWorld lw;
  World w(config(4, 1, 4), lw.vctx, lw.state);
  for (std::uint64_t k = 1; k <= 40; ++k) w.submit_client_tx(0, issue(lw, k));
  ASSERT_TRUE(w.run_until([&] {
    for (NodeId i = 0; i < 4; ++i) if (w.replica(i).state().balance("alice-acct") != 820) return false;
    return true; }, 5'000'000));
  EXPECT_GE(w.replica(0).last_executed(), 3u);  // at most 16 per block
  for (NodeId i = 1; i < 4; ++i)
    EXPECT_EQ(state_digest(*lw.group, w.replica(i).state()), state_digest(*lw.group, w.replica(0).state()));
}

TEST(Consensus, TraceIsDeterministic) {
  auto run = [](std::uint64_t seed) {
    LedgerWorld lw;
    auto c = config(4, 1, seed);
    c.net.drop = 0.2;
    c.faults.resize(4);
    c.faults[3].mute = {{0, 200'000}};
    World w(c, lw.vctx, lw.state);
    for (std::uint64_t k = 1; k <= 5; ++k) w.submit_client_tx(1, issue(lw, k));
    w.run_until(3'000'000);
    return w.trace_digest();
  };
  EXPECT_EQ(run(42), run(42));
  EXPECT_NE(run(42), run(43));
}

TEST(Consensus, PartitionHealsAndMinorityCatchesUp) {
  LedgerWorld lw;
  auto c = config(4, 1, 8);
  c.net.partitions.push_back({{{0, 1, 2}, {3}}, 0, 1'000'000});
  World w(c, lw.vctx, lw.state);
  for (std::uint64_t k = 1; k <= 3; ++k) w.submit_client_tx(0, issue(lw, k));
  w.run_until(900'000);
  EXPECT_GE(w.replica(0).last_executed(), 1u);
  EXPECT_EQ(w.replica(3).last_executed(), 0u);
  ASSERT_TRUE(w.run_until([&] { return w.replica(3).last_executed() == w.replica(0).last_executed(); }, 5'000'000));
  EXPECT_TRUE(w.logs_consistent());
}

TEST(Consensus, UnknownNodeIsAnError) {
  LedgerWorld lw;
  World w(config(1, 0, 1), lw.vctx, lw.state);
  EXPECT_THROW(w.submit_client_tx(5, issue(lw, 1)), std::out_of_range);
}

TEST(Consensus, FaultScriptParsing) {
  NodeFaults f;
  apply_fault_script(f, "crash@100");
  apply_fault_script(f, "mute@5..10");
  apply_fault_script(f, "equivocate@2");
  EXPECT_EQ(f.crash_at, 100u);
  EXPECT_TRUE(f.muted(5));
  EXPECT_FALSE(f.muted(10));
  EXPECT_EQ(f.equivocate_height, 2u);
  EXPECT_THROW(apply_fault_script(f, "explode@1"), FaultScriptError);
  EXPECT_THROW(apply_fault_script(f, "mute@5..5"), FaultScriptError);
  EXPECT_THROW(apply_fault_script(f, "crash@x"), FaultScriptError);
}
