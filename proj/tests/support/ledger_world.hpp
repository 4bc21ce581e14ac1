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
#pragma once

// A small world for ledger tests: one bank, a central bank, a business and
// three individuals with accounts and wallets. Transactions are applied
// directly, without consensus.

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "pvx/ledger.hpp"
#include "pvx/policy/hook.hpp"

namespace pvx::testing {

class LedgerWorld {
public:
  explicit LedgerWorld(Mode mode = Mode::Mediated, Profile profile = Profile::Desk, unsigned range_bits = 32,
                       std::uint64_t seed = 1)
      : group(make_group(profile)), rng(seed) {
    rules.mode = mode;
    registry.register_entity({"bank", EntityKind::RegulatedInstitution});
    registry.register_entity({"cb", EntityKind::CentralBank});
    registry.register_entity({"shop", EntityKind::RegisteredBusiness});
    registry.register_entity({"mixer", EntityKind::Intermediary});
    for (const char* who : {"alice", "bob", "carol"}) {
      registry.register_entity({who, EntityKind::Individual});
      registry.open_account(std::string(who) + "-acct", "bank", who);
      wallets[who] = Wallet(who, derive_stealth_keypair(*group, as_bytes(who)));
      registry.publish_stealth(who, wallets[who].address());
    }
    registry.open_account("shop-acct", "bank", "shop");
    registry.open_account("reserve", "cb", "cb");
    issuer = derive_issuer_keypair(*group, as_bytes("mixer"));
    registry.register_issuer("mixer", issuer.public_key);

    vctx.group = group;
    vctx.range_bits = range_bits;
    vctx.registry = &registry;
    vctx.policy = make_policy_hook(group, registry, rules);
    bctx.group = group;
    bctx.range_bits = range_bits;
    bctx.state = &state;
    bctx.registry = &registry;
    bctx.sampler = &uniform;
    bctx.ring_size = 3;
  }

  Transaction build(const PaymentIntent& intent) { return build_transaction(bctx, intent, rng); }

  Verdict submit(const Transaction& tx) {
    Verdict v = validate_transaction(vctx, state, tx);
    if (v.accepted()) {
      apply_transaction(*group, state, tx);
      ++state.height;
      if (on_accept) on_accept(tx);
      scan();
    }
    return v;
  }

  void scan() {
    for (auto& [name, w] : wallets) w.scan(*group, state);
  }

  /// Issues straight into an account regardless of mode.
  void fund(const std::string& account, std::uint64_t amount) {
    Mode saved = rules.mode;
    rules.mode = Mode::Mediated;
    PaymentIntent in;
    in.kind = TxKind::Issue;
    in.actor = "cb";
    in.to_account = account;
    in.amount = amount;
    Verdict v = submit(build(in));
    rules.mode = saved;
    if (!v.accepted()) throw std::runtime_error("funding failed: " + to_string(v));
  }

  Transaction shield(const std::string& who, std::uint64_t amount, std::uint64_t fee = 0) {
    PaymentIntent in;
    in.kind = TxKind::Shield;
    in.from_account = who + "-acct";
    in.to_stealth = wallets.at(who).address();
    in.amount = amount;
    in.fee = fee;
    return build(in);
  }

  /// Enough outputs on the ledger to sample rings from.
  void seed_outputs(std::size_t count, std::uint64_t each = 10) {
    fund("carol-acct", count * each);
    for (std::size_t i = 0; i < count; ++i) {
      Verdict v = submit(shield("carol", each));
      if (!v.accepted()) throw std::runtime_error("seeding failed: " + to_string(v));
    }
  }

  Credential credential(const std::string& session) {
    auto s = credential_begin(*group, issuer.secret, as_bytes(session));
    auto [st, req] = credential_request(*group, issuer.public_key, s.nonce_commitment, kEligibleAttribute, rng);
    return credential_finalize(*group, st, credential_issue(*group, issuer.secret, s, req));
  }

  AuditResult audit() {
    scan();
    std::vector<const Wallet*> ws;
    for (auto& [n, w] : wallets) ws.push_back(&w);
    return conservation_audit(*group, state, collect_openings(ws));
  }

  GroupPtr group;
  Rng rng;
  Registry registry;
  RuleSet rules;
  LedgerState state;
  std::map<std::string, Wallet> wallets;
  IssuerKeypair issuer;
  UniformSampler uniform;
  ValidationContext vctx;
  BuildContext bctx;
  std::function<void(const Transaction&)> on_accept;
};

}  // namespace pvx::testing
