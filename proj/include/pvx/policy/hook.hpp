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

#include <set>

#include "pvx/ledger/validate.hpp"
#include "pvx/policy/engine.hpp"

namespace pvx {

/// Validity and freshness of each credential as a validator sees them.
inline std::vector<CredentialStatus> credential_statuses(const Group& g, const Registry& registry,
                                                         const LedgerState& state,
                                                         const std::vector<Credential>& creds) {
  std::vector<CredentialStatus> out;
  std::set<Bytes> seen;
  for (const auto& c : creds) {
    bool valid = false;
    if (c.attribute == kEligibleAttribute)
      for (const auto& [id, key] : registry.issuers())
        if (credential_verify(g, key, c)) {
          valid = true;
          break;
        }
    bool unused = !state.serials.count(c.serial) && seen.insert(c.serial).second;
    out.push_back({valid, unused});
  }
  return out;
}

/// Descriptors for a transaction as validators see it: accounts resolve to
/// their owners' kinds, stores stay anonymous. One descriptor per
/// transparent destination, or a single one for store destinations.
inline std::vector<IntentDescriptor> describe_transaction(const Group& g, const Registry& registry,
                                                          const LedgerState& state, const Transaction& tx) {
  IntentDescriptor base;
  base.kind = tx.kind;
  auto [src, dst] = expected_endpoints(tx.kind);
  base.source.cls = src;
  base.destination.cls = dst;
  if (tx.kind == TxKind::Issue) {
    base.source.kind = registry.entity(tx.actor).kind;
  } else if (src == EndpointClass::Account) {
    base.source.kind = registry.entity(registry.lookup_account(tx.transparent_inputs.front().account).owner).kind;
  }
  base.credentials = credential_statuses(g, registry, state, tx.credentials);
  if (tx.kind == TxKind::MediatedBatch) base.participants = tx.kernels.size();

  std::vector<IntentDescriptor> out;
  if (dst == EndpointClass::Account) {
    for (const auto& o : tx.transparent_outputs) {
      IntentDescriptor d = base;
      const auto& acct = registry.lookup_account(o.account);
      d.destination.kind = registry.entity(acct.owner).kind;
      d.destination_ids = {o.account, acct.owner};
      d.visible_amount = o.amount;
      out.push_back(std::move(d));
    }
  } else {
    out.push_back(std::move(base));
  }
  return out;
}

/// Ledger hook evaluating the rule set over a transaction. The registry and
/// rule set are captured by reference; the runner mutates them only between
/// blocks.
inline PolicyHook make_policy_hook(GroupPtr group, const Registry& registry, const RuleSet& rules) {
  return [group, &registry, &rules](const LedgerState& state, const Transaction& tx) {
    for (const auto& d : describe_transaction(*group, registry, state, tx)) {
      auto v = authorize(d, rules);
      if (!v.allowed()) return v;
    }
    return PolicyVerdict::allow();
  };
}

}  // namespace pvx
