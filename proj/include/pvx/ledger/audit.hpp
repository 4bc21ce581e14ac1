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

#include <map>
#include <string>
#include <vector>

#include "pvx/ledger/builder.hpp"
#include "pvx/ledger/state.hpp"

namespace pvx {

struct OutputOpening {
  std::uint64_t value = 0;
  Scalar blinding;
  Scalar spend_secret;
};

using OpeningTable = std::map<std::uint64_t, OutputOpening>;

/// Collects every opening the given wallets know about. Wallets should have
/// scanned the state first.
inline OpeningTable collect_openings(const std::vector<const Wallet*>& wallets) {
  OpeningTable out;
  for (const Wallet* w : wallets)
    for (const auto& o : w->outputs()) out[o.index] = {o.value, o.blinding, o.spend_secret};
  return out;
}

struct AuditResult {
  bool ok = false;
  std::string detail;
  unsigned __int128 transparent = 0, shielded = 0, fees = 0;
};

/// Test-harness check with every secret in hand: account balances plus
/// unspent shielded values plus collected fees equal the issued supply.
inline AuditResult conservation_audit(const Group& g, const LedgerState& state, const OpeningTable& openings) {
  AuditResult r;
  for (const auto& [acct, bal] : state.balances) r.transparent += bal;
  for (const auto& [who, fee] : state.fees) r.fees += fee;
  std::size_t spent = 0;
  for (std::uint64_t i = 0; i < state.outputs.size(); ++i) {
    const auto& o = state.outputs[i];
    auto it = openings.find(i);
    if (it == openings.end()) {
      r.detail = "no opening for output " + std::to_string(i);
      return r;
    }
    const auto& op = it->second;
    if (!verify_opening(g, o.commitment, op.value, op.blinding) || g.pow_g(op.spend_secret) != o.address) {
      r.detail = "opening of output " + std::to_string(i) + " does not match the ledger";
      return r;
    }
    if (state.key_images.count(g.encode(key_image(g, o.address, op.spend_secret)))) {
      ++spent;
    } else {
      r.shielded += op.value;
    }
  }
  if (spent != state.key_images.size()) {
    r.detail = "key images without a matching output";
    return r;
  }
  if (r.transparent + r.shielded + r.fees != state.issued) {
    r.detail = "supply mismatch";
    return r;
  }
  r.ok = true;
  return r;
}

}  // namespace pvx
