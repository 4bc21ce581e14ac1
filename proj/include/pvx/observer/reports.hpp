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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvx/observer/view.hpp"

namespace pvx {

struct TaxItem {
  std::uint64_t height = 0;
  std::string tx;
  std::string account;
  std::uint64_t amount = 0;
};

struct TaxReport {
  std::string entity;
  std::uint64_t from = 0, to = 0;  // inclusive heights
  std::vector<TaxItem> items;
  std::uint64_t total = 0;
};

/// Income statement of a registered business: every committed transparent
/// inflow to its accounts at heights [from, to].
inline TaxReport tax_report(const Group& g, const Chain& chain, const Registry& reg, const std::string& entity,
                            std::uint64_t from = 0, std::uint64_t to = ~std::uint64_t{0}) {
  if (reg.entity(entity).kind != EntityKind::RegisteredBusiness)
    throw std::invalid_argument("tax reports cover registered businesses; '" + entity + "' is a " +
                                std::string(to_string(reg.entity(entity).kind)));
  TaxReport r{entity, from, to, {}, 0};
  for (const auto& block : chain) {
    if (block->height < from || block->height > to) continue;
    for (const auto& tx : block->txs) {
      std::string id;
      for (const auto& o : tx.transparent_outputs) {
        if (!reg.has_account(o.account) || reg.lookup_account(o.account).owner != entity) continue;
        if (id.empty()) id = wire_digest(g, tx).hex();
        r.items.push_back({block->height, id, o.account, o.amount});
        r.total += o.amount;
      }
    }
  }
  return r;
}

/// What a cooperating participant hands to an investigator: openings of
/// outputs it created or received, and spend secrets for inputs it signed.
struct OutputClaim {
  std::size_t position = 0;  // within tx.shielded_outputs
  std::uint64_t amount = 0;
  Scalar blinding;
};

struct InputClaim {
  std::size_t position = 0;  // within tx.shielded_inputs
  Scalar spend_secret;
};

struct DisclosureClaims {
  std::vector<OutputClaim> outputs;
  std::vector<InputClaim> inputs;
};

struct DisclosedInput {
  std::size_t position = 0;
  std::uint64_t member = 0;  // global index of the spent output
};

struct Disclosure {
  bool consistent = true;
  std::vector<std::string> mismatches;
  std::vector<OutputClaim> outputs;
  std::vector<DisclosedInput> inputs;
  std::uint64_t disclosed_total = 0;
};

/// Re-derives every claimed opening and key image against the ledger. Only
/// what the claims cover is revealed; other outputs and inputs stay as
/// opaque as in the public view.
inline Disclosure cooperative_disclosure(const Group& g, const LedgerState& state, const Transaction& tx,
                                         const DisclosureClaims& claims) {
  Disclosure d;
  auto fail = [&](std::string why) {
    d.consistent = false;
    d.mismatches.push_back(std::move(why));
  };
  for (const auto& c : claims.outputs) {
    if (c.position >= tx.shielded_outputs.size()) {
      fail("output " + std::to_string(c.position) + " does not exist");
      continue;
    }
    if (!g.scalar_fits(c.amount) || !verify_opening(g, tx.shielded_outputs[c.position].commitment, c.amount, c.blinding)) {
      fail("output " + std::to_string(c.position) + ": commitment does not open to " + std::to_string(c.amount));
      continue;
    }
    d.outputs.push_back(c);
    d.disclosed_total += c.amount;
  }
  for (const auto& c : claims.inputs) {
    if (c.position >= tx.shielded_inputs.size()) {
      fail("input " + std::to_string(c.position) + " does not exist");
      continue;
    }
    const auto& in = tx.shielded_inputs[c.position];
    std::optional<std::uint64_t> member;
    for (auto idx : in.ring)
      if (idx < state.outputs.size() && g.pow_g(c.spend_secret) == state.outputs[idx].address &&
          key_image(g, state.outputs[idx].address, c.spend_secret) == in.signature.key_image)
        member = idx;
    if (!member) {
      fail("input " + std::to_string(c.position) + ": secret matches no ring member's key image");
      continue;
    }
    d.inputs.push_back({c.position, *member});
  }
  return d;
}

}  // namespace pvx
