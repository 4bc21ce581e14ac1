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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pvx/consensus/messages.hpp"
#include "pvx/entityreg/registry.hpp"
#include "pvx/ledger/builder.hpp"

namespace pvx {

using Chain = std::vector<BlockPtr>;

enum class ObserverKind : std::uint8_t { Regulator, Institution, Public, Adversary, Participant };

/// Who is looking. `id` names the institution for Institution and the
/// heuristic for Adversary; Participant carries the wallet it looks through.
struct ObserverClass {
  ObserverKind kind = ObserverKind::Public;
  std::string id;
  const Wallet* wallet = nullptr;

  static ObserverClass regulator() { return {ObserverKind::Regulator, {}, nullptr}; }
  static ObserverClass publicly() { return {ObserverKind::Public, {}, nullptr}; }
  static ObserverClass institution(std::string id) { return {ObserverKind::Institution, std::move(id), nullptr}; }
  static ObserverClass adversary(std::string heuristic) { return {ObserverKind::Adversary, std::move(heuristic), nullptr}; }
  static ObserverClass participant(const Wallet& w) { return {ObserverKind::Participant, w.owner(), &w}; }
};

struct TransparentLegView {
  std::string account;
  std::uint64_t amount = 0;
  bool inflow = false;
  std::optional<std::string> owner;  // only where the observer holds the registry mapping
};

struct ShieldedInputView {
  std::vector<std::uint64_t> ring;
  std::string key_image;
  std::optional<std::uint64_t> own_member;  // participant only
};

struct ShieldedOutputView {
  std::uint64_t index = 0;  // global output index
  std::string address;
  std::string ephemeral;
  std::string commitment;
  std::optional<std::uint64_t> amount;    // participant only
  std::optional<std::string> blinding;    // participant only
};

struct VisibleRecord {
  std::string tx;
  std::uint64_t height = 0;
  TxKind kind = TxKind::TransparentTransfer;
  std::string actor;
  std::uint64_t fee = 0;
  std::vector<TransparentLegView> legs;
  std::vector<ShieldedInputView> inputs;
  std::vector<ShieldedOutputView> outputs;
  std::size_t credentials = 0;
};

namespace detail {

inline bool sees_owner(const ObserverClass& who, const Registry& reg, const std::string& account) {
  switch (who.kind) {
    case ObserverKind::Regulator: return true;
    case ObserverKind::Institution: return reg.has_account(account) && reg.lookup_account(account).institution == who.id;
    default: return false;
  }
}

}  // namespace detail

/// Projects the committed chain for one observer class. Output indices
/// follow ledger order, so they match LedgerState::outputs.
inline std::vector<VisibleRecord> view(const Group& g, const Chain& chain, const Registry& reg,
                                       const ObserverClass& who, std::uint64_t first_output = 0) {
  std::map<Bytes, std::uint64_t> own;  // participant: key image -> output index
  std::map<std::uint64_t, const OwnedOutput*> own_out;
  if (who.kind == ObserverKind::Participant && who.wallet)
    for (const auto& o : who.wallet->outputs()) {
      own[o.key_image] = o.index;
      own_out[o.index] = &o;
    }

  std::vector<VisibleRecord> out;
  std::uint64_t next = first_output;
  for (const auto& block : chain) {
    for (const auto& tx : block->txs) {
      VisibleRecord r;
      r.tx = wire_digest(g, tx).hex();
      r.height = block->height;
      r.kind = tx.kind;
      r.actor = tx.actor;
      r.fee = tx.fee;
      r.credentials = tx.credentials.size();
      for (const auto& in : tx.transparent_inputs) {
        TransparentLegView l{in.account, in.amount, false, std::nullopt};
        if (detail::sees_owner(who, reg, in.account)) l.owner = reg.lookup_account(in.account).owner;
        r.legs.push_back(std::move(l));
      }
      for (const auto& o : tx.transparent_outputs) {
        TransparentLegView l{o.account, o.amount, true, std::nullopt};
        if (detail::sees_owner(who, reg, o.account)) l.owner = reg.lookup_account(o.account).owner;
        r.legs.push_back(std::move(l));
      }
      for (const auto& in : tx.shielded_inputs) {
        ShieldedInputView v{in.ring, to_hex(g.encode(in.signature.key_image)), std::nullopt};
        auto it = own.find(g.encode(in.signature.key_image));
        if (it != own.end()) v.own_member = it->second;
        r.inputs.push_back(std::move(v));
      }
      for (const auto& o : tx.shielded_outputs) {
        ShieldedOutputView v;
        v.index = next++;
        v.address = to_hex(g.encode(o.address));
        v.ephemeral = to_hex(g.encode(o.ephemeral));
        v.commitment = to_hex(g.encode(o.commitment.point));
        auto it = own_out.find(v.index);
        if (it != own_out.end()) {
          v.amount = it->second->value;
          v.blinding = to_hex(g.encode(it->second->blinding));
        }
        r.outputs.push_back(std::move(v));
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

/// Fraction of transactions in which an institution learns an identity:
/// it processed the transaction or holds one of its accounts.
inline std::map<std::string, double> institution_share(const Chain& chain, const Registry& reg) {
  std::map<std::string, std::uint64_t> seen;
  std::uint64_t total = 0;
  for (const auto& [id, e] : reg.entities())
    if (can_hold_accounts(e.kind) || e.kind == EntityKind::Intermediary) seen[id] = 0;
  for (const auto& block : chain)
    for (const auto& tx : block->txs) {
      ++total;
      std::set<std::string> who;
      if (!tx.actor.empty()) who.insert(tx.actor);
      for (const auto& in : tx.transparent_inputs)
        if (reg.has_account(in.account)) who.insert(reg.lookup_account(in.account).institution);
      for (const auto& o : tx.transparent_outputs)
        if (reg.has_account(o.account)) who.insert(reg.lookup_account(o.account).institution);
      for (const auto& w : who)
        if (seen.count(w)) ++seen[w];
    }
  std::map<std::string, double> share;
  for (const auto& [id, k] : seen) share[id] = total ? static_cast<double>(k) / static_cast<double>(total) : 0.0;
  return share;
}

}  // namespace pvx
