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

#include <array>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pvx/entityreg/registry.hpp"
#include "pvx/ledger/state.hpp"
#include "pvx/ledger/transaction.hpp"
#include "pvx/policy/engine.hpp"

namespace pvx {

/// Validation failures in clause order.
enum class RejectReason : std::uint8_t {
  Malformed,
  UnknownAccount,
  UnknownOutput,
  DuplicateOutput,
  RingSignature,
  DoubleSpend,
  RangeProof,
  BalanceProof,
  InsufficientFunds,
  StaleSequence,
  PolicyDenied,
  CredentialReused,
};

inline constexpr std::array<RejectReason, 12> kAllRejectReasons = {
    RejectReason::Malformed,    RejectReason::UnknownAccount, RejectReason::UnknownOutput,
    RejectReason::DuplicateOutput, RejectReason::RingSignature, RejectReason::DoubleSpend,
    RejectReason::RangeProof,   RejectReason::BalanceProof,   RejectReason::InsufficientFunds,
    RejectReason::StaleSequence, RejectReason::PolicyDenied,  RejectReason::CredentialReused};

inline std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::Malformed: return "Malformed";
    case RejectReason::UnknownAccount: return "UnknownAccount";
    case RejectReason::UnknownOutput: return "UnknownOutput";
    case RejectReason::DuplicateOutput: return "DuplicateOutput";
    case RejectReason::RingSignature: return "RingSignature";
    case RejectReason::DoubleSpend: return "DoubleSpend";
    case RejectReason::RangeProof: return "RangeProof";
    case RejectReason::BalanceProof: return "BalanceProof";
    case RejectReason::InsufficientFunds: return "InsufficientFunds";
    case RejectReason::StaleSequence: return "StaleSequence";
    case RejectReason::PolicyDenied: return "PolicyDenied";
    case RejectReason::CredentialReused: return "CredentialReused";
  }
  return "?";
}

inline RejectReason parse_reject_reason(std::string_view s) {
  for (auto r : kAllRejectReasons)
    if (to_string(r) == s) return r;
  throw std::invalid_argument("unknown reject reason '" + std::string(s) + "'");
}

struct Verdict {
  std::optional<RejectReason> reason;
  std::optional<DenyReason> deny;  // set with PolicyDenied
  std::string detail;

  bool accepted() const { return !reason; }
  static Verdict accept() { return {}; }
  static Verdict reject(RejectReason r, std::string detail = {}) { return {r, std::nullopt, std::move(detail)}; }
  friend bool operator==(const Verdict& a, const Verdict& b) { return a.reason == b.reason && a.deny == b.deny; }
};

inline std::string to_string(const Verdict& v) {
  if (v.accepted()) return "accept";
  if (v.reason == RejectReason::PolicyDenied && v.deny) return "deny(" + std::string(to_string(*v.deny)) + ")";
  return "reject(" + std::string(to_string(*v.reason)) + ")";
}

using PolicyHook = std::function<PolicyVerdict(const LedgerState&, const Transaction&)>;

/// Memo of stateless checks (ring signatures, range proofs, kernels) keyed
/// by the transaction bytes plus the ring members they were checked against.
/// Holding a result here never changes a verdict; it only skips recomputation.
class VerificationCache {
public:
  bool contains(const Digest& key) const {
    std::lock_guard lock(mu_);
    return ok_.count(key) != 0;
  }
  void insert(const Digest& key) {
    std::lock_guard lock(mu_);
    ok_.insert(key);
  }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return ok_.size();
  }

private:
  mutable std::mutex mu_;
  std::set<Digest> ok_;
};

struct ValidationContext {
  GroupPtr group;
  unsigned range_bits = kDefaultRangeBits;
  const Registry* registry = nullptr;
  PolicyHook policy;  // empty means allow
  std::shared_ptr<VerificationCache> cache;
};

namespace detail {

inline std::optional<std::string> check_shape(const ValidationContext& ctx, const Transaction& tx) {
  const auto nti = tx.transparent_inputs.size(), nto = tx.transparent_outputs.size();
  const auto nsi = tx.shielded_inputs.size(), nso = tx.shielded_outputs.size();
  const auto nk = tx.kernels.size();
  switch (tx.kind) {
    case TxKind::Issue:
      if (nti || nsi || nso || !nto || nk || tx.fee || tx.actor.empty()) return "issue mints into accounts only";
      break;
    case TxKind::TransparentTransfer:
      if (!nti || !nto || nsi || nso || nk) return "transparent transfer has account legs only";
      break;
    case TxKind::Shield:
      if (!nti || nto || nsi || !nso || !nk) return "shield moves account funds into outputs";
      break;
    case TxKind::Unshield:
      if (nti || !nto || !nsi || !nk) return "unshield spends outputs into accounts";
      break;
    case TxKind::ShieldedTransfer:
      if (nti || nto || !nsi || !nso || !nk) return "shielded transfer has shielded legs only";
      break;
    case TxKind::MediatedBatch:
      if (nti || nto || nsi < 2 || nso < 2 || nk < 2 || tx.actor.empty())
        return "batch needs two participants, shielded legs and an intermediary";
      break;
    default: return "unknown kind";
  }
  const Group& g = *ctx.group;
  std::set<std::string> seen_accounts;
  for (const auto& in : tx.transparent_inputs)
    if (!seen_accounts.insert(in.account).second) return "account debited twice";
  for (const auto& in : tx.shielded_inputs) {
    if (in.ring.empty()) return "empty ring";
    for (std::size_t i = 1; i < in.ring.size(); ++i)
      if (in.ring[i] <= in.ring[i - 1]) return "ring not strictly increasing";
    if (in.signature.responses.size() != 2 * in.ring.size()) return "signature size does not match ring";
  }
  for (const auto& out : tx.shielded_outputs)
    if (out.range.bits.size() != ctx.range_bits) return "range proof width";
  for (const auto& c : tx.credentials)
    if (c.serial.size() != kSerialSize) return "credential serial size";

  // Amount sums must stay below the group order for the commitment equation
  // to mean what it says.
  unsigned __int128 total = tx.fee;
  for (const auto& in : tx.transparent_inputs) total += in.amount;
  for (const auto& out : tx.transparent_outputs) total += out.amount;
  total += static_cast<unsigned __int128>(nsi + nso) << ctx.range_bits;
  if (total >> 62 || !g.scalar_fits(static_cast<std::uint64_t>(total))) return "amounts too large for the group";
  return std::nullopt;
}

inline Digest cache_key(const Group& g, const Transaction& tx, const LedgerState& s) {
  Transcript t(tags::kTransaction);
  t.absorb("verified").absorb(encode_wire(g, tx));
  for (const auto& in : tx.shielded_inputs)
    for (auto idx : in.ring) {
      const auto& o = s.outputs[idx];
      t.absorb(g.encode(o.address)).absorb(g.encode(o.commitment.point));
    }
  return t.finish_digest();
}

inline Element amount_power(const Group& g, __int128 v) {
  if (v >= 0) return g.pow(g.amount_base(), g.scalar(static_cast<std::uint64_t>(v)));
  return g.inverse(g.pow(g.amount_base(), g.scalar(static_cast<std::uint64_t>(-v))));
}

}  // namespace detail

/// Pure function of (state, tx, policy). Clause order: shape, references,
/// ring signatures, key images, output uniqueness, range proofs, balance,
/// funds, policy, credential serials.
inline Verdict validate_transaction(const ValidationContext& ctx, const LedgerState& state, const Transaction& tx) {
  const Group& g = *ctx.group;
  if (auto why = detail::check_shape(ctx, tx)) return Verdict::reject(RejectReason::Malformed, *why);

  // References.
  if (!tx.actor.empty()) {
    if (!ctx.registry->has_entity(tx.actor)) return Verdict::reject(RejectReason::Malformed, "unknown actor");
    if (tx.kind == TxKind::MediatedBatch && ctx.registry->entity(tx.actor).kind != EntityKind::Intermediary)
      return Verdict::reject(RejectReason::Malformed, "batch actor is not an intermediary");
  }
  for (const auto& in : tx.transparent_inputs)
    if (!ctx.registry->has_account(in.account)) return Verdict::reject(RejectReason::UnknownAccount, in.account);
  for (const auto& out : tx.transparent_outputs) {
    if (!ctx.registry->has_account(out.account)) return Verdict::reject(RejectReason::UnknownAccount, out.account);
    if (ctx.registry->lookup_account(out.account).owner != out.owner)
      return Verdict::reject(RejectReason::UnknownAccount, "owner mismatch for " + out.account);
  }
  for (const auto& in : tx.shielded_inputs)
    if (in.ring.back() >= state.outputs.size()) return Verdict::reject(RejectReason::UnknownOutput);

  const Digest digest = tx_digest(g, tx);
  const Bytes message(digest.bytes.begin(), digest.bytes.end());
  std::optional<Digest> key;
  bool cached = false;
  if (ctx.cache) {
    key = detail::cache_key(g, tx, state);
    cached = ctx.cache->contains(*key);
  }

  if (!cached) {
    for (const auto& in : tx.shielded_inputs) {
      std::vector<Element> addresses;
      std::vector<Commitment> commitments;
      for (auto idx : in.ring) {
        addresses.push_back(state.outputs[idx].address);
        commitments.push_back(state.outputs[idx].commitment);
      }
      if (!spend_verify(g, message, addresses, commitments, in.pseudo, in.signature))
        return Verdict::reject(RejectReason::RingSignature);
    }
  }

  {
    std::set<Bytes> images;
    for (const auto& in : tx.shielded_inputs) {
      Bytes ki = g.encode(in.signature.key_image);
      if (state.key_images.count(ki) || !images.insert(ki).second) return Verdict::reject(RejectReason::DoubleSpend);
    }
  }
  {
    std::set<Bytes> fresh;
    for (const auto& out : tx.shielded_outputs) {
      Bytes p = g.encode(out.address);
      if (state.addresses.count(p) || !fresh.insert(p).second) return Verdict::reject(RejectReason::DuplicateOutput);
    }
  }

  if (!cached) {
    for (const auto& out : tx.shielded_outputs)
      if (!verify_range(g, out.commitment, out.range, ctx.range_bits)) return Verdict::reject(RejectReason::RangeProof);

    __int128 net = -static_cast<__int128>(tx.fee);
    for (const auto& in : tx.transparent_inputs) net += in.amount;
    for (const auto& out : tx.transparent_outputs) net -= out.amount;
    if (tx.kind == TxKind::Issue) {
      // Minting: only the transparent outputs exist.
    } else if (tx.kernels.empty()) {
      if (net != 0) return Verdict::reject(RejectReason::BalanceProof, "transparent amounts do not balance");
    } else {
      Element lhs = detail::amount_power(g, net);
      for (const auto& in : tx.shielded_inputs) lhs = g.op(lhs, in.pseudo.point);
      for (const auto& out : tx.shielded_outputs) lhs = g.op(lhs, g.inverse(out.commitment.point));
      Element rhs = g.identity();
      for (const auto& k : tx.kernels) {
        if (!verify_kernel(g, k, digest)) return Verdict::reject(RejectReason::BalanceProof, "kernel signature");
        rhs = g.op(rhs, k.excess);
      }
      if (lhs != rhs) return Verdict::reject(RejectReason::BalanceProof);
    }
    if (ctx.cache) ctx.cache->insert(*key);
  }

  for (const auto& in : tx.transparent_inputs) {
    if (in.sequence != state.sequence(in.account)) return Verdict::reject(RejectReason::StaleSequence, in.account);
    if (state.balance(in.account) < in.amount) return Verdict::reject(RejectReason::InsufficientFunds, in.account);
  }

  if (ctx.policy) {
    try {
      auto pv = ctx.policy(state, tx);
      if (!pv.allowed()) return {RejectReason::PolicyDenied, pv.deny, {}};
    } catch (const PolicyError& e) {
      return Verdict::reject(RejectReason::Malformed, e.what());
    }
  }

  {
    std::set<Bytes> serials;
    for (const auto& c : tx.credentials)
      if (state.serials.count(c.serial) || !serials.insert(c.serial).second)
        return Verdict::reject(RejectReason::CredentialReused);
  }
  return Verdict::accept();
}

/// Applies an already validated transaction. Throws std::logic_error when
/// the transaction could not have passed validation against this state.
inline void apply_transaction(const Group& g, LedgerState& state, const Transaction& tx) {
  for (const auto& in : tx.transparent_inputs)
    if (state.balance(in.account) < in.amount || state.sequence(in.account) != in.sequence)
      throw std::logic_error("apply_transaction called on an unvalidated transaction");
  const Digest id = tx_digest(g, tx);
  for (const auto& in : tx.transparent_inputs) {
    state.balances[in.account] -= in.amount;
    ++state.sequences[in.account];
  }
  for (const auto& out : tx.transparent_outputs) {
    state.balances[out.account] += out.amount;
    if (tx.kind == TxKind::Issue) state.issued += out.amount;
  }
  for (const auto& out : tx.shielded_outputs) {
    state.addresses.insert(g.encode(out.address));
    state.outputs.push_back({out.address, out.ephemeral, out.commitment, out.encrypted_amount, state.height + 1, id});
  }
  for (const auto& in : tx.shielded_inputs) state.key_images.insert(g.encode(in.signature.key_image));
  for (const auto& c : tx.credentials) state.serials.insert(c.serial);
  if (tx.fee) state.fees[tx.actor.empty() ? kNetworkFeeCollector : tx.actor] += tx.fee;
}

struct Block {
  std::uint64_t height = 0;
  std::vector<Transaction> txs;
  Digest parent;
  std::string proposer;
};

inline Digest block_digest(const Group& g, const Block& b) {
  Transcript t(tags::kBlock);
  t.absorb_u64(b.height).absorb(b.parent.view()).absorb(b.proposer).absorb_u64(b.txs.size());
  for (const auto& tx : b.txs) t.absorb(wire_digest(g, tx).view());
  return t.finish_digest();
}

/// Validates every transaction against the state left by its predecessors
/// and applies the block atomically. On failure the state is untouched and
/// the first failing transaction's verdict is returned.
inline Verdict apply_block(const ValidationContext& ctx, LedgerState& state, const Block& block,
                           std::size_t* failed_index = nullptr) {
  if (block.height != state.height + 1) return Verdict::reject(RejectReason::Malformed, "block height");
  LedgerState next = state;
  for (std::size_t i = 0; i < block.txs.size(); ++i) {
    Verdict v = validate_transaction(ctx, next, block.txs[i]);
    if (!v.accepted()) {
      if (failed_index) *failed_index = i;
      return v;
    }
    apply_transaction(*ctx.group, next, block.txs[i]);
  }
  next.height = block.height;
  state = std::move(next);
  return Verdict::accept();
}

}  // namespace pvx
