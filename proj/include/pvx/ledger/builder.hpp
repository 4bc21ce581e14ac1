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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvx/entityreg/registry.hpp"
#include "pvx/ledger/state.hpp"
#include "pvx/ledger/transaction.hpp"
#include "pvx/rng.hpp"

namespace pvx {

// ---------------------------------------------------------------------------
// Decoy selection

/// Picks the other ring members for a spend. Returned rings are sorted and
/// contain the true index exactly once.
class DecoySampler {
public:
  virtual ~DecoySampler() = default;
  virtual std::string_view name() const = 0;
  virtual std::uint64_t draw(std::uint64_t population, Rng& rng) const = 0;

  std::vector<std::uint64_t> ring(std::uint64_t true_index, std::uint64_t population, std::size_t size,
                                  Rng& rng) const {
    if (size == 0 || size > population) throw std::invalid_argument("ring larger than the output population");
    std::set<std::uint64_t> members = {true_index};
    std::uint64_t attempts = 0;
    while (members.size() < size && attempts < 64 * population + 64) {
      members.insert(draw(population, rng));
      ++attempts;
    }
    // Skewed samplers can stall on tiny populations; top up uniformly.
    while (members.size() < size) members.insert(rng.below(population));
    return {members.begin(), members.end()};
  }
};

class UniformSampler final : public DecoySampler {
public:
  std::string_view name() const override { return "uniform"; }
  std::uint64_t draw(std::uint64_t population, Rng& rng) const override { return rng.below(population); }
};

/// Index floor(N * u^gamma): decoys cluster on old outputs, so the true
/// (usually recent) member tends to be the newest one in its ring.
class AgeBiasedSampler final : public DecoySampler {
public:
  explicit AgeBiasedSampler(double gamma = 2.0) : gamma_(gamma) {}
  std::string_view name() const override { return "age-biased"; }
  std::uint64_t draw(std::uint64_t population, Rng& rng) const override {
    auto idx = static_cast<std::uint64_t>(static_cast<double>(population) * std::pow(rng.unit(), gamma_));
    return std::min(idx, population - 1);
  }

private:
  double gamma_;
};

inline std::unique_ptr<DecoySampler> make_sampler(std::string_view name) {
  if (name == "uniform") return std::make_unique<UniformSampler>();
  if (name == "age-biased") return std::make_unique<AgeBiasedSampler>();
  throw std::invalid_argument("unknown decoy sampler '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Wallets

struct OwnedOutput {
  std::uint64_t index = 0;
  std::uint64_t value = 0;
  Scalar blinding;
  Scalar spend_secret;
  Bytes key_image;
};

/// Private-store holder: a stealth keypair plus the outputs it has found.
class Wallet {
public:
  Wallet() = default;
  Wallet(std::string owner, StealthKeypair keys) : owner_(std::move(owner)), keys_(keys) {}

  const std::string& owner() const { return owner_; }
  const StealthKeypair& keys() const { return keys_; }
  StealthAddress address() const { return keys_.address(); }

  /// Picks up outputs addressed to this wallet that appeared since the last scan.
  void scan(const Group& g, const LedgerState& state) {
    for (; scanned_ < state.outputs.size(); ++scanned_) {
      const auto& o = state.outputs[scanned_];
      auto offset = scan_output(g, keys_.scan_secret, keys_.spend_public, o.ephemeral, o.address);
      if (!offset) continue;
      auto secrets = derive_output_secrets(g, g.pow(o.ephemeral, keys_.scan_secret));
      std::uint64_t value = o.encrypted_amount ^ secrets.amount_mask;
      if (!g.scalar_fits(value) || !verify_opening(g, o.commitment, value, secrets.blinding)) continue;
      Scalar x = g.add(*offset, keys_.spend_secret);
      outputs_.push_back({scanned_, value, secrets.blinding, x, g.encode(key_image(g, o.address, x))});
    }
  }

  std::vector<OwnedOutput> unspent(const LedgerState& state) const {
    std::vector<OwnedOutput> out;
    for (const auto& o : outputs_)
      if (!state.key_images.count(o.key_image)) out.push_back(o);
    return out;
  }

  std::uint64_t balance(const LedgerState& state) const {
    std::uint64_t total = 0;
    for (const auto& o : unspent(state)) total += o.value;
    return total;
  }

  const std::vector<OwnedOutput>& outputs() const { return outputs_; }

private:
  std::string owner_;
  StealthKeypair keys_;
  std::vector<OwnedOutput> outputs_;
  std::size_t scanned_ = 0;
};

// ---------------------------------------------------------------------------
// Building

enum class BuildFailure : std::uint8_t { InsufficientFunds, UnknownRecipient, RingPopulation };

inline std::string_view to_string(BuildFailure f) {
  switch (f) {
    case BuildFailure::InsufficientFunds: return "InsufficientFunds";
    case BuildFailure::UnknownRecipient: return "UnknownRecipient";
    case BuildFailure::RingPopulation: return "RingPopulation";
  }
  return "?";
}

class BuildError : public std::runtime_error {
public:
  BuildError(BuildFailure f, const std::string& what) : std::runtime_error(what), failure(f) {}
  BuildFailure failure;
};

struct BuildContext {
  GroupPtr group;
  unsigned range_bits = kDefaultRangeBits;
  const LedgerState* state = nullptr;
  const Registry* registry = nullptr;
  const DecoySampler* sampler = nullptr;
  std::size_t ring_size = 11;
};

/// Opening of an output the builder created, for the harness.
struct CreatedOutput {
  std::size_t position = 0;  // within tx.shielded_outputs
  std::uint64_t value = 0;
  Scalar blinding;
};

/// One sender's contribution to a mediated batch.
struct BatchLeg {
  Wallet* payer = nullptr;
  StealthAddress recipient;
  std::uint64_t amount = 0;
  std::uint64_t fee = 0;
};

struct PaymentIntent {
  TxKind kind = TxKind::TransparentTransfer;
  std::string actor;                       // issuer for Issue, intermediary for MediatedBatch
  std::optional<std::string> from_account;
  Wallet* payer = nullptr;                 // store-sourced kinds
  std::optional<std::string> to_account;
  std::optional<StealthAddress> to_stealth;
  std::uint64_t amount = 0;
  std::uint64_t fee = 0;
  std::vector<BatchLeg> legs;
  std::vector<Credential> credentials;
};

namespace detail {

struct PendingInput {
  OwnedOutput coin;
  std::vector<std::uint64_t> ring;
  std::size_t position = 0;
  Scalar pseudo_blinding;
  std::size_t participant = 0;
};

struct PendingOutput {
  ShieldedOutput output;
  std::uint64_t value = 0;
  Scalar blinding;
  std::size_t participant = 0;
};

class Assembler {
public:
  Assembler(const BuildContext& ctx, Rng& rng) : ctx_(ctx), g_(*ctx.group), rng_(rng) {}

  Scalar nonzero_scalar() {
    for (;;) {
      Scalar s = random_scalar(g_, rng_);
      if (!g_.is_zero(s)) return s;
    }
  }

  void spend(Wallet& payer, std::uint64_t need, std::size_t participant, std::uint64_t& selected) {
    auto coins = payer.unspent(*ctx_.state);
    selected = 0;
    const std::uint64_t population = ctx_.state->outputs.size();
    if (ctx_.ring_size > population)
      throw BuildError(BuildFailure::RingPopulation, "ring size " + std::to_string(ctx_.ring_size) +
                                                         " exceeds the " + std::to_string(population) + " outputs");
    for (const auto& coin : coins) {
      if (selected >= need && selected > 0) break;
      PendingInput in;
      in.coin = coin;
      in.ring = ctx_.sampler->ring(coin.index, population, ctx_.ring_size, rng_);
      in.position = static_cast<std::size_t>(std::find(in.ring.begin(), in.ring.end(), coin.index) - in.ring.begin());
      in.pseudo_blinding = random_scalar(g_, rng_);
      in.participant = participant;
      inputs_.push_back(std::move(in));
      selected += coin.value;
    }
    if (selected < need || selected == 0)
      throw BuildError(BuildFailure::InsufficientFunds,
                       payer.owner() + " holds " + std::to_string(selected) + " in private, needs " + std::to_string(need));
  }

  void pay(const StealthAddress& to, std::uint64_t value, std::size_t participant) {
    if (value >> ctx_.range_bits)
      throw std::out_of_range("output amount " + std::to_string(value) + " exceeds the range-proof width");
    auto keys = make_onetime_output(g_, to, nonzero_scalar());
    auto secrets = derive_output_secrets(g_, keys.shared_secret);
    PendingOutput p;
    p.output.address = keys.one_time_address;
    p.output.ephemeral = keys.ephemeral_public;
    p.output.commitment = commit(g_, value, secrets.blinding);
    p.output.encrypted_amount = value ^ secrets.amount_mask;
    p.output.range = prove_range(g_, value, secrets.blinding, ctx_.range_bits);
    p.value = value;
    p.blinding = secrets.blinding;
    p.participant = participant;
    outputs_.push_back(std::move(p));
  }

  void shuffle() {
    rng_.shuffle(inputs_);
    rng_.shuffle(outputs_);
  }

  /// Fills shielded legs, then signs spends and one kernel per participant.
  void finish(Transaction& tx, std::size_t participants, std::vector<CreatedOutput>* created) {
    for (const auto& in : inputs_) {
      ShieldedInput si;
      si.ring = in.ring;
      si.pseudo = commit(g_, in.coin.value, in.pseudo_blinding);
      si.signature.key_image = g_.decode_element(in.coin.key_image);
      tx.shielded_inputs.push_back(std::move(si));
    }
    for (std::size_t i = 0; i < outputs_.size(); ++i) {
      tx.shielded_outputs.push_back(outputs_[i].output);
      if (created) created->push_back({i, outputs_[i].value, outputs_[i].blinding});
    }
    const Digest digest = tx_digest(g_, tx);
    const Bytes message(digest.bytes.begin(), digest.bytes.end());
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
      const auto& in = inputs_[i];
      std::vector<Element> addresses;
      std::vector<Commitment> commitments;
      for (auto idx : in.ring) {
        addresses.push_back(ctx_.state->outputs[idx].address);
        commitments.push_back(ctx_.state->outputs[idx].commitment);
      }
      tx.shielded_inputs[i].signature =
          spend_sign(g_, message, addresses, commitments, tx.shielded_inputs[i].pseudo, in.position,
                     in.coin.spend_secret, g_.sub(in.coin.blinding, in.pseudo_blinding));
    }
    for (std::size_t p = 0; p < participants; ++p) {
      Scalar z = g_.zero();
      for (const auto& in : inputs_)
        if (in.participant == p) z = g_.add(z, in.pseudo_blinding);
      for (const auto& out : outputs_)
        if (out.participant == p) z = g_.sub(z, out.blinding);
      tx.kernels.push_back(sign_kernel(g_, z, digest));
    }
  }

private:
  const BuildContext& ctx_;
  const Group& g_;
  Rng& rng_;
  std::vector<PendingInput> inputs_;
  std::vector<PendingOutput> outputs_;
};

inline const Account& debit_account(const BuildContext& ctx, const std::string& id, std::uint64_t need) {
  const Account& acct = ctx.registry->lookup_account(id);
  if (ctx.state->balance(id) < need)
    throw BuildError(BuildFailure::InsufficientFunds,
                     id + " holds " + std::to_string(ctx.state->balance(id)) + ", needs " + std::to_string(need));
  return acct;
}

inline const Account& credit_account(const BuildContext& ctx, const std::optional<std::string>& id) {
  if (!id || !ctx.registry->has_account(*id)) throw BuildError(BuildFailure::UnknownRecipient, "unknown account");
  return ctx.registry->lookup_account(*id);
}

inline const StealthAddress& credit_store(const std::optional<StealthAddress>& to) {
  if (!to) throw BuildError(BuildFailure::UnknownRecipient, "no stealth address for recipient");
  return *to;
}

}  // namespace detail

/// Builds a signed transaction for an intent. Shielded spenders always get a
/// change output, possibly of zero. `created` receives openings of the new
/// shielded outputs.
inline Transaction build_transaction(const BuildContext& ctx, const PaymentIntent& intent, Rng& rng,
                                     std::vector<CreatedOutput>* created = nullptr) {
  Transaction tx;
  tx.kind = intent.kind;
  tx.fee = intent.fee;
  tx.credentials = intent.credentials;
  detail::Assembler as(ctx, rng);
  auto need_payer = [&]() -> Wallet& {
    if (!intent.payer) throw std::invalid_argument(std::string(to_string(intent.kind)) + " needs a paying store");
    return *intent.payer;
  };
  auto need_source = [&]() -> const std::string& {
    if (!intent.from_account) throw std::invalid_argument(std::string(to_string(intent.kind)) + " needs a source account");
    return *intent.from_account;
  };

  switch (intent.kind) {
    case TxKind::Issue: {
      const Account& to = detail::credit_account(ctx, intent.to_account);
      tx.actor = intent.actor;
      tx.fee = 0;
      tx.transparent_outputs.push_back({to.id, intent.amount, to.owner});
      break;
    }
    case TxKind::TransparentTransfer: {
      const Account& from = detail::debit_account(ctx, need_source(), intent.amount + intent.fee);
      const Account& to = detail::credit_account(ctx, intent.to_account);
      tx.actor = from.institution;
      tx.transparent_inputs.push_back({from.id, intent.amount + intent.fee, ctx.state->sequence(from.id)});
      tx.transparent_outputs.push_back({to.id, intent.amount, to.owner});
      break;
    }
    case TxKind::Shield: {
      const Account& from = detail::debit_account(ctx, need_source(), intent.amount + intent.fee);
      const StealthAddress& to = detail::credit_store(intent.to_stealth);
      tx.actor = from.institution;
      tx.transparent_inputs.push_back({from.id, intent.amount + intent.fee, ctx.state->sequence(from.id)});
      as.pay(to, intent.amount, 0);
      as.finish(tx, 1, created);
      break;
    }
    case TxKind::Unshield: {
      Wallet& payer = need_payer();
      const Account& to = detail::credit_account(ctx, intent.to_account);
      tx.actor = to.institution;
      tx.transparent_outputs.push_back({to.id, intent.amount, to.owner});
      std::uint64_t selected = 0;
      as.spend(payer, intent.amount + intent.fee, 0, selected);
      as.pay(payer.address(), selected - intent.amount - intent.fee, 0);
      as.finish(tx, 1, created);
      break;
    }
    case TxKind::ShieldedTransfer: {
      Wallet& payer = need_payer();
      const StealthAddress& to = detail::credit_store(intent.to_stealth);
      std::uint64_t selected = 0;
      as.spend(payer, intent.amount + intent.fee, 0, selected);
      as.pay(to, intent.amount, 0);
      as.pay(payer.address(), selected - intent.amount - intent.fee, 0);
      as.shuffle();
      as.finish(tx, 1, created);
      break;
    }
    case TxKind::MediatedBatch: {
      if (intent.legs.size() < 2) throw std::invalid_argument("a batch needs at least two legs");
      tx.actor = intent.actor;
      tx.fee = 0;
      // Legs from the same payer share one kernel. Participants are ordered
      // by owner id so the build does not depend on object addresses.
      std::map<std::string, Wallet*> payers;
      for (const auto& leg : intent.legs) {
        if (!leg.payer) throw std::invalid_argument("batch leg without payer");
        payers.emplace(leg.payer->owner(), leg.payer);
      }
      std::map<std::string, std::size_t> participant;
      for (const auto& [owner, w] : payers) participant.emplace(owner, participant.size());
      std::map<std::string, std::uint64_t> owed, selected;
      for (const auto& leg : intent.legs) {
        owed[leg.payer->owner()] += leg.amount + leg.fee;
        tx.fee += leg.fee;
      }
      for (const auto& [owner, w] : payers) as.spend(*w, owed[owner], participant[owner], selected[owner]);
      for (const auto& leg : intent.legs) as.pay(leg.recipient, leg.amount, participant[leg.payer->owner()]);
      for (const auto& [owner, w] : payers) as.pay(w->address(), selected[owner] - owed[owner], participant[owner]);
      as.shuffle();
      as.finish(tx, participant.size(), created);
      break;
    }
  }
  return tx;
}

}  // namespace pvx
