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

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pvx/consensus.hpp"
#include "pvx/ledger.hpp"
#include "pvx/observer.hpp"
#include "pvx/policy/hook.hpp"
#include "pvx/policy/matrix.hpp"
#include "pvx/scenario/document.hpp"
#include "pvx/scenario/report.hpp"

namespace pvx {

struct RunOptions {
  std::optional<std::uint64_t> seed;          // overrides consensus.seed
  std::uint64_t retry_us = 1'000'000;         // virtual wait before resubmitting elsewhere
  std::size_t max_attempts = 30;
  std::uint64_t sync_timeout_us = 5'000'000;  // wait for honest replicas to catch up
};

/// Runs one scenario end to end. The runner owns the registry, the rule
/// set, every wallet and the simulated federation; it mutates the registry
/// and rules only while no block is in flight.
class ScenarioRunner {
public:
  explicit ScenarioRunner(Scenario sc, RunOptions opt = {})
      : sc_(std::move(sc)), opt_(opt), seed_(opt.seed.value_or(sc_.consensus.seed)), group_(make_group(sc_.profile)),
        rng_(seed_ ^ 0x5bd1e9955bd1e995ULL), sampler_(make_sampler(sc_.sampler)) {
    try {
      setup_registry();
      setup_genesis();
    } catch (const RegistryError& e) {
      throw ScenarioError("/entities", e.what());
    }
    vctx_.group = group_;
    vctx_.range_bits = sc_.range_bits;
    vctx_.registry = &registry_;
    vctx_.policy = make_policy_hook(group_, registry_, rules_);
    vctx_.cache = std::make_shared<VerificationCache>();

    WorldConfig wc;
    wc.n = sc_.consensus.n;
    wc.f = sc_.consensus.f;
    wc.seed = seed_;
    wc.net.delay_us = sc_.consensus.delay_us;
    wc.net.jitter_us = sc_.consensus.jitter_us;
    wc.net.drop = sc_.consensus.drop;
    wc.net.partitions = sc_.consensus.partitions;
    wc.base_timeout_us = sc_.consensus.base_timeout_us;
    wc.backoff = sc_.consensus.backoff;
    wc.retransmit_us = sc_.consensus.retransmit_us;
    wc.max_block_txs = sc_.consensus.max_block_txs;
    wc.institutions = sc_.consensus.nodes;
    wc.faults.resize(wc.n);
    for (const auto& [node, scripts] : sc_.consensus.faults)
      for (const auto& s : scripts) apply_fault_script(wc.faults[node], s);
    world_ = std::make_unique<World>(wc, vctx_, genesis_);
    while (!world_->honest(ref_)) ++ref_;
    world_->on_commit([this](NodeId node, const Block& b, const LedgerState& s) {
      if (node == ref_) on_reference_commit(b, s);
    });

    bctx_.group = group_;
    bctx_.range_bits = sc_.range_bits;
    bctx_.state = &world_->replica(ref_).state();
    bctx_.registry = &registry_;
    bctx_.sampler = sampler_.get();
    bctx_.ring_size = sc_.ring_size;
    scan_all(genesis_);
  }

  ScenarioRunner(const ScenarioRunner&) = delete;
  ScenarioRunner& operator=(const ScenarioRunner&) = delete;

  RunResult run() {
    RunResult r;
    r.name = sc_.name;
    r.mode = sc_.mode;
    r.seed = seed_;
    for (std::size_t i = 0; i < sc_.steps.size(); ++i) {
      StepResult sr = execute(sc_.steps[i], i);
      sr.index = i;
      sr.op = std::string(to_string(sc_.steps[i].op));
      sr.label = sc_.steps[i].label;
      sr.expected = sc_.steps[i].expect;
      sr.matched = !sr.expected || *sr.expected == sr.outcome;
      sr.height = state().height;
      if (!sr.matched)
        r.mismatches.push_back("step " + std::to_string(i) + " (" + sc_.steps[i].pointer + "): expected " +
                               *sr.expected + ", got " + sr.outcome);
      r.steps.push_back(std::move(sr));
    }
    sync();
    finish(r);
    return r;
  }

  const Scenario& scenario() const { return sc_; }
  const Group& group() const { return *group_; }
  GroupPtr group_ptr() const { return group_; }
  const Registry& registry() const { return registry_; }
  const LedgerState& genesis() const { return genesis_; }
  const World& world() const { return *world_; }
  NodeId reference() const { return ref_; }
  const LedgerState& state() const { return world_->replica(ref_).state(); }
  const Chain& chain() const { return world_->replica(ref_).chain(); }
  std::vector<const Wallet*> wallets() const {
    std::vector<const Wallet*> out;
    for (const auto& [id, w] : wallets_) out.push_back(&w);
    return out;
  }

private:
  struct Submission {
    std::string outcome;
    bool committed = false;
    std::string detail;
  };
  struct Labelled {
    Transaction tx;
    std::vector<CreatedOutput> created;
    LedgerState before;
    bool committed = false;
  };
  struct IssuedCredential {
    Credential credential;
    std::string holder;
  };

  static constexpr const char* kDecoyWallet = "~decoys";

  // -------------------------------------------------------------------------
  // Setup

  void setup_registry() {
    const Group& g = *group_;
    for (const auto& e : sc_.entities) registry_.register_entity({e.id, e.kind});
    for (const auto& e : sc_.entities) {
      for (const auto& a : e.accounts) registry_.open_account(a.id, a.at, e.id);
      if (e.wallet) {
        auto& w = wallets_[e.id] = Wallet(e.id, derive_stealth_keypair(g, as_bytes("store:" + e.id)));
        if (e.publish) registry_.publish_stealth(e.id, w.address());
      }
      if (e.issuer) {
        issuers_[e.id] = derive_issuer_keypair(g, as_bytes("issuer:" + e.id));
        registry_.register_issuer(e.id, issuers_[e.id].public_key);
      }
      if (e.fee) registry_.set_fee(e.id, *e.fee);
    }
    rules_.mode = sc_.mode;
    rules_.threshold = sc_.threshold;
    for (const auto& id : sc_.blacklist) update_blacklist(rules_, registry_, id, true);
  }

  void genesis_output(const StealthAddress& to, std::uint64_t value) {
    const Group& g = *group_;
    Scalar e;
    do e = random_scalar(g, rng_);
    while (g.is_zero(e));
    auto keys = make_onetime_output(g, to, e);
    auto secrets = derive_output_secrets(g, keys.shared_secret);
    OutputRecord rec{keys.one_time_address, keys.ephemeral_public, commit(g, value, secrets.blinding),
                     value ^ secrets.amount_mask, 0, Digest{}};
    genesis_.addresses.insert(g.encode(rec.address));
    genesis_.outputs.push_back(std::move(rec));
  }

  /// Allocations are written straight into the genesis state in both modes.
  void setup_genesis() {
    for (const auto& e : sc_.genesis) {
      if (e.account) genesis_.balances[*e.account] += e.amount;
      if (e.store) genesis_output(wallets_.at(*e.store).address(), e.amount);
      genesis_.issued += e.amount;
    }
    if (sc_.decoys) {
      auto& pool = wallets_[kDecoyWallet] = Wallet(kDecoyWallet, derive_stealth_keypair(*group_, as_bytes(kDecoyWallet)));
      for (std::uint64_t i = 0; i < sc_.decoys; ++i) genesis_output(pool.address(), 0);
    }
  }

  void scan_all(const LedgerState& s) {
    for (auto& [id, w] : wallets_) w.scan(*group_, s);
  }

  void on_reference_commit(const Block& b, const LedgerState& s) {
    for (const auto& tx : b.txs) committed_.insert(wire_digest(*group_, tx));
    scan_all(s);
    auto a = conservation_audit(*group_, s, collect_openings(wallets()));
    ++audit_.blocks;
    if (!a.ok && audit_.failures++ == 0)
      audit_.first_failure = "height " + std::to_string(s.height) + ": " + a.detail;
  }

  // -------------------------------------------------------------------------
  // Consensus plumbing

  std::uint64_t now() const { return world_->now(); }

  void sync() {
    const std::uint64_t h = state().height;
    world_->run_until(
        [&] {
          for (NodeId i = 0; i < world_->size(); ++i)
            if (world_->honest(i) && world_->replica(i).last_executed() < h) return false;
          return true;
        },
        now() + opt_.sync_timeout_us);
  }

  /// Honest replicas level with the reference, the requested node first.
  std::vector<NodeId> targets(std::optional<NodeId> node) const {
    std::vector<NodeId> out;
    if (node) out.push_back(*node);
    const auto h = state().height;
    for (NodeId i = 0; i < world_->size(); ++i) {
      NodeId k = static_cast<NodeId>((ref_ + i) % world_->size());
      if (world_->honest(k) && world_->replica(k).last_executed() == h && (!node || k != *node)) out.push_back(k);
    }
    return out;
  }

  /// Submits like a patient client: wait for a commit or a rejection,
  /// resubmitting to the next node when neither shows up in time.
  Submission submit(const Transaction& tx, std::optional<NodeId> node) {
    const Digest id = wire_digest(*group_, tx);
    std::size_t seen = world_->rejections().size();
    std::optional<Verdict> verdict;
    // A replay of a committed transaction can only end in a rejection.
    const bool replay = committed_.count(id) != 0;
    // Only the contacted replica's verdict counts: it is level with the
    // reference, while a lagging backup may refuse a relayed copy against
    // stale state even though the primary goes on to commit it.
    NodeId contact = 0;
    auto settled = [&] {
      if (!replay && committed_.count(id)) return true;
      const auto& rj = world_->rejections();
      for (; seen < rj.size(); ++seen)
        if (rj[seen].tx == id && rj[seen].node == contact) {
          verdict = rj[seen].verdict;
          return true;
        }
      return false;
    };
    const auto nodes = targets(node);
    bool done = false;
    for (std::size_t attempt = 0; attempt < opt_.max_attempts && !done; ++attempt) {
      contact = nodes[attempt % nodes.size()];
      world_->submit_client_tx(contact, tx);
      done = world_->run_until(settled, now() + opt_.retry_us);
    }
    if (!done) return {"timeout", false, "no commit after " + std::to_string(opt_.max_attempts) + " submissions"};
    if (!verdict) {
      sync();
      return {"accept", true, {}};
    }
    return {to_string(*verdict), false, verdict->detail};
  }

  // -------------------------------------------------------------------------
  // Steps

  StepResult execute(const Step& s, std::size_t index) {
    switch (s.op) {
      case StepOp::Pay: return pay(s);
      case StepOp::Replay: {
        auto sub = submit(labelled_.at(s.of).tx, s.node);
        return result(sub.outcome, sub.detail);
      }
      case StepOp::Blacklist:
        update_blacklist(rules_, registry_, s.target, s.flag);
        return result("ok", (s.flag ? "flagged " : "cleared ") + s.target);
      case StepOp::Credential: return issue_credential(s);
      case StepOp::Attack: return attack(s, index);
      case StepOp::Tax: return tax(s);
      case StepOp::Disclose: return disclose(s);
      case StepOp::Matrix: return matrix();
      case StepOp::Advance:
        world_->run_until(now() + s.duration_us);
        return result("ok");
    }
    return result("error(UnknownOp)");
  }

  static StepResult result(std::string outcome, std::string detail = {}) {
    StepResult r;
    r.outcome = std::move(outcome);
    r.detail = std::move(detail);
    return r;
  }

  std::optional<std::string> account_of(const std::string& id) const {
    if (registry_.has_account(id)) return id;
    auto accts = registry_.accounts_of(id);
    if (accts.empty()) return std::nullopt;
    return accts.front();
  }

  bool is_blacklisted(const std::string& account) const {
    return rules_.blacklist.count(account) || rules_.blacklist.count(registry_.lookup_account(account).owner);
  }

  /// A store holder with no account, exchanging without a credential of its own.
  bool unregistered(const std::string& holder, const std::vector<std::string>& creds) const {
    if (!registry_.accounts_of(holder).empty()) return false;
    for (const auto& c : creds)
      if (credentials_.at(c).holder == holder) return false;
    return true;
  }

  StepResult pay(const Step& s) {
    PaymentIntent in;
    in.kind = s.kind;
    in.amount = s.amount;
    in.fee = s.fee.value_or(0);
    std::optional<std::string> dst_account;
    switch (s.kind) {
      case TxKind::Issue:
      case TxKind::TransparentTransfer:
      case TxKind::Unshield:
        dst_account = account_of(s.to);
        if (!dst_account) return result("error(UnknownRecipient)", "'" + s.to + "' holds no account");
        in.to_account = dst_account;
        break;
      case TxKind::Shield:
      case TxKind::ShieldedTransfer: in.to_stealth = wallets_.at(s.to).address(); break;
      case TxKind::MediatedBatch: break;
    }
    switch (s.kind) {
      case TxKind::Issue: in.actor = s.by; break;
      case TxKind::TransparentTransfer:
      case TxKind::Shield:
        in.from_account = account_of(s.from);
        if (!in.from_account) return result("error(UnknownAccount)", "'" + s.from + "' holds no account");
        break;
      case TxKind::Unshield:
      case TxKind::ShieldedTransfer: in.payer = &wallets_.at(s.from); break;
      case TxKind::MediatedBatch:
        in.actor = s.by;
        for (const auto& l : s.legs)
          in.legs.push_back({&wallets_.at(l.from), wallets_.at(l.to).address(), l.amount, l.fee.value_or(registry_.fee(s.by))});
        break;
    }
    for (const auto& c : s.credentials) in.credentials.push_back(credentials_.at(c).credential);

    Labelled rec;
    try {
      rec.tx = build_transaction(bctx_, in, rng_, &rec.created);
    } catch (const BuildError& e) {
      return result("error(" + std::string(to_string(e.failure)) + ")", e.what());
    } catch (const std::exception& e) {
      return result("error(Build)", e.what());
    }
    rec.before = state();

    const bool to_blacklisted = dst_account && is_blacklisted(*dst_account);
    // Registration-free use is probed on store-to-store exchange only; paying
    // an account from a store is open to anyone below the threshold.
    std::vector<std::string> spenders;
    if (s.kind == TxKind::ShieldedTransfer) spenders.push_back(s.from);
    for (const auto& l : s.legs)
      if (std::find(spenders.begin(), spenders.end(), l.from) == spenders.end()) spenders.push_back(l.from);
    std::size_t unregistered_spenders = 0;
    for (const auto& h : spenders) unregistered_spenders += unregistered(h, s.credentials);

    Submission sub = submit(rec.tx, s.node);
    rec.committed = sub.committed;
    if (to_blacklisted) {
      ++probes_.blacklist_attempts;
      probes_.blacklist_accepted += sub.committed;
    }
    probes_.unregistered_attempts += unregistered_spenders;
    if (sub.committed) probes_.unregistered_accepted += unregistered_spenders;
    if (sub.committed && dst_account) {
      const auto& owner = registry_.lookup_account(*dst_account).owner;
      if (registry_.entity(owner).kind == EntityKind::RegisteredBusiness) {
        receipts_[owner].first += s.amount;
        ++receipts_[owner].second;
      }
    }
    if (s.label) labelled_[*s.label] = std::move(rec);
    return result(sub.outcome, sub.detail);
  }

  StepResult issue_credential(const Step& s) {
    const Group& g = *group_;
    const auto& kp = issuers_.at(s.issuer);
    auto session = credential_begin(g, kp.secret, as_bytes("cred:" + s.name));
    auto [holder_state, request] = credential_request(g, kp.public_key, session.nonce_commitment, kEligibleAttribute, rng_);
    Credential c = credential_finalize(g, holder_state, credential_issue(g, kp.secret, session, request));
    credentials_[s.name] = {c, s.holder};
    return result("ok", s.issuer + " issued '" + s.name + "' to " + s.holder);
  }

  StepResult attack(const Step& s, std::size_t index) {
    std::vector<SpendObservation> spends;
    GroundTruth truth;
    if (s.source == "chain") {
      spends = observe_spends(*group_, chain());
      truth = ground_truth(wallets());
    } else {
      auto sampler = make_sampler(s.sampler);
      auto sim = simulate_spends(*sampler, s.ring_size, s.trials, s.attack_seed);
      spends = std::move(sim.spends);
      truth = std::move(sim.truth);
    }
    bool linkable = false;
    std::string detail;
    for (auto h : s.heuristics) {
      auto st = run_link_attack(spends, h, truth, s.attack_seed);
      if (st.trials == 0) return result("error(NoSpends)", "no spends to attack");
      probes_.attacks.push_back(st);
      attacks_.push_back({index, s.source, st});
      linkable = linkable || std::fabs(st.z) > probes_.attack_z_limit;
      char buf[96];
      std::snprintf(buf, sizeof buf, "%s%s acc %.4f z %.2f", detail.empty() ? "" : "; ", std::string(to_string(h)).c_str(),
                    st.accuracy, st.z);
      detail += buf;
    }
    return result(linkable ? "linkable" : "indistinguishable", detail);
  }

  StepResult tax(const Step& s) {
    try {
      auto rep = tax_report(*group_, chain(), registry_, s.entity, s.from_height, s.to_height);
      return result("total(" + std::to_string(rep.total) + ")", std::to_string(rep.items.size()) + " items");
    } catch (const std::invalid_argument& e) {
      return result("error(NotBusiness)", e.what());
    }
  }

  StepResult disclose(const Step& s) {
    const Labelled& rec = labelled_.at(s.of);
    if (!rec.committed) return result("error(NotCommitted)", "'" + s.of + "' was not committed");
    if (rec.tx.shielded_inputs.empty() && rec.tx.shielded_outputs.empty())
      return result("error(NothingToDisclose)", "'" + s.of + "' has no shielded legs");
    DisclosureClaims claims;
    for (const auto& c : rec.created) claims.outputs.push_back({c.position, c.value, c.blinding});
    if (s.lie && !claims.outputs.empty()) claims.outputs.front().amount += 1;
    for (std::size_t i = 0; i < rec.tx.shielded_inputs.size(); ++i) {
      const Bytes ki = group_->encode(rec.tx.shielded_inputs[i].signature.key_image);
      for (const auto& [id, w] : wallets_)
        for (const auto& o : w.outputs())
          if (o.key_image == ki) claims.inputs.push_back({i, o.spend_secret});
    }
    auto d = cooperative_disclosure(*group_, rec.before, rec.tx, claims);
    std::string detail = "disclosed " + std::to_string(d.disclosed_total) + " over " + std::to_string(d.outputs.size()) +
                         " outputs and " + std::to_string(d.inputs.size()) + " inputs";
    for (const auto& m : d.mismatches) detail += "; " + m;
    return result(d.consistent ? "consistent" : "inconsistent", detail);
  }

  StepResult matrix() const {
    std::uint64_t allow = 0, deny = 0, invalid = 0;
    std::map<std::string, std::uint64_t> reasons;
    for_each_cell({sc_.mode}, [&](const MatrixCell& c) {
      auto v = evaluate_cell(c);
      if (!v) {
        ++invalid;
      } else if (v->allowed()) {
        ++allow;
      } else {
        ++deny;
        ++reasons[std::string(to_string(*v->deny))];
      }
    });
    std::string detail;
    for (const auto& [k, n] : reasons) detail += (detail.empty() ? "" : ", ") + k + " " + std::to_string(n);
    return result("matrix(allow=" + std::to_string(allow) + ",deny=" + std::to_string(deny) +
                      ",invalid=" + std::to_string(invalid) + ")",
                  detail);
  }

  // -------------------------------------------------------------------------
  // Wrap-up

  void finish(RunResult& r) {
    const Group& g = *group_;
    const LedgerState& s = state();
    r.final_digest = state_digest(g, s).hex();
    r.height = s.height;

    bool consistent = world_->logs_consistent();
    for (NodeId i = 0; i < world_->size(); ++i)
      if (world_->honest(i) && world_->replica(i).last_executed() == s.height &&
          state_digest(g, world_->replica(i).state()) != state_digest(g, s))
        consistent = false;
    r.safety_violation = !consistent;

    auto& c = r.consensus;
    c.n = sc_.consensus.n;
    c.f = sc_.consensus.f;
    c.seed = seed_;
    c.max_view = world_->max_view();
    c.commits = world_->commits();
    c.sent = world_->stats().sent;
    c.delivered = world_->stats().delivered;
    c.dropped = world_->stats().dropped;
    for (const auto& [type, n] : world_->stats().by_type) c.messages[std::string(to_string(type))] = n;
    c.virtual_time_us = now();
    c.consistent = consistent;
    r.audit = audit_;

    bool complete = true;
    for (const auto& [entity, seen] : receipts_) {
      auto rep = tax_report(g, chain(), registry_, entity);
      r.taxes.push_back({entity, rep.total, rep.items.size(), seen.first});
      complete = complete && rep.total == seen.first && rep.items.size() == seen.second;
    }
    if (!receipts_.empty()) probes_.tax_complete = complete;
    r.attacks = attacks_;
    r.institution_share = institution_share(chain(), registry_);
    for (const auto& [acct, bal] : s.balances) r.balances[acct] = bal;
    for (const auto& [id, w] : wallets_)
      if (id != kDecoyWallet) r.stores[id] = w.balance(s);
    r.desiderata = desiderata_report(sc_.mode, probes_);

    if (audit_.failures) r.mismatches.push_back("conservation audit failed at " + audit_.first_failure);
    for (const auto& [row, want] : sc_.expect.desiderata) {
      auto got = r.desiderata.verdict(row);
      if (got != want)
        r.mismatches.push_back("desideratum '" + std::string(to_string(row)) + "': expected " +
                               std::string(to_string(want)) + ", got " + std::string(to_string(got)));
    }
    for (const auto& [acct, want] : sc_.expect.balances)
      if (s.balance(acct) != want)
        r.mismatches.push_back("balance of " + acct + ": expected " + std::to_string(want) + ", got " +
                               std::to_string(s.balance(acct)));
    for (const auto& [holder, want] : sc_.expect.stores) {
      auto got = wallets_.at(holder).balance(s);
      if (got != want)
        r.mismatches.push_back("store of " + holder + ": expected " + std::to_string(want) + ", got " + std::to_string(got));
    }
    if (!consistent) r.mismatches.push_back("honest replicas diverged");
  }

  Scenario sc_;
  RunOptions opt_;
  std::uint64_t seed_;
  GroupPtr group_;
  Rng rng_;
  std::unique_ptr<DecoySampler> sampler_;
  Registry registry_;
  RuleSet rules_;
  std::map<std::string, Wallet> wallets_;
  std::map<std::string, IssuerKeypair> issuers_;
  std::map<std::string, IssuedCredential> credentials_;
  LedgerState genesis_;
  ValidationContext vctx_;
  BuildContext bctx_;
  std::unique_ptr<World> world_;
  NodeId ref_ = 0;
  std::set<Digest> committed_;
  AuditSummary audit_;
  ProbeResults probes_;
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> receipts_;  // business -> (sum, count)
  std::map<std::string, Labelled> labelled_;
  std::vector<AttackRecord> attacks_;
};

inline RunResult run_scenario(const Scenario& sc, RunOptions opt = {}) {
  ScenarioRunner runner(sc, opt);
  return runner.run();
}

}  // namespace pvx
