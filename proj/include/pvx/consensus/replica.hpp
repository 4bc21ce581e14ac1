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
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pvx/consensus/messages.hpp"
#include "pvx/ledger/validate.hpp"

namespace pvx {

enum class TimerKind : std::uint8_t { Progress, ViewChange, Retransmit };

/// What a replica needs from its environment. The simulator implements it;
/// a replica never reads a clock or touches another replica directly.
class Transport {
public:
  virtual ~Transport() = default;
  virtual std::uint64_t now() const = 0;
  /// `from` is the node putting the message on the wire, which differs
  /// from m->sender when a certificate is relayed.
  virtual void send(NodeId from, NodeId to, MessagePtr m) = 0;
  virtual void set_timer(NodeId node, TimerKind kind, std::uint64_t delay_us, std::uint64_t generation) = 0;
  virtual void committed(NodeId node, const BlockPtr& block) = 0;
  virtual void rejected(NodeId node, const Digest& tx, const Verdict& v) = 0;
};

struct ReplicaConfig {
  NodeId id = 0;
  std::string institution;
  std::size_t n = 1;
  std::size_t f = 0;
  std::uint64_t base_timeout_us = 40'000;
  double backoff = 2.0;
  std::uint64_t retransmit_us = 10'000;
  std::size_t max_block_txs = 16;
  std::optional<std::uint64_t> equivocate_height;
};

struct ReplicaStats {
  std::uint64_t invalid_messages = 0;  // bad tag, digest mismatch, malformed
  std::uint64_t conflicting = 0;       // second proposal for the same view and height
  std::uint64_t bad_blocks = 0;        // proposals failing ledger validation
  std::uint64_t views_entered = 0;
  std::uint64_t view_changes_started = 0;
};

/// One PBFT replica. Sequence numbers are block heights; the primary of
/// view v is v mod n and proposes one block at a time. Executed heights
/// keep their commit certificates so lagging replicas can catch up from
/// any honest peer.
class Replica {
public:
  Replica(ReplicaConfig cfg, ValidationContext vctx, LedgerState genesis, const KeyRing* keys, Transport* net)
      : cfg_(std::move(cfg)), vctx_(std::move(vctx)), state_(std::move(genesis)), keys_(keys), net_(net) {
    last_exec_ = state_.height;
  }

  void start() { net_->set_timer(cfg_.id, TimerKind::Retransmit, cfg_.retransmit_us, 0); }

  NodeId id() const { return cfg_.id; }
  /// Installed view, or the view being changed to.
  std::uint64_t view() const { return changing_ ? target_ : view_; }
  std::uint64_t installed_view() const { return view_; }
  bool changing() const { return changing_; }
  std::uint64_t last_executed() const { return last_exec_; }
  const LedgerState& state() const { return state_; }
  const std::vector<BlockPtr>& chain() const { return chain_; }
  const std::vector<Digest>& chain_digests() const { return digests_; }
  const ReplicaStats& stats() const { return stats_; }
  bool is_primary() const { return primary(view_) == cfg_.id && !changing_; }
  bool in_mempool(const Digest& tx) const { return pool_ids_.count(tx) != 0; }
  std::size_t mempool_size() const { return pool_.size(); }

  /// Client entry point: validate, queue, and forward to the primary.
  void submit(const TxPtr& tx) {
    Digest id = wire_digest(*vctx_.group, *tx);
    if (!admit(tx, id, true)) return;
    if (primary(view_) != cfg_.id) send(primary(view_), request(tx, id));
    try_propose();
  }

  void receive(const MessagePtr& m) {
    if (!keys_->verify(*m) || m->sender >= cfg_.n) {
      ++stats_.invalid_messages;
      return;
    }
    switch (m->type) {
      case MsgType::Request: on_request(m); break;
      case MsgType::PrePrepare: on_preprepare(m); break;
      case MsgType::Prepare: on_prepare(m); break;
      case MsgType::Commit: on_commit(m); break;
      case MsgType::ViewChange: on_view_change(m); break;
      case MsgType::NewView: on_new_view(m); break;
      case MsgType::Status: on_status(m); break;
    }
  }

  void timer(TimerKind kind, std::uint64_t generation) {
    switch (kind) {
      case TimerKind::Retransmit: retransmit(); break;
      case TimerKind::Progress:
        if (generation != progress_gen_) return;
        progress_armed_ = false;
        if (changing_) return;
        if (last_exec_ > progress_mark_) {
          arm_progress();
        } else if (pending_work()) {
          start_view_change(view_ + 1);
        }
        break;
      case TimerKind::ViewChange:
        if (generation != vc_gen_ || !changing_) return;
        start_view_change(target_ + 1);
        break;
    }
  }

private:
  struct Proposal {
    Digest digest;
    BlockPtr block;
    bool checked = false;
    bool valid = false;
  };
  struct Slot {
    std::map<std::uint64_t, Proposal> proposals;  // by view
    std::map<std::pair<std::uint64_t, Digest>, std::set<NodeId>> prepares;
    std::map<std::pair<std::uint64_t, Digest>, std::map<NodeId, MessagePtr>> commits;
    std::map<Digest, BlockPtr> blocks;
    std::set<std::uint64_t> prepared_in, committed_in;  // views where this replica sent
    MessagePtr my_preprepare, my_prepare, my_commit;
  };

  NodeId primary(std::uint64_t v) const { return static_cast<NodeId>(v % cfg_.n); }
  std::size_t quorum() const { return 2 * cfg_.f + 1; }
  const Group& group() const { return *vctx_.group; }

  // --- messaging -----------------------------------------------------------

  MessagePtr seal(ConsensusMessage m) {
    m.sender = cfg_.id;
    keys_->sign(m);
    return std::make_shared<const ConsensusMessage>(std::move(m));
  }
  void send(NodeId to, const MessagePtr& m) {
    if (to != cfg_.id) net_->send(cfg_.id, to, m);
  }
  void broadcast(const MessagePtr& m) {
    for (NodeId i = 0; i < cfg_.n; ++i) send(i, m);
  }
  MessagePtr request(const TxPtr& tx, const Digest& id) {
    ConsensusMessage m;
    m.type = MsgType::Request;
    m.view = view_;
    m.tx = tx;
    m.tx_id = id;
    return seal(std::move(m));
  }

  // --- mempool ---------------------------------------------------------------

  bool admit(const TxPtr& tx, const Digest& id, bool from_client) {
    if (pool_ids_.count(id)) return false;
    const bool replay = executed_txs_.count(id) != 0;
    if (replay && !from_client) return false;
    Verdict v = validate_transaction(vctx_, state_, *tx);
    // A replayed issue is still valid on its own; the log is what stops it.
    if (replay && v.accepted()) v = Verdict::reject(RejectReason::Malformed, "already committed");
    if (!v.accepted()) {
      net_->rejected(cfg_.id, id, v);
      return false;
    }
    pool_.emplace_back(id, tx);
    pool_ids_.insert(id);
    arm_progress();
    return true;
  }

  void on_request(const MessagePtr& m) {
    if (!m->tx || wire_digest(group(), *m->tx) != m->tx_id) {
      ++stats_.invalid_messages;
      return;
    }
    if (admit(m->tx, m->tx_id, false)) try_propose();
  }

  bool pending_work() const {
    if (!pool_.empty() || nv_max_exec_ > last_exec_) return true;
    for (const auto& [seq, slot] : log_)
      if (seq > last_exec_ && (!slot.proposals.empty() || !slot.commits.empty())) return true;
    return false;
  }

  void arm_progress() {
    if (progress_armed_ || changing_ || !pending_work()) return;
    progress_armed_ = true;
    progress_mark_ = last_exec_;
    net_->set_timer(cfg_.id, TimerKind::Progress, cfg_.base_timeout_us, ++progress_gen_);
  }
  void reset_progress() {
    progress_armed_ = false;
    ++progress_gen_;
    arm_progress();
  }

  // --- normal case -----------------------------------------------------------

  void try_propose() {
    if (changing_ || primary(view_) != cfg_.id) return;
    const std::uint64_t seq = last_exec_ + 1;
    if (seq <= nv_max_exec_ || nv_certs_.count(seq)) return;
    if (proposed_.count({view_, seq})) return;

    Block b;
    b.height = seq;
    b.parent = head();
    b.proposer = cfg_.institution;
    LedgerState scratch = state_;
    std::vector<Digest> dropped;
    for (const auto& [id, tx] : pool_) {
      if (b.txs.size() >= cfg_.max_block_txs) break;
      Verdict v = validate_transaction(vctx_, scratch, *tx);
      if (!v.accepted()) {
        net_->rejected(cfg_.id, id, v);
        dropped.push_back(id);
        continue;
      }
      apply_transaction(group(), scratch, *tx);
      b.txs.push_back(*tx);
    }
    for (const auto& id : dropped) drop_from_pool(id);
    if (b.txs.empty()) return;
    proposed_.insert({view_, seq});

    auto block = std::make_shared<const Block>(std::move(b));
    const Digest d = block_digest(group(), *block);
    if (cfg_.equivocate_height && *cfg_.equivocate_height == seq) {
      // Real block to half the replicas, an empty one to the rest, then
      // stay out of this height's quorums.
      auto alt = std::make_shared<const Block>(Block{seq, {}, block->parent, cfg_.institution});
      auto real_msg = preprepare(seq, d, block);
      auto alt_msg = preprepare(seq, block_digest(group(), *alt), alt);
      std::size_t k = 0;
      for (NodeId i = 0; i < cfg_.n; ++i)
        if (i != cfg_.id) send(i, (k++ % 2 == 0) ? real_msg : alt_msg);
      return;
    }
    Slot& s = log_[seq];
    s.proposals[view_] = Proposal{d, block, true, true};
    s.blocks[d] = block;
    s.my_preprepare = preprepare(seq, d, block);
    broadcast(s.my_preprepare);
    check_prepared(seq);
  }

  MessagePtr preprepare(std::uint64_t seq, const Digest& d, const BlockPtr& block) {
    ConsensusMessage m;
    m.type = MsgType::PrePrepare;
    m.view = view_;
    m.seq = seq;
    m.digest = d;
    m.block = block;
    return seal(std::move(m));
  }

  bool carries_block(const ConsensusMessage& m) {
    if (!m.block || block_digest(group(), *m.block) != m.digest || m.block->height != m.seq) {
      ++stats_.invalid_messages;
      return false;
    }
    return true;
  }

  void on_preprepare(const MessagePtr& m) {
    if (!carries_block(*m)) return;
    if (changing_ || m->view != view_ || m->sender != primary(view_)) return;
    if (m->seq <= last_exec_ || m->seq <= nv_max_exec_ || nv_certs_.count(m->seq)) return;
    Slot& s = log_[m->seq];
    auto it = s.proposals.find(view_);
    if (it != s.proposals.end()) {
      if (it->second.digest != m->digest) ++stats_.conflicting;
      return;
    }
    s.proposals[view_] = Proposal{m->digest, m->block};
    s.blocks[m->digest] = m->block;
    arm_progress();
    try_prepare(m->seq);
  }

  /// Validates the current view's proposal for the next height and, on a
  /// backup, votes for it.
  void try_prepare(std::uint64_t seq) {
    if (changing_ || seq != last_exec_ + 1) return;
    Slot& s = log_[seq];
    auto it = s.proposals.find(view_);
    if (it == s.proposals.end()) return;
    Proposal& p = it->second;
    if (!p.checked) {
      p.checked = true;
      LedgerState scratch = state_;
      p.valid = p.block->parent == head() && apply_block(vctx_, scratch, *p.block).accepted();
      if (!p.valid) ++stats_.bad_blocks;
    }
    if (!p.valid) return;
    if (primary(view_) != cfg_.id && !s.prepared_in.count(view_)) {
      s.prepared_in.insert(view_);
      ConsensusMessage m;
      m.type = MsgType::Prepare;
      m.view = view_;
      m.seq = seq;
      m.digest = p.digest;
      s.my_prepare = seal(std::move(m));
      s.prepares[{view_, p.digest}].insert(cfg_.id);
      broadcast(s.my_prepare);
    }
    check_prepared(seq);
  }

  void on_prepare(const MessagePtr& m) {
    if (m->seq <= last_exec_ || m->sender == primary(m->view)) return;
    log_[m->seq].prepares[{m->view, m->digest}].insert(m->sender);
    check_prepared(m->seq);
  }

  void check_prepared(std::uint64_t seq) {
    if (changing_ || seq != last_exec_ + 1) return;
    Slot& s = log_[seq];
    auto it = s.proposals.find(view_);
    if (it == s.proposals.end() || !it->second.valid) return;
    const Proposal& p = it->second;
    if (s.prepares[{view_, p.digest}].size() < 2 * cfg_.f) return;
    if (!prepared_ || prepared_->seq != seq || prepared_->view < view_)
      prepared_ = PreparedCert{view_, seq, p.digest, p.block};
    if (s.committed_in.count(view_)) return;
    s.committed_in.insert(view_);
    ConsensusMessage m;
    m.type = MsgType::Commit;
    m.view = view_;
    m.seq = seq;
    m.digest = p.digest;
    m.block = p.block;
    s.my_commit = seal(std::move(m));
    s.commits[{view_, p.digest}][cfg_.id] = s.my_commit;
    broadcast(s.my_commit);
    try_execute();
  }

  void on_commit(const MessagePtr& m) {
    if (m->seq <= last_exec_) return;
    if (!carries_block(*m)) return;
    Slot& s = log_[m->seq];
    s.blocks.emplace(m->digest, m->block);
    s.commits[{m->view, m->digest}][m->sender] = m;
    if (m->seq == last_exec_ + 1) try_execute();
  }

  void try_execute() {
    for (;;) {
      auto sit = log_.find(last_exec_ + 1);
      if (sit == log_.end()) return;
      Slot& s = sit->second;
      const std::map<NodeId, MessagePtr>* cert = nullptr;
      Digest d;
      for (const auto& [key, votes] : s.commits)
        if (votes.size() >= quorum()) {
          cert = &votes;
          d = key.second;
          break;
        }
      if (!cert) return;
      BlockPtr block = s.blocks.at(d);
      if (block->parent != head()) return;
      LedgerState next = state_;
      if (!apply_block(vctx_, next, *block).accepted()) {
        ++stats_.bad_blocks;
        return;
      }
      std::vector<MessagePtr> proof;
      for (const auto& [_, msg] : *cert) {
        proof.push_back(msg);
        if (proof.size() == quorum()) break;
      }
      execute(block, d, std::move(next), std::move(proof));
    }
  }

  void execute(const BlockPtr& block, const Digest& d, LedgerState next, std::vector<MessagePtr> proof) {
    state_ = std::move(next);
    last_exec_ = block->height;
    chain_.push_back(block);
    digests_.push_back(d);
    certs_[last_exec_] = std::move(proof);
    for (const auto& tx : block->txs) {
      Digest id = wire_digest(group(), tx);
      executed_txs_.insert(id);
      drop_from_pool(id);
    }
    log_.erase(log_.begin(), log_.upper_bound(last_exec_));
    if (prepared_ && prepared_->seq <= last_exec_) prepared_.reset();
    vc_attempts_ = 0;
    net_->committed(cfg_.id, block);
    reset_progress();
    const std::uint64_t seq = last_exec_ + 1;
    install_certified(seq);
    try_prepare(seq);
    try_propose();
  }

  void drop_from_pool(const Digest& id) {
    if (!pool_ids_.erase(id)) return;
    pool_.erase(std::find_if(pool_.begin(), pool_.end(), [&](const auto& e) { return e.first == id; }));
  }

  Digest head() const { return digests_.empty() ? Digest{} : digests_.back(); }

  // --- view change -----------------------------------------------------------

  void start_view_change(std::uint64_t target) {
    changing_ = true;
    target_ = target;
    ++stats_.view_changes_started;
    ConsensusMessage m;
    m.type = MsgType::ViewChange;
    m.view = target;
    m.last_exec = last_exec_;
    if (prepared_ && prepared_->seq == last_exec_ + 1) {
      m.prepared = *prepared_;
      m.block = prepared_->block;
    }
    my_vc_ = seal(std::move(m));
    vcs_[target][cfg_.id] = my_vc_;
    latest_vc_[cfg_.id] = target;
    broadcast(my_vc_);
    const unsigned exp = std::min<unsigned>(vc_attempts_++, 12);
    double delay = static_cast<double>(cfg_.base_timeout_us);
    for (unsigned i = 0; i < exp; ++i) delay *= cfg_.backoff;
    net_->set_timer(cfg_.id, TimerKind::ViewChange, static_cast<std::uint64_t>(delay), ++vc_gen_);
    maybe_new_view(target);
  }

  bool vc_well_formed(const ConsensusMessage& m) {
    if (!m.prepared) return true;
    const auto& p = *m.prepared;
    if (!m.block || p.seq != m.last_exec + 1 || p.view >= m.view || block_digest(group(), *m.block) != p.digest) {
      ++stats_.invalid_messages;
      return false;
    }
    return true;
  }

  void on_view_change(const MessagePtr& m) {
    if (!vc_well_formed(*m)) return;
    const std::uint64_t current = changing_ ? target_ : view_;
    if (m->view <= view_) return;
    vcs_[m->view][m->sender] = m;
    auto& latest = latest_vc_[m->sender];
    latest = std::max(latest, m->view);

    // Join once f+1 replicas have moved past us: at least one is honest.
    std::size_t ahead = 0;
    std::uint64_t lowest = ~std::uint64_t{0};
    for (const auto& [node, v] : latest_vc_)
      if (node != cfg_.id && v > current) {
        ++ahead;
        lowest = std::min(lowest, v);
      }
    if (ahead >= cfg_.f + 1) start_view_change(lowest);
    maybe_new_view(m->view);
  }

  void maybe_new_view(std::uint64_t v) {
    if (primary(v) != cfg_.id || v <= view_ || (changing_ && v < target_)) return;
    auto it = vcs_.find(v);
    if (it == vcs_.end() || it->second.size() < quorum()) return;
    ConsensusMessage m;
    m.type = MsgType::NewView;
    m.view = v;
    for (const auto& [_, vc] : it->second) {
      m.view_changes.push_back(vc);
      if (m.view_changes.size() == quorum()) break;
    }
    auto nv = seal(std::move(m));
    broadcast(nv);
    enter_view(nv);
  }

  void on_new_view(const MessagePtr& m) {
    if (m->sender != primary(m->view) || m->view <= view_ || (changing_ && m->view < target_)) return;
    std::set<NodeId> seen;
    for (const auto& vc : m->view_changes) {
      if (vc->type != MsgType::ViewChange || vc->view != m->view || !keys_->verify(*vc) || !vc_well_formed(*vc) ||
          !seen.insert(vc->sender).second) {
        ++stats_.invalid_messages;
        return;
      }
    }
    if (seen.size() < quorum()) {
      ++stats_.invalid_messages;
      return;
    }
    enter_view(m);
  }

  /// Installs the view. Heights some quorum member already executed are
  /// left to catch-up; the highest-view prepared block for the next height
  /// is carried over; fresh proposals start after both.
  void enter_view(const MessagePtr& nv) {
    view_ = nv->view;
    changing_ = false;
    ++vc_gen_;
    ++stats_.views_entered;
    new_view_ = nv;
    nv_max_exec_ = 0;
    nv_certs_.clear();
    for (const auto& vc : nv->view_changes) {
      nv_max_exec_ = std::max(nv_max_exec_, vc->last_exec);
      if (vc->prepared) {
        auto& slot = nv_certs_[vc->prepared->seq];
        if (!slot.block || vc->prepared->view > slot.view) slot = PreparedCert{vc->prepared->view, vc->prepared->seq, vc->prepared->digest, vc->block};
      }
    }
    vcs_.erase(vcs_.begin(), vcs_.upper_bound(view_));
    for (auto& [seq, slot] : log_) slot.my_preprepare = slot.my_prepare = slot.my_commit = nullptr;
    reset_progress();
    install_certified(last_exec_ + 1);
    try_prepare(last_exec_ + 1);
    if (primary(view_) != cfg_.id)
      for (const auto& [id, tx] : pool_) send(primary(view_), request(tx, id));
    try_propose();
  }

  void install_certified(std::uint64_t seq) {
    auto it = nv_certs_.find(seq);
    if (it == nv_certs_.end() || changing_) return;
    Slot& s = log_[seq];
    if (s.proposals.count(view_)) return;
    s.proposals[view_] = Proposal{it->second.digest, it->second.block};
    s.blocks[it->second.digest] = it->second.block;
  }

  // --- heartbeat and catch-up -------------------------------------------------

  void on_status(const MessagePtr& m) {
    if (m->last_exec < last_exec_) {
      for (std::uint64_t h = m->last_exec + 1; h <= std::min(last_exec_, m->last_exec + 8); ++h) {
        auto it = certs_.find(h);
        if (it == certs_.end()) break;
        for (const auto& c : it->second) send(m->sender, c);
      }
    }
    if (m->view < view_ && !changing_ && new_view_) send(m->sender, new_view_);
  }

  void retransmit() {
    net_->set_timer(cfg_.id, TimerKind::Retransmit, cfg_.retransmit_us, 0);
    ConsensusMessage st;
    st.type = MsgType::Status;
    st.view = view_;
    st.last_exec = last_exec_;
    broadcast(seal(std::move(st)));
    if (changing_) {
      broadcast(my_vc_);
      return;
    }
    auto it = log_.find(last_exec_ + 1);
    if (it != log_.end()) {
      for (const auto& m : {it->second.my_preprepare, it->second.my_prepare, it->second.my_commit})
        if (m && m->view == view_) broadcast(m);
    }
    // Requests still waiting go to everyone, so a silent primary gets
    // noticed by every honest replica.
    std::size_t k = 0;
    for (const auto& [id, tx] : pool_) {
      if (k++ == cfg_.max_block_txs) break;
      broadcast(request(tx, id));
    }
  }

  ReplicaConfig cfg_;
  ValidationContext vctx_;
  LedgerState state_;
  const KeyRing* keys_;
  Transport* net_;
  ReplicaStats stats_;

  std::uint64_t view_ = 0, target_ = 0, last_exec_ = 0;
  bool changing_ = false;
  std::vector<BlockPtr> chain_;
  std::vector<Digest> digests_;
  std::map<std::uint64_t, std::vector<MessagePtr>> certs_;

  std::deque<std::pair<Digest, TxPtr>> pool_;
  std::set<Digest> pool_ids_, executed_txs_;

  std::map<std::uint64_t, Slot> log_;
  std::set<std::pair<std::uint64_t, std::uint64_t>> proposed_;
  std::optional<PreparedCert> prepared_;

  std::map<std::uint64_t, std::map<NodeId, MessagePtr>> vcs_;
  std::map<NodeId, std::uint64_t> latest_vc_;
  MessagePtr my_vc_, new_view_;
  std::uint64_t nv_max_exec_ = 0;
  std::map<std::uint64_t, PreparedCert> nv_certs_;

  bool progress_armed_ = false;
  std::uint64_t progress_gen_ = 0, progress_mark_ = 0, vc_gen_ = 0;
  unsigned vc_attempts_ = 0;
};

}  // namespace pvx
