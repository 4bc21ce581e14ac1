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
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvx/consensus/faults.hpp"
#include "pvx/consensus/replica.hpp"
#include "pvx/rng.hpp"

namespace pvx {

/// During [from, to) messages only flow between nodes of the same group.
/// Nodes not listed in any group are isolated.
struct Partition {
  std::vector<std::vector<NodeId>> groups;
  std::uint64_t from = 0;
  std::uint64_t to = 0;
};

struct NetworkConfig {
  std::uint64_t delay_us = 1'000;
  std::uint64_t jitter_us = 1'000;
  double drop = 0.0;
  std::vector<Partition> partitions;
};

struct WorldConfig {
  std::size_t n = 1;
  std::size_t f = 0;
  std::uint64_t seed = 0;
  NetworkConfig net;
  std::uint64_t base_timeout_us = 40'000;
  double backoff = 2.0;
  std::uint64_t retransmit_us = 10'000;
  std::size_t max_block_txs = 16;
  std::vector<std::string> institutions;  // per node; defaults to "node<i>"
  std::vector<NodeFaults> faults;         // per node; empty means all honest
};

struct NetworkStats {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t timers = 0;
  std::map<MsgType, std::uint64_t> by_type;
};

struct RejectionRecord {
  NodeId node;
  Digest tx;
  Verdict verdict;
  std::uint64_t time;
};

/// Discrete-event world hosting n replicas. Events run in (time, counter)
/// order and every random draw comes from one seeded stream, so a run is a
/// function of its configuration.
class World final : private Transport {
public:
  using CommitCallback = std::function<void(NodeId, const Block&, const LedgerState&)>;

  World(WorldConfig cfg, const ValidationContext& vctx, const LedgerState& genesis)
      : cfg_(std::move(cfg)), group_(vctx.group), rng_(cfg_.seed), keys_(cfg_.seed, cfg_.n), trace_(tags::kTrace) {
    if (cfg_.n == 0 || cfg_.n < 3 * cfg_.f + 1) throw std::invalid_argument("need n >= 3f+1 replicas");
    cfg_.faults.resize(cfg_.n);
    cfg_.institutions.resize(cfg_.n);
    for (std::size_t i = 0; i < cfg_.n; ++i) {
      ReplicaConfig rc;
      rc.id = static_cast<NodeId>(i);
      rc.institution = cfg_.institutions[i].empty() ? "node" + std::to_string(i) : cfg_.institutions[i];
      rc.n = cfg_.n;
      rc.f = cfg_.f;
      rc.base_timeout_us = cfg_.base_timeout_us;
      rc.backoff = cfg_.backoff;
      rc.retransmit_us = cfg_.retransmit_us;
      rc.max_block_txs = cfg_.max_block_txs;
      rc.equivocate_height = cfg_.faults[i].equivocate_height;
      replicas_.push_back(std::make_unique<Replica>(rc, vctx, genesis, &keys_, static_cast<Transport*>(this)));
    }
    trace_.absorb_u64(cfg_.seed).absorb_u64(cfg_.n).absorb_u64(cfg_.f);
    for (auto& r : replicas_) r->start();
  }

  World(const World&) = delete;
  World& operator=(const World&) = delete;

  std::size_t size() const { return replicas_.size(); }
  const Replica& replica(NodeId i) const { return *replicas_.at(i); }
  std::uint64_t now() const override { return now_; }
  const NetworkStats& stats() const { return stats_; }
  const std::vector<RejectionRecord>& rejections() const { return rejections_; }
  std::uint64_t commits() const { return commits_; }
  void on_commit(CommitCallback cb) { on_commit_ = std::move(cb); }

  /// Nodes with no fault script.
  bool honest(NodeId i) const { return !cfg_.faults.at(i).any(); }
  bool crashed(NodeId i) const { return cfg_.faults.at(i).crashed(now_); }

  void submit_client_tx(NodeId node, Transaction tx) {
    if (node >= replicas_.size()) throw std::out_of_range("unknown node " + std::to_string(node));
    auto ptr = std::make_shared<const Transaction>(std::move(tx));
    trace_.absorb("submit").absorb_u64(now_).absorb_u64(node).absorb(wire_digest(*group_, *ptr).view());
    if (crashed(node)) return;
    replicas_[node]->submit(ptr);
  }

  /// Processes one event; false when the queue is empty.
  bool step() {
    if (queue_.empty()) return false;
    Event e = queue_.top();
    queue_.pop();
    now_ = e.time;
    Replica& r = *replicas_[e.node];
    if (e.msg) {
      trace_.absorb_u64(e.time).absorb_u64(e.node).absorb_u64(static_cast<std::uint64_t>(e.msg->type));
      trace_.absorb_u64(e.msg->sender).absorb_u64(e.msg->view).absorb_u64(e.msg->seq).absorb(e.msg->digest.view());
      if (crashed(e.node)) return true;
      ++stats_.delivered;
      r.receive(e.msg);
    } else {
      trace_.absorb_u64(e.time).absorb_u64(e.node).absorb_u64(100 + static_cast<std::uint64_t>(e.kind));
      if (crashed(e.node)) return true;
      ++stats_.timers;
      r.timer(e.kind, e.generation);
    }
    return true;
  }

  void run_until(std::uint64_t t) {
    while (!queue_.empty() && queue_.top().time <= t) step();
    now_ = std::max(now_, t);
  }

  void run_events(std::uint64_t count) {
    for (std::uint64_t i = 0; i < count && step(); ++i) {
    }
  }

  /// Runs until pred holds or virtual time passes deadline; returns pred().
  bool run_until(const std::function<bool()>& pred, std::uint64_t deadline) {
    while (!pred()) {
      if (queue_.empty() || queue_.top().time > deadline) return false;
      step();
    }
    return true;
  }

  Digest trace_digest() const {
    Transcript t = trace_;
    return t.finish_digest();
  }

  /// No height has two different committed blocks among honest replicas.
  bool logs_consistent() const {
    std::map<std::size_t, Digest> seen;
    for (NodeId i = 0; i < replicas_.size(); ++i) {
      if (!honest(i)) continue;
      const auto& d = replicas_[i]->chain_digests();
      for (std::size_t h = 0; h < d.size(); ++h) {
        auto [it, fresh] = seen.emplace(h, d[h]);
        if (!fresh && it->second != d[h]) return false;
      }
    }
    return true;
  }

  /// Honest replicas that are up and have executed at least `height` blocks.
  std::size_t reached(std::uint64_t height) const {
    std::size_t k = 0;
    for (NodeId i = 0; i < replicas_.size(); ++i)
      if (honest(i) && replicas_[i]->last_executed() >= height) ++k;
    return k;
  }

  std::size_t honest_count() const {
    std::size_t k = 0;
    for (NodeId i = 0; i < replicas_.size(); ++i) k += honest(i);
    return k;
  }

  std::uint64_t max_view() const {
    std::uint64_t v = 0;
    for (const auto& r : replicas_) v = std::max(v, r->view());
    return v;
  }

private:
  struct Event {
    std::uint64_t time;
    std::uint64_t counter;
    NodeId node;
    MessagePtr msg;
    TimerKind kind = TimerKind::Retransmit;
    std::uint64_t generation = 0;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.counter > b.counter;
    }
  };

  bool partitioned(NodeId a, NodeId b) const {
    for (const auto& p : cfg_.net.partitions) {
      if (now_ < p.from || now_ >= p.to) continue;
      auto group_of = [&](NodeId x) -> long {
        for (std::size_t g = 0; g < p.groups.size(); ++g)
          for (NodeId y : p.groups[g])
            if (y == x) return static_cast<long>(g);
        return -1;
      };
      long ga = group_of(a), gb = group_of(b);
      if (ga < 0 || ga != gb) return true;
    }
    return false;
  }

  void send(NodeId from, NodeId to, MessagePtr m) override {
    ++stats_.sent;
    ++stats_.by_type[m->type];
    const auto& fl = cfg_.faults[from];
    // Draw unconditionally so fault scripts do not shift the random stream.
    const bool lost = rng_.chance(cfg_.net.drop);
    const std::uint64_t delay = cfg_.net.delay_us + rng_.below(cfg_.net.jitter_us + 1);
    if (lost || fl.muted(now_) || fl.crashed(now_) || partitioned(from, to)) {
      ++stats_.dropped;
      return;
    }
    queue_.push(Event{now_ + delay, counter_++, to, std::move(m)});
  }

  void set_timer(NodeId node, TimerKind kind, std::uint64_t delay_us, std::uint64_t generation) override {
    queue_.push(Event{now_ + delay_us, counter_++, node, nullptr, kind, generation});
  }

  void committed(NodeId node, const BlockPtr& block) override {
    ++commits_;
    trace_.absorb("commit").absorb_u64(node).absorb_u64(block->height);
    if (on_commit_) on_commit_(node, *block, replicas_[node]->state());
  }

  void rejected(NodeId node, const Digest& tx, const Verdict& v) override {
    trace_.absorb("reject").absorb_u64(node).absorb(tx.view());
    rejections_.push_back({node, tx, v, now_});
  }

  WorldConfig cfg_;
  GroupPtr group_;
  Rng rng_;
  KeyRing keys_;
  Transcript trace_;
  std::vector<std::unique_ptr<Replica>> replicas_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t now_ = 0, counter_ = 0, commits_ = 0;
  NetworkStats stats_;
  std::vector<RejectionRecord> rejections_;
  CommitCallback on_commit_;
};

}  // namespace pvx
