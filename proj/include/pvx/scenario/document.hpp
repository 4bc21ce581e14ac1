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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pvx/consensus/faults.hpp"
#include "pvx/consensus/world.hpp"
#include "pvx/entityreg/registry.hpp"
#include "pvx/group.hpp"
#include "pvx/ledger/tx_kind.hpp"
#include "pvx/observer/desiderata.hpp"
#include "pvx/observer/link_attack.hpp"
#include "pvx/policy/engine.hpp"

namespace pvx {

using json = nlohmann::json;

/// Parse or validation failure. `where` is "line L, column C" for syntax
/// errors and a JSON pointer for field errors.
class ScenarioError : public std::runtime_error {
public:
  ScenarioError(std::string where, const std::string& what)
      : std::runtime_error((where.empty() ? std::string("/") : where) + ": " + what), where(std::move(where)) {}
  std::string where;
};

struct AccountDecl {
  std::string id;
  std::string at;  // holding institution
};

struct EntityDecl {
  std::string id;
  EntityKind kind = EntityKind::Individual;
  std::vector<AccountDecl> accounts;
  bool wallet = false;   // holds a private store
  bool publish = false;  // stealth address in the registry
  bool issuer = false;   // issues credentials
  std::optional<std::uint64_t> fee;
};

/// Initial allocation, either to an account or to an entity's store.
struct GenesisEntry {
  std::optional<std::string> account;
  std::optional<std::string> store;
  std::uint64_t amount = 0;
};

struct ConsensusDecl {
  std::size_t n = 1;
  std::size_t f = 0;
  std::uint64_t seed = 1;
  std::uint64_t delay_us = 1'000;
  std::uint64_t jitter_us = 1'000;
  double drop = 0.0;
  std::uint64_t base_timeout_us = 40'000;
  double backoff = 2.0;
  std::uint64_t retransmit_us = 10'000;
  std::size_t max_block_txs = 16;
  std::map<NodeId, std::vector<std::string>> faults;
  std::vector<Partition> partitions;
  std::vector<std::string> nodes;  // operating institution per node
};

enum class StepOp : std::uint8_t { Pay, Replay, Blacklist, Credential, Attack, Tax, Disclose, Matrix, Advance };

inline constexpr std::array<StepOp, 9> kAllStepOps = {StepOp::Pay,    StepOp::Replay,   StepOp::Blacklist,
                                                      StepOp::Credential, StepOp::Attack, StepOp::Tax,
                                                      StepOp::Disclose, StepOp::Matrix,  StepOp::Advance};

inline std::string_view to_string(StepOp op) {
  switch (op) {
    case StepOp::Pay: return "pay";
    case StepOp::Replay: return "replay";
    case StepOp::Blacklist: return "blacklist";
    case StepOp::Credential: return "credential";
    case StepOp::Attack: return "attack";
    case StepOp::Tax: return "tax";
    case StepOp::Disclose: return "disclose";
    case StepOp::Matrix: return "matrix";
    case StepOp::Advance: return "advance";
  }
  return "?";
}

struct LegDecl {
  std::string from;  // paying store holder
  std::string to;    // receiving store holder
  std::uint64_t amount = 0;
  std::optional<std::uint64_t> fee;  // defaults to the intermediary's schedule
};

/// One scenario step. Which fields matter depends on `op`; the parser
/// rejects keys that do not belong to the op.
struct Step {
  StepOp op = StepOp::Pay;
  std::string pointer;  // location in the document, for messages
  std::optional<std::string> label;
  std::optional<std::string> expect;

  // pay
  TxKind kind = TxKind::TransparentTransfer;
  std::string from, to, by;
  std::uint64_t amount = 0;
  std::optional<std::uint64_t> fee;
  std::vector<LegDecl> legs;
  std::vector<std::string> credentials;
  std::optional<NodeId> node;

  // replay, disclose
  std::string of;
  bool lie = false;

  // blacklist: target, flag. credential: holder, issuer, name. tax: entity.
  std::string target;
  bool flag = true;
  std::string holder, issuer, name;
  std::string entity;
  std::uint64_t from_height = 0;
  std::uint64_t to_height = ~std::uint64_t{0};

  // attack
  std::string source = "chain";
  std::vector<Heuristic> heuristics;
  std::string sampler = "uniform";
  std::size_t ring_size = 11;
  std::uint64_t trials = 0;
  std::uint64_t attack_seed = 0;

  // advance
  std::uint64_t duration_us = 0;
};

struct ScenarioExpect {
  std::map<Desideratum, Support> desiderata;
  std::map<std::string, std::uint64_t> balances;  // account -> amount
  std::map<std::string, std::uint64_t> stores;    // holder -> private balance
};

struct Scenario {
  std::string name;
  Mode mode = Mode::Supported;
  Profile profile = Profile::Desk;
  unsigned range_bits = 32;
  std::size_t ring_size = 11;
  std::string sampler = "uniform";
  std::uint64_t decoys = 0;  // zero-value genesis outputs padding the ring population
  ConsensusDecl consensus;
  std::vector<EntityDecl> entities;
  std::vector<GenesisEntry> genesis;
  std::vector<std::string> blacklist;
  std::optional<std::uint64_t> threshold;
  std::vector<Step> steps;
  ScenarioExpect expect;

  const EntityDecl* find_entity(std::string_view id) const {
    for (const auto& e : entities)
      if (e.id == id) return &e;
    return nullptr;
  }
};

namespace detail {

/// Cursor over a JSON value that knows its pointer and refuses unknown keys.
class Field {
public:
  Field(const json& j, std::string pointer) : j_(j), ptr_(std::move(pointer)) {}

  [[noreturn]] void fail(const std::string& what) const { throw ScenarioError(ptr_, what); }
  const std::string& pointer() const { return ptr_; }
  const json& raw() const { return j_; }

  void expect_object(std::initializer_list<std::string_view> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [k, v] : j_.items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || a == k;
      if (!ok) Field(v, child(k)).fail("unknown field '" + k + "'");
    }
  }

  bool has(std::string_view key) const { return j_.is_object() && j_.contains(key); }

  Field at(std::string_view key) const {
    if (!has(key)) fail("missing field '" + std::string(key) + "'");
    return Field(j_.at(std::string(key)), child(key));
  }

  std::optional<Field> opt(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return Field(j_.at(std::string(key)), child(key));
  }

  std::string str() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  std::uint64_t u64() const {
    if (!j_.is_number_unsigned()) fail("expected a non-negative integer");
    return j_.get<std::uint64_t>();
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }

  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }

  std::vector<Field> items() const {
    if (!j_.is_array()) fail("expected an array");
    std::vector<Field> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_[i], ptr_ + "/" + std::to_string(i));
    return out;
  }

  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    for (const auto& f : items()) out.push_back(f.str());
    return out;
  }

  /// Runs a parse_* function, turning its invalid_argument into a field error.
  template <typename F>
  auto convert(F&& fn) const {
    std::string s = str();
    try {
      return fn(s);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

private:
  std::string child(std::string_view key) const {
    std::string k;
    for (char c : key) {
      if (c == '~') k += "~0";
      else if (c == '/') k += "~1";
      else k += c;
    }
    return ptr_ + "/" + k;
  }

  const json& j_;
  std::string ptr_;
};

inline std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline ConsensusDecl parse_consensus(const Field& f) {
  f.expect_object({"n", "f", "seed", "delay_us", "jitter_us", "drop", "base_timeout_us", "backoff", "retransmit_us",
                   "max_block_txs", "faults", "partitions", "nodes"});
  ConsensusDecl c;
  c.n = f.at("n").u64();
  c.f = f.at("f").u64();
  if (auto x = f.opt("seed")) c.seed = x->u64();
  if (auto x = f.opt("delay_us")) c.delay_us = x->u64();
  if (auto x = f.opt("jitter_us")) c.jitter_us = x->u64();
  if (auto x = f.opt("drop")) {
    c.drop = x->number();
    if (c.drop < 0 || c.drop > 1) x->fail("drop probability must lie in [0, 1]");
  }
  if (auto x = f.opt("base_timeout_us")) c.base_timeout_us = x->u64();
  if (auto x = f.opt("backoff")) {
    c.backoff = x->number();
    if (c.backoff < 1) x->fail("backoff must be at least 1");
  }
  if (auto x = f.opt("retransmit_us")) c.retransmit_us = x->u64();
  if (auto x = f.opt("max_block_txs")) {
    c.max_block_txs = x->u64();
    if (c.max_block_txs == 0) x->fail("max_block_txs must be positive");
  }
  if (c.n == 0) f.at("n").fail("need at least one node");
  if (c.n < 3 * c.f + 1)
    f.at("n").fail("n = " + std::to_string(c.n) + " violates n >= 3f+1 for f = " + std::to_string(c.f) + " (need n >= " +
                   std::to_string(3 * c.f + 1) + ")");
  if (auto x = f.opt("faults")) {
    if (!x->raw().is_object()) x->fail("expected an object keyed by node index");
    for (const auto& [k, v] : x->raw().items()) {
      Field entry(v, x->pointer() + "/" + k);
      NodeId node = 0;
      auto [p, ec] = std::from_chars(k.data(), k.data() + k.size(), node);
      if (ec != std::errc() || p != k.data() + k.size() || node >= c.n)
        entry.fail("fault key '" + k + "' is not a node index below n");
      NodeFaults probe;
      for (const auto& s : entry.items()) {
        try {
          apply_fault_script(probe, s.str());
        } catch (const FaultScriptError& e) {
          s.fail(e.what());
        }
        c.faults[node].push_back(s.str());
      }
    }
    if (c.faults.size() > c.f)
      x->fail(std::to_string(c.faults.size()) + " nodes carry fault scripts but f = " + std::to_string(c.f));
  }
  if (auto x = f.opt("partitions")) {
    for (const auto& p : x->items()) {
      p.expect_object({"groups", "from_us", "to_us"});
      Partition part;
      for (const auto& g : p.at("groups").items()) {
        std::vector<NodeId> grp;
        for (const auto& m : g.items()) {
          auto id = m.u64();
          if (id >= c.n) m.fail("node " + std::to_string(id) + " does not exist");
          grp.push_back(static_cast<NodeId>(id));
        }
        part.groups.push_back(std::move(grp));
      }
      part.from = p.at("from_us").u64();
      part.to = p.at("to_us").u64();
      if (part.to <= part.from) p.at("to_us").fail("partition must end after it starts");
      c.partitions.push_back(std::move(part));
    }
  }
  if (auto x = f.opt("nodes")) {
    c.nodes = x->strings();
    if (c.nodes.size() != c.n) x->fail("expected one institution per node");
  }
  return c;
}

inline EntityDecl parse_entity(const Field& f) {
  f.expect_object({"id", "kind", "accounts", "wallet", "publish", "issuer", "fee"});
  EntityDecl e;
  e.id = f.at("id").str();
  if (e.id.empty()) f.at("id").fail("entity id must not be empty");
  e.kind = f.at("kind").convert(parse_entity_kind);
  e.wallet = e.kind == EntityKind::Individual;
  if (auto x = f.opt("accounts"))
    for (const auto& a : x->items()) {
      a.expect_object({"id", "at"});
      e.accounts.push_back({a.at("id").str(), a.at("at").str()});
    }
  if (auto x = f.opt("wallet")) e.wallet = x->boolean();
  e.publish = e.wallet;
  if (auto x = f.opt("publish")) e.publish = x->boolean();
  if (e.publish && !e.wallet) f.at("publish").fail("cannot publish a stealth address without a wallet");
  if (auto x = f.opt("issuer")) e.issuer = x->boolean();
  if (e.issuer && e.kind != EntityKind::Intermediary) f.at("issuer").fail("credential issuers must be Intermediary");
  if (auto x = f.opt("fee")) {
    if (e.kind != EntityKind::Intermediary) x->fail("only intermediaries charge fees");
    e.fee = x->u64();
  }
  return e;
}

inline std::optional<NodeId> parse_node(const Field& step, const ConsensusDecl& c) {
  auto x = step.opt("node");
  if (!x) return std::nullopt;
  auto id = x->u64();
  if (id >= c.n) x->fail("node " + std::to_string(id) + " does not exist");
  return static_cast<NodeId>(id);
}

inline Step parse_step(const Field& f, const ConsensusDecl& c) {
  if (!f.raw().is_object()) f.fail("expected an object");
  Step s;
  s.pointer = f.pointer();
  const std::string op = f.at("op").str();
  bool known = false;
  for (auto o : kAllStepOps)
    if (to_string(o) == op) {
      s.op = o;
      known = true;
    }
  if (!known) f.at("op").fail("unknown step op '" + op + "'");

  switch (s.op) {
    case StepOp::Pay: {
      f.expect_object({"op", "label", "expect", "kind", "from", "to", "by", "amount", "fee", "legs", "credentials", "node"});
      s.kind = f.at("kind").convert(parse_tx_kind);
      if (s.kind == TxKind::MediatedBatch) {
        s.by = f.at("by").str();
        for (const auto& l : f.at("legs").items()) {
          l.expect_object({"from", "to", "amount", "fee"});
          LegDecl leg{l.at("from").str(), l.at("to").str(), l.at("amount").u64(), std::nullopt};
          if (auto x = l.opt("fee")) leg.fee = x->u64();
          s.legs.push_back(std::move(leg));
        }
        if (s.legs.size() < 2) f.at("legs").fail("a batch needs at least two legs");
        for (auto key : {"from", "to", "amount", "fee"})
          if (f.has(key)) f.at(key).fail("batch payments take their parties from legs");
      } else {
        if (s.kind == TxKind::Issue) {
          s.by = f.at("by").str();
          if (f.has("from")) f.at("from").fail("issue has no source");
          if (f.has("fee")) f.at("fee").fail("issue carries no fee");
        } else {
          s.from = f.at("from").str();
          if (f.has("by")) f.at("by").fail("only issue and batch payments name an actor");
        }
        s.to = f.at("to").str();
        s.amount = f.at("amount").u64();
        if (auto x = f.opt("fee")) s.fee = x->u64();
        if (f.has("legs")) f.at("legs").fail("legs belong to MediatedBatch payments");
      }
      if (auto x = f.opt("credentials")) s.credentials = x->strings();
      s.node = parse_node(f, c);
      break;
    }
    case StepOp::Replay:
      f.expect_object({"op", "label", "expect", "of", "node"});
      s.of = f.at("of").str();
      s.node = parse_node(f, c);
      break;
    case StepOp::Blacklist:
      f.expect_object({"op", "label", "expect", "target", "flag"});
      s.target = f.at("target").str();
      if (auto x = f.opt("flag")) s.flag = x->boolean();
      break;
    case StepOp::Credential:
      f.expect_object({"op", "label", "expect", "holder", "issuer", "name"});
      s.holder = f.at("holder").str();
      s.issuer = f.at("issuer").str();
      s.name = f.at("name").str();
      break;
    case StepOp::Attack: {
      f.expect_object({"op", "label", "expect", "source", "heuristics", "sampler", "ring_size", "trials", "seed"});
      if (auto x = f.opt("source")) s.source = x->str();
      if (s.source != "chain" && s.source != "simulated") f.at("source").fail("source must be 'chain' or 'simulated'");
      if (auto x = f.opt("heuristics")) {
        for (const auto& h : x->items()) s.heuristics.push_back(h.convert(parse_heuristic));
      } else {
        s.heuristics.assign(kAllHeuristics.begin(), kAllHeuristics.end());
      }
      if (s.heuristics.empty()) f.at("heuristics").fail("name at least one heuristic");
      if (s.source == "simulated") {
        if (auto x = f.opt("sampler")) {
          s.sampler = x->str();
          if (s.sampler != "uniform" && s.sampler != "age-biased") x->fail("unknown decoy sampler '" + s.sampler + "'");
        }
        s.ring_size = f.at("ring_size").u64();
        if (s.ring_size == 0) f.at("ring_size").fail("ring size must be positive");
        s.trials = f.at("trials").u64();
        if (auto x = f.opt("seed")) s.attack_seed = x->u64();
      } else {
        for (auto key : {"sampler", "ring_size", "trials"})
          if (f.has(key)) f.at(key).fail("'" + std::string(key) + "' applies to simulated attacks");
        if (auto x = f.opt("seed")) s.attack_seed = x->u64();
      }
      break;
    }
    case StepOp::Tax:
      f.expect_object({"op", "label", "expect", "entity", "from_height", "to_height"});
      s.entity = f.at("entity").str();
      if (auto x = f.opt("from_height")) s.from_height = x->u64();
      if (auto x = f.opt("to_height")) s.to_height = x->u64();
      break;
    case StepOp::Disclose:
      f.expect_object({"op", "label", "expect", "of", "lie"});
      s.of = f.at("of").str();
      if (auto x = f.opt("lie")) s.lie = x->boolean();
      break;
    case StepOp::Matrix:
      f.expect_object({"op", "label", "expect"});
      break;
    case StepOp::Advance:
      f.expect_object({"op", "label", "expect", "duration_us"});
      s.duration_us = f.at("duration_us").u64();
      break;
  }
  if (auto x = f.opt("label")) s.label = x->str();
  if (auto x = f.opt("expect")) s.expect = x->str();
  return s;
}

/// Cross-references: every id a step or genesis entry names must exist.
inline void check_references(const Scenario& sc, const Field& root) {
  std::map<std::string, const EntityDecl*> ents;
  std::map<std::string, std::string> account_owner;
  const auto entities = root.at("entities").items();
  for (std::size_t i = 0; i < sc.entities.size(); ++i) {
    const auto& e = sc.entities[i];
    if (!ents.emplace(e.id, &e).second) entities[i].at("id").fail("duplicate entity id '" + e.id + "'");
  }
  for (std::size_t i = 0; i < sc.entities.size(); ++i) {
    const auto& e = sc.entities[i];
    for (std::size_t a = 0; a < e.accounts.size(); ++a) {
      const auto& acct = e.accounts[a];
      Field af = entities[i].at("accounts").items()[a];
      auto inst = ents.find(acct.at);
      if (inst == ents.end()) af.at("at").fail("unknown institution '" + acct.at + "'");
      if (!can_hold_accounts(inst->second->kind))
        af.at("at").fail("'" + acct.at + "' is a " + std::string(to_string(inst->second->kind)) + " and cannot hold accounts");
      if (ents.count(acct.id) || !account_owner.emplace(acct.id, e.id).second)
        af.at("id").fail("duplicate id '" + acct.id + "'");
    }
  }
  auto is_account = [&](const std::string& id) { return account_owner.count(id) != 0; };
  auto has_wallet = [&](const std::string& id) {
    auto it = ents.find(id);
    return it != ents.end() && it->second->wallet;
  };
  if (root.has("genesis")) {
    const auto gen = root.at("genesis").items();
    for (std::size_t i = 0; i < sc.genesis.size(); ++i) {
      const auto& g = sc.genesis[i];
      if (g.account && !is_account(*g.account)) gen[i].at("account").fail("unknown account '" + *g.account + "'");
      if (g.store && !has_wallet(*g.store)) gen[i].at("store").fail("'" + *g.store + "' holds no wallet");
    }
  }
  if (root.has("blacklist")) {
    const auto bl = root.at("blacklist").items();
    for (std::size_t i = 0; i < sc.blacklist.size(); ++i)
      if (!ents.count(sc.blacklist[i]) && !is_account(sc.blacklist[i])) bl[i].fail("unknown id '" + sc.blacklist[i] + "'");
  }

  std::map<std::string, const Step*> labels;
  std::set<std::string> credentials;
  const auto steps = root.at("steps").items();
  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    const Step& s = sc.steps[i];
    const Field& f = steps[i];
    auto need_entity = [&](const char* key, const std::string& id) {
      if (!ents.count(id)) f.at(key).fail("unknown entity '" + id + "'");
    };
    auto need_party = [&](const Field& at, const std::string& id) {
      if (!ents.count(id) && !is_account(id)) at.fail("unknown entity or account '" + id + "'");
    };
    auto need_wallet = [&](const Field& at, const std::string& id) {
      if (!has_wallet(id)) at.fail("'" + id + "' holds no wallet");
    };
    switch (s.op) {
      case StepOp::Pay: {
        for (std::size_t c = 0; c < s.credentials.size(); ++c)
          if (!credentials.count(s.credentials[c]))
            f.at("credentials").items()[c].fail("no earlier credential step named '" + s.credentials[c] + "'");
        auto [src, dst] = expected_endpoints(s.kind);
        if (s.kind == TxKind::MediatedBatch || s.kind == TxKind::Issue) need_entity("by", s.by);
        if (s.kind == TxKind::MediatedBatch) {
          const auto legs = f.at("legs").items();
          for (std::size_t l = 0; l < s.legs.size(); ++l) {
            need_wallet(legs[l].at("from"), s.legs[l].from);
            need_wallet(legs[l].at("to"), s.legs[l].to);
          }
          break;
        }
        if (src == EndpointClass::Account) need_party(f.at("from"), s.from);
        if (src == EndpointClass::Store) need_wallet(f.at("from"), s.from);
        if (dst == EndpointClass::Account) need_party(f.at("to"), s.to);
        if (dst == EndpointClass::Store) need_wallet(f.at("to"), s.to);
        break;
      }
      case StepOp::Replay:
      case StepOp::Disclose: {
        auto it = labels.find(s.of);
        if (it == labels.end() || it->second->op != StepOp::Pay)
          f.at("of").fail("no earlier pay step labelled '" + s.of + "'");
        break;
      }
      case StepOp::Blacklist: need_party(f.at("target"), s.target); break;
      case StepOp::Credential:
        need_entity("holder", s.holder);
        need_entity("issuer", s.issuer);
        if (!ents.at(s.issuer)->issuer) f.at("issuer").fail("'" + s.issuer + "' does not issue credentials");
        if (!credentials.insert(s.name).second) f.at("name").fail("duplicate credential name '" + s.name + "'");
        break;
      case StepOp::Tax: need_entity("entity", s.entity); break;
      default: break;
    }
    if (s.label && !labels.emplace(*s.label, &s).second) f.at("label").fail("duplicate label '" + *s.label + "'");
  }
  if (root.has("expect")) {
    Field ex = root.at("expect");
    if (auto b = ex.opt("balances"))
      for (const auto& [k, v] : sc.expect.balances)
        if (!is_account(k)) b->at(k).fail("unknown account '" + k + "'");
    if (auto st = ex.opt("stores"))
      for (const auto& [k, v] : sc.expect.stores)
        if (!has_wallet(k)) st->at(k).fail("'" + k + "' holds no wallet");
  }
}

}  // namespace detail

/// Parses and validates a scenario document.
inline Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ScenarioError(detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1), msg);
  }
  detail::Field root(doc, "");
  root.expect_object({"name", "mode", "profile", "range_bits", "ring_size", "sampler", "decoys", "consensus", "entities",
                      "genesis", "blacklist", "threshold", "steps", "expect"});
  Scenario sc;
  sc.name = root.at("name").str();
  sc.mode = root.at("mode").convert(parse_mode);
  if (auto x = root.opt("profile")) sc.profile = x->convert(parse_profile);
  if (auto x = root.opt("range_bits")) {
    auto k = x->u64();
    if (k == 0 || k > 63) x->fail("range_bits must lie in [1, 63]");
    sc.range_bits = static_cast<unsigned>(k);
  }
  if (sc.profile == Profile::Test && sc.range_bits > 9)
    detail::Field(doc, "/range_bits").fail("the test profile allows at most 9 range bits");
  if (auto x = root.opt("ring_size")) {
    sc.ring_size = x->u64();
    if (sc.ring_size == 0) x->fail("ring size must be positive");
  }
  if (auto x = root.opt("sampler")) {
    sc.sampler = x->str();
    if (sc.sampler != "uniform" && sc.sampler != "age-biased") x->fail("unknown decoy sampler '" + sc.sampler + "'");
  }
  if (auto x = root.opt("decoys")) sc.decoys = x->u64();
  if (auto x = root.opt("consensus")) sc.consensus = detail::parse_consensus(*x);
  for (const auto& e : root.at("entities").items()) sc.entities.push_back(detail::parse_entity(e));
  if (auto x = root.opt("genesis"))
    for (const auto& g : x->items()) {
      g.expect_object({"account", "store", "amount"});
      GenesisEntry e;
      if (auto a = g.opt("account")) e.account = a->str();
      if (auto s = g.opt("store")) e.store = s->str();
      if (e.account.has_value() == e.store.has_value()) g.fail("give exactly one of 'account' or 'store'");
      e.amount = g.at("amount").u64();
      if (e.store && (e.amount >> sc.range_bits)) g.at("amount").fail("store amount exceeds the range-proof width");
      sc.genesis.push_back(std::move(e));
    }
  if (auto x = root.opt("blacklist")) sc.blacklist = x->strings();
  if (auto x = root.opt("threshold")) sc.threshold = x->u64();
  for (const auto& s : root.at("steps").items()) sc.steps.push_back(detail::parse_step(s, sc.consensus));
  if (auto x = root.opt("expect")) {
    x->expect_object({"desiderata", "balances", "stores"});
    if (auto d = x->opt("desiderata")) {
      if (!d->raw().is_object()) d->fail("expected an object keyed by desideratum");
      for (const auto& [k, v] : d->raw().items()) {
        detail::Field vf = d->at(k);
        Desideratum row;
        try {
          row = parse_desideratum(k);
        } catch (const std::invalid_argument& e) {
          vf.fail(e.what());
        }
        sc.expect.desiderata[row] = vf.convert(parse_support);
      }
    }
    if (auto b = x->opt("balances")) {
      if (!b->raw().is_object()) b->fail("expected an object keyed by account");
      for (const auto& [k, v] : b->raw().items()) sc.expect.balances[k] = b->at(k).u64();
    }
    if (auto st = x->opt("stores")) {
      if (!st->raw().is_object()) st->fail("expected an object keyed by holder");
      for (const auto& [k, v] : st->raw().items()) sc.expect.stores[k] = st->at(k).u64();
    }
  }
  detail::check_references(sc, root);
  return sc;
}

}  // namespace pvx
