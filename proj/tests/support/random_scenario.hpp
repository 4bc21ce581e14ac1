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

// Random but well-formed scenario documents for the conservation sweep.
// A rough balance book keeps most payments affordable; the ones that are
// not still exercise the rejection paths.

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "pvx/scenario.hpp"

namespace pvx::testing {

struct RandomScenarioOptions {
  Mode mode = Mode::Mediated;
  std::uint64_t seed = 1;
  std::size_t steps = 50;
  std::size_t people = 4;
};

inline nlohmann::json random_scenario(const RandomScenarioOptions& o) {
  using nlohmann::json;
  Rng rng(o.seed);
  const bool mediated = o.mode == Mode::Mediated;
  json doc = {{"name", "random-" + std::to_string(o.seed)},
              {"mode", mediated ? "mediated" : "supported"},
              {"ring_size", 5},
              {"decoys", 12},
              {"consensus", {{"n", 4}, {"f", 1}, {"seed", o.seed}}}};

  json entities = json::array();
  entities.push_back({{"id", "bank"}, {"kind", "RegulatedInstitution"}});
  entities.push_back({{"id", "mixer"}, {"kind", "Intermediary"}, {"issuer", mediated}, {"fee", 1}});
  entities.push_back({{"id", "shop"}, {"kind", "RegisteredBusiness"}, {"accounts", {{{"id", "shop-acct"}, {"at", "bank"}}}}});
  if (mediated)
    entities.push_back({{"id", "cb"}, {"kind", "CentralBank"}, {"accounts", {{{"id", "reserve"}, {"at", "cb"}}}}});

  std::vector<std::string> people;
  std::map<std::string, std::uint64_t> account, store;
  json genesis = json::array();
  for (std::size_t i = 0; i < o.people; ++i) {
    std::string p = "p" + std::to_string(i);
    people.push_back(p);
    entities.push_back(
        {{"id", p}, {"kind", "Individual"}, {"accounts", {{{"id", p + "-acct"}, {"at", "bank"}}}}});
    if (!mediated) {
      account[p] = 1000;
      store[p] = 500;
      genesis.push_back({{"account", p + "-acct"}, {"amount", 1000}});
      genesis.push_back({{"store", p}, {"amount", 500}});
    }
  }
  doc["entities"] = entities;
  doc["genesis"] = genesis;

  auto pick = [&] { return people[rng.below(people.size())]; };
  auto other = [&](const std::string& p) {
    std::string q;
    do q = pick();
    while (q == p);
    return q;
  };
  auto some = [&](std::uint64_t cap) { return cap < 2 ? std::uint64_t{1} : 1 + rng.below(cap / 2); };

  json steps = json::array();
  std::size_t creds = 0;
  while (steps.size() < o.steps) {
    const auto roll = rng.below(10);
    if (roll < 2) {
      std::string p = pick();
      if (mediated) {
        std::uint64_t v = 50 + rng.below(450);
        steps.push_back({{"op", "pay"}, {"kind", "Issue"}, {"by", "cb"}, {"to", p}, {"amount", v}});
        account[p] += v;
      } else {
        std::string q = other(p);
        std::uint64_t v = some(store[p]);
        steps.push_back({{"op", "pay"}, {"kind", "ShieldedTransfer"}, {"from", p}, {"to", q}, {"amount", v}});
        store[p] -= std::min(v, store[p]);
        store[q] += v;
      }
    } else if (roll < 4) {
      std::string p = pick(), q = other(p);
      std::uint64_t v = some(account[p]);
      steps.push_back({{"op", "pay"}, {"kind", "TransparentTransfer"}, {"from", p}, {"to", q}, {"amount", v}});
      account[p] -= std::min(v, account[p]);
      account[q] += v;
    } else if (roll < 6) {
      std::string p = pick(), q = rng.below(2) ? p : other(p);
      std::uint64_t v = some(account[p]);
      steps.push_back({{"op", "pay"}, {"kind", "Shield"}, {"from", p}, {"to", q}, {"amount", v}});
      account[p] -= std::min(v, account[p]);
      store[q] += v;
    } else if (roll < 8) {
      std::string p = pick();
      bool to_shop = rng.below(2);
      std::string q = to_shop ? "shop" : other(p);
      std::uint64_t v = some(store[p] / 2);
      steps.push_back({{"op", "pay"}, {"kind", "Unshield"}, {"from", p}, {"to", q}, {"amount", v}});
      store[p] -= std::min(v, store[p]);
      if (!to_shop) account[q] += v;
    } else {
      if (steps.size() + (mediated ? 3 : 1) > o.steps) continue;
      std::string a = pick(), b = other(a);
      std::uint64_t va = some(store[a] / 2), vb = some(store[b] / 2);
      json pay = {{"op", "pay"},
                  {"kind", "MediatedBatch"},
                  {"by", "mixer"},
                  {"legs", {{{"from", a}, {"to", b}, {"amount", va}}, {{"from", b}, {"to", a}, {"amount", vb}}}}};
      if (mediated) {
        std::string ca = "c" + std::to_string(creds++), cb = "c" + std::to_string(creds++);
        steps.push_back({{"op", "credential"}, {"holder", a}, {"issuer", "mixer"}, {"name", ca}});
        steps.push_back({{"op", "credential"}, {"holder", b}, {"issuer", "mixer"}, {"name", cb}});
        pay["credentials"] = {ca, cb};
      }
      steps.push_back(pay);
      store[a] = store[a] - std::min(va + 1, store[a]) + vb;
      store[b] = store[b] - std::min(vb + 1, store[b]) + va;
    }
  }
  doc["steps"] = steps;
  return doc;
}

}  // namespace pvx::testing
