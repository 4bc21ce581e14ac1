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
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pvx/observer/view.hpp"
#include "pvx/rng.hpp"

namespace pvx {

enum class Heuristic : std::uint8_t { NewestMember, UniformGuess, KeyImageGraph };

inline constexpr std::array<Heuristic, 3> kAllHeuristics = {Heuristic::NewestMember, Heuristic::UniformGuess,
                                                            Heuristic::KeyImageGraph};

inline std::string_view to_string(Heuristic h) {
  switch (h) {
    case Heuristic::NewestMember: return "newest-member";
    case Heuristic::UniformGuess: return "uniform-guess";
    case Heuristic::KeyImageGraph: return "key-image-graph";
  }
  return "?";
}

inline Heuristic parse_heuristic(std::string_view s) {
  for (auto h : kAllHeuristics)
    if (to_string(h) == s) return h;
  throw std::invalid_argument("unknown heuristic '" + std::string(s) + "'");
}

/// A spend as the public sees it.
struct SpendObservation {
  std::vector<std::uint64_t> ring;
  Bytes key_image;
};

/// key image -> true ring member. Lives only in the harness.
using GroundTruth = std::map<Bytes, std::uint64_t>;

struct LinkAttackStats {
  Heuristic heuristic = Heuristic::NewestMember;
  std::uint64_t trials = 0;
  std::uint64_t correct = 0;
  double accuracy = 0;
  double baseline = 0;  // mean of 1/|ring|
  double z = 0;         // two-sided binomial z against the baseline
  friend bool operator==(const LinkAttackStats&, const LinkAttackStats&) = default;
};

inline std::vector<SpendObservation> observe_spends(const Group& g, const Chain& chain) {
  std::vector<SpendObservation> out;
  for (const auto& b : chain)
    for (const auto& tx : b->txs)
      for (const auto& in : tx.shielded_inputs) out.push_back({in.ring, g.encode(in.signature.key_image)});
  return out;
}

inline GroundTruth ground_truth(const std::vector<const Wallet*>& wallets) {
  GroundTruth t;
  for (const Wallet* w : wallets)
    for (const auto& o : w->outputs()) t[o.key_image] = o.index;
  return t;
}

namespace detail {

/// Chain-reaction analysis: an output that is the only unexplained member
/// of some ring is spent there, so it is a decoy everywhere else.
inline std::vector<std::vector<std::uint64_t>> surviving_candidates(const std::vector<SpendObservation>& spends) {
  std::vector<std::vector<std::uint64_t>> cand;
  for (const auto& s : spends) cand.push_back(s.ring);
  std::map<std::uint64_t, std::size_t> spent_by;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      auto& c = cand[i];
      std::vector<std::uint64_t> keep;
      for (auto m : c) {
        auto it = spent_by.find(m);
        if (it == spent_by.end() || it->second == i) keep.push_back(m);
      }
      if (keep.empty()) continue;  // inconsistent view; leave the ring alone
      if (keep.size() != c.size()) {
        c = std::move(keep);
        changed = true;
      }
      if (c.size() == 1 && spent_by.emplace(c[0], i).second) changed = true;
    }
  }
  return cand;
}

}  // namespace detail

inline LinkAttackStats run_link_attack(const std::vector<SpendObservation>& spends, Heuristic h,
                                       const GroundTruth& truth, std::uint64_t seed = 0) {
  Rng rng(seed);
  LinkAttackStats st;
  st.heuristic = h;
  std::vector<std::vector<std::uint64_t>> cand;
  if (h == Heuristic::KeyImageGraph) cand = detail::surviving_candidates(spends);
  double expected = 0, variance = 0;
  for (std::size_t i = 0; i < spends.size(); ++i) {
    const auto& s = spends[i];
    if (s.ring.empty()) continue;
    auto t = truth.find(s.key_image);
    if (t == truth.end()) continue;
    std::uint64_t guess = 0;
    switch (h) {
      case Heuristic::NewestMember: guess = *std::max_element(s.ring.begin(), s.ring.end()); break;
      case Heuristic::UniformGuess: guess = s.ring[rng.below(s.ring.size())]; break;
      case Heuristic::KeyImageGraph: guess = cand[i][rng.below(cand[i].size())]; break;
    }
    const double p = 1.0 / static_cast<double>(s.ring.size());
    expected += p;
    variance += p * (1 - p);
    ++st.trials;
    st.correct += guess == t->second;
  }
  if (st.trials) {
    st.accuracy = static_cast<double>(st.correct) / static_cast<double>(st.trials);
    st.baseline = expected / static_cast<double>(st.trials);
    if (variance > 0) st.z = (static_cast<double>(st.correct) - expected) / std::sqrt(variance);
  }
  return st;
}

struct SimulatedSpends {
  std::vector<SpendObservation> spends;
  GroundTruth truth;
};

/// Desk-scale spend model: a population of 2*trials outputs, each spend
/// consuming a distinct output picked uniformly, rings drawn by `sampler`.
/// True spends are therefore uniform over the population; a sampler whose
/// decoys follow any other distribution is distinguishable.
inline SimulatedSpends simulate_spends(const DecoySampler& sampler, std::size_t ring_size, std::uint64_t trials,
                                       std::uint64_t seed) {
  if (ring_size == 0) throw std::invalid_argument("ring size must be positive");
  Rng rng(seed);
  const std::uint64_t population = std::max<std::uint64_t>(2 * trials, 2 * ring_size);
  std::vector<std::uint64_t> order(population);
  for (std::uint64_t i = 0; i < population; ++i) order[i] = i;
  rng.shuffle(order);
  SimulatedSpends out;
  for (std::uint64_t t = 0; t < trials; ++t) {
    ByteWriter w;
    w.u64(t);
    Bytes image = std::move(w).take();
    out.spends.push_back({sampler.ring(order[t], population, ring_size, rng), image});
    out.truth[image] = order[t];
  }
  return out;
}

}  // namespace pvx
