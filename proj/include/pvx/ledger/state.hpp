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
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pvx/bytes.hpp"
#include "pvx/group.hpp"
#include "pvx/hash.hpp"
#include "pvx/primitives/commitment.hpp"

namespace pvx {

/// A shielded output as stored on the ledger. Outputs are never removed;
/// whether one is spent is only known to whoever can link it to a key image.
struct OutputRecord {
  Element address;
  Element ephemeral;
  Commitment commitment;
  std::uint64_t encrypted_amount = 0;
  std::uint64_t height = 0;
  Digest tx;
};

inline const std::string kNetworkFeeCollector = "network";

struct LedgerState {
  std::map<std::string, std::uint64_t> balances;
  std::map<std::string, std::uint64_t> sequences;
  std::vector<OutputRecord> outputs;
  std::set<Bytes> addresses;   // encoded one-time addresses, for uniqueness
  std::set<Bytes> key_images;  // consumed
  std::set<Bytes> serials;     // consumed credential serials
  std::uint64_t issued = 0;
  std::map<std::string, std::uint64_t> fees;  // by collector
  std::uint64_t height = 0;

  std::uint64_t balance(const std::string& account) const {
    auto it = balances.find(account);
    return it == balances.end() ? 0 : it->second;
  }
  std::uint64_t sequence(const std::string& account) const {
    auto it = sequences.find(account);
    return it == sequences.end() ? 0 : it->second;
  }
};

/// Canonical digest over every field, in a fixed order, so replicas can
/// compare states byte for byte.
inline Digest state_digest(const Group& g, const LedgerState& s) {
  ByteWriter w;
  w.u64(s.height).u64(s.issued);
  w.u32(static_cast<std::uint32_t>(s.balances.size()));
  for (const auto& [k, v] : s.balances) w.field(k).u64(v);
  w.u32(static_cast<std::uint32_t>(s.sequences.size()));
  for (const auto& [k, v] : s.sequences) w.field(k).u64(v);
  w.u32(static_cast<std::uint32_t>(s.outputs.size()));
  for (const auto& o : s.outputs) {
    w.field(g.encode(o.address)).field(g.encode(o.ephemeral)).field(g.encode(o.commitment.point));
    w.u64(o.encrypted_amount).u64(o.height).field(o.tx.view());
  }
  w.u32(static_cast<std::uint32_t>(s.key_images.size()));
  for (const auto& k : s.key_images) w.field(k);
  w.u32(static_cast<std::uint32_t>(s.serials.size()));
  for (const auto& k : s.serials) w.field(k);
  w.u32(static_cast<std::uint32_t>(s.fees.size()));
  for (const auto& [k, v] : s.fees) w.field(k).u64(v);
  Transcript t(tags::kState);
  t.absorb(w.bytes());
  return t.finish_digest();
}

}  // namespace pvx
