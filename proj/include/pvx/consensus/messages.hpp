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

#include <sodium.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pvx/hash.hpp"
#include "pvx/ledger/validate.hpp"

namespace pvx {

using NodeId = std::uint32_t;
using BlockPtr = std::shared_ptr<const Block>;
using TxPtr = std::shared_ptr<const Transaction>;

enum class MsgType : std::uint8_t {
  Request,     // client transaction, or one forwarded to the primary
  PrePrepare,
  Prepare,
  Commit,      // carries the block so commit certificates can be relayed
  ViewChange,
  NewView,
  Status,      // heartbeat; lagging peers are answered with commit certificates
};

inline std::string_view to_string(MsgType t) {
  switch (t) {
    case MsgType::Request: return "Request";
    case MsgType::PrePrepare: return "PrePrepare";
    case MsgType::Prepare: return "Prepare";
    case MsgType::Commit: return "Commit";
    case MsgType::ViewChange: return "ViewChange";
    case MsgType::NewView: return "NewView";
    case MsgType::Status: return "Status";
  }
  return "?";
}

struct PreparedCert {
  std::uint64_t view = 0;
  std::uint64_t seq = 0;
  Digest digest;
  BlockPtr block;
};

struct ConsensusMessage;
using MessagePtr = std::shared_ptr<const ConsensusMessage>;

struct ConsensusMessage {
  MsgType type = MsgType::Status;
  std::uint64_t view = 0;
  std::uint64_t seq = 0;
  Digest digest;
  NodeId sender = 0;
  std::array<std::uint8_t, 32> tag{};

  BlockPtr block;                          // PrePrepare, Commit, NewView reproposal
  TxPtr tx;                                // Request
  Digest tx_id;                            // Request: wire digest of tx
  std::uint64_t last_exec = 0;             // ViewChange, Status
  std::optional<PreparedCert> prepared;    // ViewChange
  std::vector<MessagePtr> view_changes;    // NewView
};

/// Bytes covered by the authentication tag. Blocks and transactions are
/// bound through their digests, nested view changes through their own tags.
inline Bytes signing_bytes(const ConsensusMessage& m) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(m.type)).u64(m.view).u64(m.seq).raw(m.digest.view()).u32(m.sender);
  w.raw(m.tx_id.view()).u64(m.last_exec);
  w.u8(m.prepared ? 1 : 0);
  if (m.prepared) w.u64(m.prepared->view).u64(m.prepared->seq).raw(m.prepared->digest.view());
  w.u32(static_cast<std::uint32_t>(m.view_changes.size()));
  for (const auto& vc : m.view_changes) w.u32(vc->sender).raw(vc->tag);
  return std::move(w).take();
}

/// Per-node MAC keys. Every tag can be checked by every node, so relayed
/// messages stay attributable to their author; a faulty node can only tag
/// with its own key.
class KeyRing {
public:
  KeyRing(std::uint64_t seed, std::size_t n) {
    ensure_sodium();
    for (std::size_t i = 0; i < n; ++i) {
      Transcript t(tags::kMac);
      t.absorb_u64(seed).absorb_u64(i);
      Wide w = t.finish();
      std::array<std::uint8_t, crypto_auth_hmacsha256_KEYBYTES> k{};
      std::copy_n(w.begin(), k.size(), k.begin());
      keys_.push_back(k);
    }
  }

  void sign(ConsensusMessage& m) const {
    Bytes b = signing_bytes(m);
    crypto_auth_hmacsha256(m.tag.data(), b.data(), b.size(), keys_.at(m.sender).data());
  }

  bool verify(const ConsensusMessage& m) const {
    if (m.sender >= keys_.size()) return false;
    Bytes b = signing_bytes(m);
    return crypto_auth_hmacsha256_verify(m.tag.data(), b.data(), b.size(), keys_[m.sender].data()) == 0;
  }

private:
  std::vector<std::array<std::uint8_t, crypto_auth_hmacsha256_KEYBYTES>> keys_;
};

}  // namespace pvx
