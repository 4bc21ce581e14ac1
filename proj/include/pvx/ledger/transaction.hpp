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
#include <string>
#include <vector>

#include "pvx/bytes.hpp"
#include "pvx/hash.hpp"
#include "pvx/ledger/tx_kind.hpp"
#include "pvx/primitives.hpp"

namespace pvx {

struct TransparentInput {
  std::string account;
  std::uint64_t amount = 0;
  std::uint64_t sequence = 0;  // must equal the account's current sequence
};

struct TransparentOutput {
  std::string account;
  std::uint64_t amount = 0;
  std::string owner;
};

struct ShieldedInput {
  std::vector<std::uint64_t> ring;  // global output indices, strictly increasing
  Commitment pseudo;                // same amount as the true member, fresh blinding
  SpendSignature signature;
};

struct ShieldedOutput {
  Element address;    // one-time address P
  Element ephemeral;  // E
  Commitment commitment;
  std::uint64_t encrypted_amount = 0;
  RangeProof range;
};

/// Schnorr proof of knowledge of z for the excess X = G^z.
struct Kernel {
  Element excess;
  Scalar challenge;
  Scalar response;
};

struct Transaction {
  TxKind kind = TxKind::TransparentTransfer;
  std::string actor;  // processing institution, intermediary or issuer
  std::vector<TransparentInput> transparent_inputs;
  std::vector<TransparentOutput> transparent_outputs;
  std::vector<ShieldedInput> shielded_inputs;
  std::vector<ShieldedOutput> shielded_outputs;
  std::uint64_t fee = 0;
  std::vector<Credential> credentials;
  std::vector<Kernel> kernels;
};

inline void encode_range_proof(const Group& g, ByteWriter& w, const RangeProof& p) {
  w.u32(static_cast<std::uint32_t>(p.bits.size()));
  for (const auto& b : p.bits)
    w.field(g.encode(b.commitment.point)).field(g.encode(b.c0)).field(g.encode(b.responses[0])).field(g.encode(b.responses[1]));
}

/// Canonical signed body. Field order: kind, actor, transparent inputs,
/// transparent outputs, shielded inputs (ring, pseudo commitment, key image),
/// shielded outputs, fee, credentials. Spend signature scalars and kernels
/// are excluded because they sign this encoding.
inline Bytes encode_body(const Group& g, const Transaction& tx) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(tx.kind)).field(tx.actor);
  w.u32(static_cast<std::uint32_t>(tx.transparent_inputs.size()));
  for (const auto& in : tx.transparent_inputs) w.field(in.account).u64(in.amount).u64(in.sequence);
  w.u32(static_cast<std::uint32_t>(tx.transparent_outputs.size()));
  for (const auto& out : tx.transparent_outputs) w.field(out.account).u64(out.amount).field(out.owner);
  w.u32(static_cast<std::uint32_t>(tx.shielded_inputs.size()));
  for (const auto& in : tx.shielded_inputs) {
    w.u32(static_cast<std::uint32_t>(in.ring.size()));
    for (auto idx : in.ring) w.u64(idx);
    w.field(g.encode(in.pseudo.point)).field(g.encode(in.signature.key_image));
  }
  w.u32(static_cast<std::uint32_t>(tx.shielded_outputs.size()));
  for (const auto& out : tx.shielded_outputs) {
    w.field(g.encode(out.address)).field(g.encode(out.ephemeral)).field(g.encode(out.commitment.point));
    w.u64(out.encrypted_amount);
    encode_range_proof(g, w, out.range);
  }
  w.u64(tx.fee);
  w.u32(static_cast<std::uint32_t>(tx.credentials.size()));
  for (const auto& c : tx.credentials)
    w.field(c.attribute).field(c.serial).field(g.encode(c.nonce)).field(g.encode(c.response));
  return std::move(w).take();
}

/// Body followed by every signature; identifies the exact bytes a node saw.
inline Bytes encode_wire(const Group& g, const Transaction& tx) {
  ByteWriter w;
  w.field(encode_body(g, tx));
  w.u32(static_cast<std::uint32_t>(tx.shielded_inputs.size()));
  for (const auto& in : tx.shielded_inputs) {
    w.field(g.encode(in.signature.c0)).u32(static_cast<std::uint32_t>(in.signature.responses.size()));
    for (const auto& s : in.signature.responses) w.field(g.encode(s));
  }
  w.u32(static_cast<std::uint32_t>(tx.kernels.size()));
  for (const auto& k : tx.kernels) w.field(g.encode(k.excess)).field(g.encode(k.challenge)).field(g.encode(k.response));
  return std::move(w).take();
}

/// Transaction id: the first 32 bytes of the "pvx/tx" hash of the body.
inline Digest tx_digest(const Group& g, const Transaction& tx) {
  Transcript t(tags::kTransaction);
  t.absorb(encode_body(g, tx));
  return t.finish_digest();
}

inline Digest wire_digest(const Group& g, const Transaction& tx) {
  Transcript t(tags::kTransaction);
  t.absorb("wire").absorb(encode_wire(g, tx));
  return t.finish_digest();
}

inline Scalar kernel_challenge(const Group& g, const Element& excess, const Element& nonce, const Digest& digest) {
  return g.hash_to_scalar(tags::kExcess, {g.encode(excess), g.encode(nonce), digest.view()});
}

inline Kernel sign_kernel(const Group& g, const Scalar& z, const Digest& digest) {
  Transcript t(tags::kNonce);
  t.absorb("kernel").absorb(g.encode(z)).absorb(digest.view());
  Scalar k = g.reduce(t.finish());
  Kernel out;
  out.excess = g.pow_g(z);
  Element r = g.pow_g(k);
  out.challenge = kernel_challenge(g, out.excess, r, digest);
  out.response = g.add(k, g.mul(out.challenge, z));
  return out;
}

inline bool verify_kernel(const Group& g, const Kernel& k, const Digest& digest) {
  if (!g.valid(k.excess)) return false;
  Element r = g.op(g.pow_g(k.response), g.inverse(g.pow(k.excess, k.challenge)));
  return kernel_challenge(g, k.excess, r, digest) == k.challenge;
}

}  // namespace pvx
