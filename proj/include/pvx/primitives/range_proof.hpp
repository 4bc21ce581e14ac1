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
#include <stdexcept>
#include <string>
#include <vector>

#include "pvx/group.hpp"
#include "pvx/primitives/commitment.hpp"
#include "pvx/primitives/ring_signature.hpp"

namespace pvx {

inline constexpr unsigned kDefaultRangeBits = 32;

/// Commitment to one bit plus a two-member OR proof that it opens to 0 or 1.
struct BitProof {
  Commitment commitment;
  Scalar c0;
  std::array<Scalar, 2> responses;

  friend bool operator==(const BitProof&, const BitProof&) = default;
};

/// Bit-decomposition range proof: v = sum 2^j b_j with b_j in {0,1}.
/// The bit blindings are chosen so that prod C_j^(2^j) equals the value
/// commitment exactly; the verifier checks that product directly.
struct RangeProof {
  std::vector<BitProof> bits;

  friend bool operator==(const RangeProof&, const RangeProof&) = default;
};

namespace detail {

inline void check_range_width(const Group& group, unsigned bits) {
  if (bits == 0 || bits > 62) throw std::invalid_argument("range width must be in [1, 62]");
  if (!group.scalar_fits(std::uint64_t{1} << bits))
    throw std::invalid_argument("range width " + std::to_string(bits) + " does not fit below the group order");
}

inline Bytes bit_message(const Group& group, const Commitment& value, unsigned bits, unsigned j) {
  ByteWriter w;
  w.field(group.encode(value.point)).u32(bits).u32(j);
  return std::move(w).take();
}

}  // namespace detail

/// Throws std::out_of_range if v >= 2^bits, std::invalid_argument if the
/// width does not fit the group.
inline RangeProof prove_range(const Group& group, std::uint64_t v, const Scalar& r, unsigned bits = kDefaultRangeBits) {
  detail::check_range_width(group, bits);
  if (v >> bits) throw std::out_of_range("value " + std::to_string(v) + " exceeds the " + std::to_string(bits) + "-bit range");

  const Commitment value = commit(group, v, r);
  const Bytes r_bytes = group.encode(r);
  std::vector<Scalar> blinds(bits);
  Scalar weighted = group.zero();
  for (unsigned j = 1; j < bits; ++j) {
    Transcript t(tags::kRange);
    t.absorb("bit-blinding").absorb(r_bytes).absorb_u64(v).absorb_u64(bits).absorb_u64(j);
    blinds[j] = group.reduce(t.finish());
    weighted = group.add(weighted, group.mul(group.scalar(std::uint64_t{1} << j), blinds[j]));
  }
  blinds[0] = group.sub(r, weighted);

  const Element h_inv = group.inverse(group.amount_base());
  RangeProof proof;
  proof.bits.reserve(bits);
  for (unsigned j = 0; j < bits; ++j) {
    const std::uint64_t bit = (v >> j) & 1;
    Commitment cj = commit(group, bit, blinds[j]);
    std::array<Element, 2> keys = {cj.point, group.op(cj.point, h_inv)};
    Bytes msg = detail::bit_message(group, value, bits, j);
    detail::RingSpec spec{tags::kRange, msg, 1, keys, false};
    Scalar secret[1] = {blinds[j]};
    auto out = detail::ring_sign(group, spec, bit, secret, nullptr);
    proof.bits.push_back({cj, out.c0, {out.responses[0], out.responses[1]}});
  }
  return proof;
}

/// Accepts only proofs of exactly `bits` bits for commitment c.
inline bool verify_range(const Group& group, const Commitment& c, const RangeProof& proof,
                         unsigned bits = kDefaultRangeBits) {
  if (bits == 0 || bits > 62 || !group.scalar_fits(std::uint64_t{1} << bits)) return false;
  if (proof.bits.size() != bits || !group.valid(c.point)) return false;
  for (const auto& b : proof.bits)
    if (!group.valid(b.commitment.point)) return false;

  // Horner evaluation of prod C_j^(2^j).
  Element acc = proof.bits[bits - 1].commitment.point;
  for (unsigned j = bits - 1; j-- > 0;) acc = group.op(group.op(acc, acc), proof.bits[j].commitment.point);
  if (acc != c.point) return false;

  const Element h_inv = group.inverse(group.amount_base());
  for (unsigned j = 0; j < bits; ++j) {
    const auto& b = proof.bits[j];
    std::array<Element, 2> keys = {b.commitment.point, group.op(b.commitment.point, h_inv)};
    Bytes msg = detail::bit_message(group, c, bits, j);
    detail::RingSpec spec{tags::kRange, msg, 1, keys, false};
    if (!detail::ring_verify(group, spec, b.c0, b.responses, nullptr)) return false;
  }
  return true;
}

}  // namespace pvx
