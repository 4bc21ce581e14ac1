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

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pvx/group.hpp"
#include "pvx/hash.hpp"
#include "pvx/primitives/commitment.hpp"

namespace pvx {

namespace detail {

// Generic ring engine: a ring of n members, each holding `columns` public
// keys with base G. When `linkable` is set, column 0 also yields a key
// image I = Hp(K_pi0)^x0 and every step commits to Hp(K_i0)^s · I^c as well
// (LSAG / MLSAG style Fiat-Shamir challenge chain).
struct RingSpec {
  std::string_view tag;
  ByteView message;
  std::size_t columns = 1;
  std::span<const Element> keys;  // keys[i * columns + j]
  bool linkable = false;

  std::size_t size() const { return columns == 0 ? 0 : keys.size() / columns; }
};

inline Element key_image_base(const Group& g, const Element& public_key) {
  return g.hash_to_group(tags::kKeyImage, {g.encode(public_key)});
}

inline Transcript ring_prefix(const Group& g, const RingSpec& spec, const Element* image) {
  Transcript t(spec.tag);
  t.absorb(spec.message);
  t.absorb_u64(spec.columns);
  t.absorb_u64(spec.size());
  for (const auto& k : spec.keys) g.absorb(t, k);
  if (image) g.absorb(t, *image);
  return t;
}

inline Scalar chain_challenge(const Group& g, const Transcript& prefix, std::span<const Element> points) {
  Transcript t = prefix;
  for (const auto& p : points) g.absorb(t, p);
  return g.reduce(t.finish());
}

struct RingOutput {
  Scalar c0;
  std::vector<Scalar> responses;  // responses[i * columns + j]
};

inline RingOutput ring_sign(const Group& g, const RingSpec& spec, std::size_t pi, std::span<const Scalar> secrets,
                            const Element* image) {
  const std::size_t n = spec.size();
  const std::size_t m = spec.columns;
  Transcript prefix = ring_prefix(g, spec, image);

  // Deterministic nonces keyed by the secrets and the full ring context.
  Transcript nonce_base(tags::kNonce);
  {
    Transcript ctx = prefix;
    Wide w = ctx.finish();
    nonce_base.absorb(ByteView(w.data(), w.size()));
    for (const auto& s : secrets) g.absorb(nonce_base, s);
  }
  auto nonce = [&](std::size_t i, std::size_t j) {
    Transcript t = nonce_base;
    t.absorb_u64(i).absorb_u64(j);
    return g.reduce(t.finish());
  };

  std::vector<Element> image_bases;
  if (spec.linkable) {
    image_bases.reserve(n);
    for (std::size_t i = 0; i < n; ++i) image_bases.push_back(key_image_base(g, spec.keys[i * m]));
  }

  std::vector<Scalar> responses(n * m);
  std::vector<Scalar> alphas(m);
  std::vector<Element> points;
  points.reserve(m + 1);

  for (std::size_t j = 0; j < m; ++j) {
    alphas[j] = nonce(pi, j);
    points.push_back(g.pow_g(alphas[j]));
  }
  if (spec.linkable) points.push_back(g.pow(image_bases[pi], alphas[0]));

  std::vector<Scalar> challenges(n);
  std::size_t i = (pi + 1) % n;
  challenges[i] = chain_challenge(g, prefix, points);
  while (i != pi) {
    points.clear();
    for (std::size_t j = 0; j < m; ++j) {
      responses[i * m + j] = nonce(i, j + m);
      points.push_back(g.pow2(responses[i * m + j], spec.keys[i * m + j], challenges[i]));
    }
    if (spec.linkable)
      points.push_back(g.op(g.pow(image_bases[i], responses[i * m]), g.pow(*image, challenges[i])));
    std::size_t next = (i + 1) % n;
    challenges[next] = chain_challenge(g, prefix, points);
    i = next;
  }
  for (std::size_t j = 0; j < m; ++j) responses[pi * m + j] = g.sub(alphas[j], g.mul(challenges[pi], secrets[j]));
  return {challenges[0], std::move(responses)};
}

inline bool ring_verify(const Group& g, const RingSpec& spec, const Scalar& c0, std::span<const Scalar> responses,
                        const Element* image) {
  const std::size_t n = spec.size();
  const std::size_t m = spec.columns;
  if (n == 0 || spec.keys.size() != n * m || responses.size() != n * m) return false;
  for (const auto& k : spec.keys)
    if (!g.valid(k)) return false;
  if (image && (!g.valid(*image) || *image == g.identity())) return false;

  Transcript prefix = ring_prefix(g, spec, image);
  Scalar c = c0;
  std::vector<Element> points;
  points.reserve(m + 1);
  for (std::size_t i = 0; i < n; ++i) {
    points.clear();
    for (std::size_t j = 0; j < m; ++j) points.push_back(g.pow2(responses[i * m + j], spec.keys[i * m + j], c));
    if (spec.linkable) {
      Element base = key_image_base(g, spec.keys[i * m]);
      points.push_back(g.op(g.pow(base, responses[i * m]), g.pow(*image, c)));
    }
    c = chain_challenge(g, prefix, points);
  }
  return c == c0;
}

}  // namespace detail

/// Linkable ring signature (LSAG). The key image depends only on the
/// signing key, so two signatures by one key are linkable whatever the
/// ring or message.
struct RingSignature {
  Scalar c0;
  std::vector<Scalar> responses;
  Element key_image;

  friend bool operator==(const RingSignature&, const RingSignature&) = default;
};

inline Element key_image(const Group& group, const Element& public_key, const Scalar& secret) {
  return group.pow(detail::key_image_base(group, public_key), secret);
}

inline RingSignature ring_sign(const Group& group, ByteView message, std::span<const Element> ring,
                               std::size_t true_index, const Scalar& secret) {
  if (ring.empty()) throw std::invalid_argument("ring must not be empty");
  if (true_index >= ring.size()) throw std::out_of_range("true index outside the ring");
  if (group.pow_g(secret) != ring[true_index]) throw std::invalid_argument("secret does not match the ring slot");
  Element image = key_image(group, ring[true_index], secret);
  detail::RingSpec spec{tags::kRing, message, 1, ring, true};
  Scalar secrets[1] = {secret};
  auto out = detail::ring_sign(group, spec, true_index, secrets, &image);
  return {out.c0, std::move(out.responses), image};
}

inline bool ring_verify(const Group& group, ByteView message, std::span<const Element> ring,
                        const RingSignature& sig) {
  detail::RingSpec spec{tags::kRing, message, 1, ring, true};
  return detail::ring_verify(group, spec, sig.c0, sig.responses, &sig.key_image);
}

inline bool signatures_linked(const RingSignature& a, const RingSignature& b) { return a.key_image == b.key_image; }

/// Two-column ring signature used to spend a confidential output. Column 0
/// is the one-time address (linkable, yields the key image); column 1 is
/// C_i · C'^-1 for the member's amount commitment C_i and the spender's
/// pseudo commitment C'. Knowing its discrete log at the true slot proves
/// C' hides the same amount as the spent output without revealing which.
struct SpendSignature {
  Scalar c0;
  std::vector<Scalar> responses;  // two per ring member
  Element key_image;

  friend bool operator==(const SpendSignature&, const SpendSignature&) = default;
};

namespace detail {
inline std::vector<Element> spend_keys(const Group& g, std::span<const Element> addresses,
                                       std::span<const Commitment> commitments, const Commitment& pseudo) {
  std::vector<Element> keys;
  keys.reserve(addresses.size() * 2);
  Element pseudo_inv = g.inverse(pseudo.point);
  for (std::size_t i = 0; i < addresses.size(); ++i) {
    keys.push_back(addresses[i]);
    keys.push_back(g.op(commitments[i].point, pseudo_inv));
  }
  return keys;
}
}  // namespace detail

/// blinding_delta is r_spent - r_pseudo.
inline SpendSignature spend_sign(const Group& group, ByteView message, std::span<const Element> addresses,
                                 std::span<const Commitment> commitments, const Commitment& pseudo,
                                 std::size_t true_index, const Scalar& spend_secret, const Scalar& blinding_delta) {
  if (addresses.empty() || addresses.size() != commitments.size())
    throw std::invalid_argument("ring addresses and commitments must be non-empty and aligned");
  if (true_index >= addresses.size()) throw std::out_of_range("true index outside the ring");
  auto keys = detail::spend_keys(group, addresses, commitments, pseudo);
  if (group.pow_g(spend_secret) != keys[2 * true_index] || group.pow_g(blinding_delta) != keys[2 * true_index + 1])
    throw std::invalid_argument("secrets do not match the ring slot");
  Element image = key_image(group, addresses[true_index], spend_secret);
  detail::RingSpec spec{tags::kRing, message, 2, keys, true};
  Scalar secrets[2] = {spend_secret, blinding_delta};
  auto out = detail::ring_sign(group, spec, true_index, secrets, &image);
  return {out.c0, std::move(out.responses), image};
}

inline bool spend_verify(const Group& group, ByteView message, std::span<const Element> addresses,
                         std::span<const Commitment> commitments, const Commitment& pseudo,
                         const SpendSignature& sig) {
  if (addresses.empty() || addresses.size() != commitments.size()) return false;
  if (!group.valid(pseudo.point)) return false;
  for (const auto& c : commitments)
    if (!group.valid(c.point)) return false;
  auto keys = detail::spend_keys(group, addresses, commitments, pseudo);
  detail::RingSpec spec{tags::kRing, message, 2, keys, true};
  return detail::ring_verify(group, spec, sig.c0, sig.responses, &sig.key_image);
}

}  // namespace pvx
