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
#include <optional>
#include <stdexcept>

#include "pvx/group.hpp"
#include "pvx/hash.hpp"

namespace pvx {

/// Published recipient address (A, B).
struct StealthAddress {
  Element scan;
  Element spend;
  friend auto operator<=>(const StealthAddress&, const StealthAddress&) = default;
};

struct StealthKeypair {
  Scalar scan_secret;
  Element scan_public;
  Scalar spend_secret;
  Element spend_public;

  StealthAddress address() const { return {scan_public, spend_public}; }
};

/// Sender-side keys for one output: ephemeral e, E = G^e and the one-time
/// address P = G^h(A^e) · B.
struct OneTimeOutputKeys {
  Scalar ephemeral_secret;
  Element ephemeral_public;
  Element one_time_address;
  Element shared_secret;  // A^e == E^a
};

/// Everything both ends derive from the Diffie-Hellman shared secret.
struct OutputSecrets {
  Scalar address_offset;  // h(shared); one-time spend secret is offset + b
  Scalar blinding;        // amount commitment blinding factor
  std::uint64_t amount_mask = 0;
};

inline OutputSecrets derive_output_secrets(const Group& group, const Element& shared) {
  const Bytes enc = group.encode(shared);
  OutputSecrets s;
  s.address_offset = group.hash_to_scalar(tags::kStealth, {enc});
  s.blinding = group.hash_to_scalar(tags::kBlinding, {enc});
  Transcript t(tags::kAmountMask);
  t.absorb(enc);
  Wide w = t.finish();
  s.amount_mask = load_be64(ByteView(w.data(), 8));
  return s;
}

namespace detail {
inline Scalar nonzero_seed_scalar(const Group& group, ByteView seed, std::string_view role) {
  for (std::uint64_t ctr = 0;; ++ctr) {
    Transcript t(tags::kSeed);
    t.absorb(seed).absorb(role).absorb_u64(ctr);
    Scalar s = group.reduce(t.finish());
    if (!group.is_zero(s)) return s;
  }
}
}  // namespace detail

inline StealthKeypair derive_stealth_keypair(const Group& group, ByteView seed) {
  StealthKeypair kp;
  kp.scan_secret = detail::nonzero_seed_scalar(group, seed, "scan");
  kp.spend_secret = detail::nonzero_seed_scalar(group, seed, "spend");
  kp.scan_public = group.pow_g(kp.scan_secret);
  kp.spend_public = group.pow_g(kp.spend_secret);
  return kp;
}

inline OneTimeOutputKeys make_onetime_output(const Group& group, const StealthAddress& recipient,
                                             const Scalar& ephemeral) {
  if (!group.valid(recipient.scan) || !group.valid(recipient.spend) || recipient.scan == group.identity())
    throw std::invalid_argument("malformed stealth address");
  if (group.is_zero(ephemeral)) throw std::invalid_argument("ephemeral secret must be non-zero");
  OneTimeOutputKeys out;
  out.ephemeral_secret = ephemeral;
  out.ephemeral_public = group.pow_g(ephemeral);
  out.shared_secret = group.pow(recipient.scan, ephemeral);
  auto secrets = derive_output_secrets(group, out.shared_secret);
  out.one_time_address = group.op(group.pow_g(secrets.address_offset), recipient.spend);
  return out;
}

/// Recipient check with the scan secret a and spend public B. Returns the
/// address offset h(E^a) when P was addressed to (A, B); the one-time spend
/// secret is that offset plus the spend secret b.
inline std::optional<Scalar> scan_output(const Group& group, const Scalar& scan_secret, const Element& spend_public,
                                         const Element& ephemeral, const Element& one_time_address) {
  if (!group.valid(ephemeral) || !group.valid(one_time_address) || !group.valid(spend_public))
    throw std::invalid_argument("malformed group element in output");
  auto secrets = derive_output_secrets(group, group.pow(ephemeral, scan_secret));
  if (group.op(group.pow_g(secrets.address_offset), spend_public) != one_time_address) return std::nullopt;
  return secrets.address_offset;
}

/// Full one-time spend secret for the holder of both keys.
inline std::optional<Scalar> recover_spend_secret(const Group& group, const StealthKeypair& keys,
                                                  const Element& ephemeral, const Element& one_time_address) {
  auto offset = scan_output(group, keys.scan_secret, keys.spend_public, ephemeral, one_time_address);
  if (!offset) return std::nullopt;
  return group.add(*offset, keys.spend_secret);
}

}  // namespace pvx
