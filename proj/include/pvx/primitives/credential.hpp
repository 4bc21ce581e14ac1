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

#include <stdexcept>
#include <string>
#include <utility>

#include "pvx/group.hpp"
#include "pvx/hash.hpp"
#include "pvx/rng.hpp"

namespace pvx {

// Blind Schnorr credentials over a single attribute.
//
//   issuer:  k, R' = G^k                         -> holder
//   holder:  R = R' G^alpha Y^beta
//            c = H(R, Y, serial, attribute), c' = c + beta -> issuer
//   issuer:  s' = k + c' y                       -> holder
//   holder:  s = s' + alpha;  credential = (attribute, serial, R, s)
//   verify:  G^s == R · Y^c
//
// The issuer sees (R', c', s') only; alpha and beta make that transcript
// independent of the finalised (serial, R, s).

inline constexpr std::string_view kEligibleAttribute = "eligible";
inline constexpr std::size_t kSerialSize = 32;

struct IssuerKeypair {
  Scalar secret;
  Element public_key;
};

struct Credential {
  std::string attribute;
  Bytes serial;
  Element nonce;
  Scalar response;

  friend bool operator==(const Credential&, const Credential&) = default;
};

/// Issuer state for one signing session.
struct IssuerSession {
  Scalar nonce_secret;
  Element nonce_commitment;  // R'
};

/// Holder state kept between request and finalize.
struct HolderState {
  std::string attribute;
  Bytes serial;
  Scalar alpha;
  Scalar beta;
  Element nonce;     // R
  Scalar challenge;  // c
  Element issuer_public;
};

struct CredentialRequest {
  Scalar blinded_challenge;  // c'
};

inline IssuerKeypair derive_issuer_keypair(const Group& group, ByteView seed) {
  for (std::uint64_t ctr = 0;; ++ctr) {
    Transcript t(tags::kCredential);
    t.absorb("issuer-key").absorb(seed).absorb_u64(ctr);
    Scalar y = group.reduce(t.finish());
    if (!group.is_zero(y)) return {y, group.pow_g(y)};
  }
}

inline Scalar credential_challenge(const Group& group, const Element& nonce, const Element& issuer_public,
                                   ByteView serial, std::string_view attribute) {
  return group.hash_to_scalar(tags::kCredential, {group.encode(nonce), group.encode(issuer_public), serial,
                                                  as_bytes(attribute)});
}

/// The session id must be unique per issuance; the nonce is derived from it.
inline IssuerSession credential_begin(const Group& group, const Scalar& issuer_secret, ByteView session_id) {
  Transcript t(tags::kCredential);
  t.absorb("session").absorb(group.encode(issuer_secret)).absorb(session_id);
  Scalar k = group.reduce(t.finish());
  return {k, group.pow_g(k)};
}

inline std::pair<HolderState, CredentialRequest> credential_request(const Group& group, const Element& issuer_public,
                                                                    const Element& issuer_nonce,
                                                                    std::string_view attribute, Rng& rng) {
  if (!group.valid(issuer_nonce) || !group.valid(issuer_public)) throw std::invalid_argument("malformed issuer message");
  HolderState st;
  st.attribute = std::string(attribute);
  st.serial.resize(kSerialSize);
  rng.fill(st.serial.data(), st.serial.size());
  st.alpha = random_scalar(group, rng);
  st.beta = random_scalar(group, rng);
  st.issuer_public = issuer_public;
  st.nonce = group.op(group.op(issuer_nonce, group.pow_g(st.alpha)), group.pow(issuer_public, st.beta));
  st.challenge = credential_challenge(group, st.nonce, issuer_public, st.serial, attribute);
  return {st, CredentialRequest{group.add(st.challenge, st.beta)}};
}

/// Issuer's blind signature s' = k + c' y over the blinded request.
inline Scalar credential_issue(const Group& group, const Scalar& issuer_secret, const IssuerSession& session,
                               const CredentialRequest& request) {
  return group.add(session.nonce_secret, group.mul(request.blinded_challenge, issuer_secret));
}

inline bool credential_verify(const Group& group, const Element& issuer_public, const Credential& cred) {
  if (cred.serial.size() != kSerialSize || !group.valid(cred.nonce) || !group.valid(issuer_public)) return false;
  Scalar c = credential_challenge(group, cred.nonce, issuer_public, cred.serial, cred.attribute);
  return group.pow_g(cred.response) == group.op(cred.nonce, group.pow(issuer_public, c));
}

/// Unblinds the issuer response. Throws if the issuer signed incorrectly.
inline Credential credential_finalize(const Group& group, const HolderState& state, const Scalar& blind_signature) {
  Credential cred{state.attribute, state.serial, state.nonce, group.add(blind_signature, state.alpha)};
  if (!credential_verify(group, state.issuer_public, cred))
    throw std::runtime_error("issuer response does not verify");
  return cred;
}

}  // namespace pvx
