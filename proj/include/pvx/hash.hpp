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

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>

#include "pvx/bytes.hpp"

namespace pvx {

// Domain-separation tags. The four below are part of the wire contract.
namespace tags {
inline constexpr std::string_view kGeneratorH = "pvx/H";
inline constexpr std::string_view kRing = "pvx/ring";
inline constexpr std::string_view kRange = "pvx/range";
inline constexpr std::string_view kCredential = "pvx/cred";

inline constexpr std::string_view kKeyImage = "pvx/keyimage";
inline constexpr std::string_view kStealth = "pvx/stealth";
inline constexpr std::string_view kBlinding = "pvx/blind";
inline constexpr std::string_view kAmountMask = "pvx/amount";
inline constexpr std::string_view kSeed = "pvx/seed";
inline constexpr std::string_view kExcess = "pvx/excess";
inline constexpr std::string_view kNonce = "pvx/nonce";
inline constexpr std::string_view kTransaction = "pvx/tx";
inline constexpr std::string_view kBlock = "pvx/block";
inline constexpr std::string_view kState = "pvx/state";
inline constexpr std::string_view kMac = "pvx/mac";
inline constexpr std::string_view kTrace = "pvx/trace";
}  // namespace tags

inline void ensure_sodium() {
  static const bool ready = [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium failed to initialise");
    return true;
  }();
  (void)ready;
}

using Wide = std::array<std::uint8_t, 64>;

/// Domain-separated SHA-512 over length-prefixed parts:
///   SHA-512( u32be(|tag|) || tag || for each part: u32be(|part|) || part )
class Transcript {
public:
  explicit Transcript(std::string_view tag) {
    crypto_hash_sha512_init(&state_);
    absorb(as_bytes(tag));
  }

  Transcript& absorb(ByteView part) {
    std::uint8_t len[4] = {static_cast<std::uint8_t>(part.size() >> 24), static_cast<std::uint8_t>(part.size() >> 16),
                           static_cast<std::uint8_t>(part.size() >> 8), static_cast<std::uint8_t>(part.size())};
    crypto_hash_sha512_update(&state_, len, sizeof len);
    if (!part.empty()) crypto_hash_sha512_update(&state_, part.data(), part.size());
    return *this;
  }
  Transcript& absorb(std::string_view s) { return absorb(as_bytes(s)); }
  Transcript& absorb_u64(std::uint64_t v) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
    return absorb(ByteView(b, 8));
  }

  Wide finish() {
    Wide out{};
    crypto_hash_sha512_final(&state_, out.data());
    return out;
  }

  Digest finish_digest() {
    Wide w = finish();
    Digest d;
    std::copy_n(w.begin(), d.bytes.size(), d.bytes.begin());
    return d;
  }

private:
  crypto_hash_sha512_state state_{};
};

}  // namespace pvx
