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

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pvx/bytes.hpp"
#include "pvx/hash.hpp"
#include "pvx/rng.hpp"

namespace pvx {

/// Scalar modulo the group order. The byte layout is owned by the group
/// that produced it; use Group::encode for the wire form.
struct Scalar {
  std::array<std::uint8_t, 32> raw{};
  friend auto operator<=>(const Scalar&, const Scalar&) = default;
};

/// Element of the prime-order group, in the producing group's native layout.
struct Element {
  std::array<std::uint8_t, 32> raw{};
  friend auto operator<=>(const Element&, const Element&) = default;
};

enum class Profile { Test, Desk, Standard };

inline std::string_view to_string(Profile p) {
  switch (p) {
    case Profile::Test: return "test";
    case Profile::Desk: return "desk";
    case Profile::Standard: return "standard";
  }
  return "?";
}

inline Profile parse_profile(std::string_view name) {
  if (name == "test") return Profile::Test;
  if (name == "desk") return Profile::Desk;
  if (name == "standard") return Profile::Standard;
  throw std::invalid_argument("unknown group profile '" + std::string(name) + "'");
}

/// Human-readable description of a group instance.
struct GroupParams {
  std::string profile;
  std::string modulus;  // decimal for Schnorr groups, curve name otherwise
  std::string order;    // decimal
  Bytes generator;      // G, base for blinding factors
  Bytes amount_base;    // H, base for amounts
};

/// Abstract prime-order group used by every primitive.
///
/// Multiplicative notation throughout: op() is the group law, pow() is
/// exponentiation by a scalar. G blinds, H carries amounts, and H is derived
/// by hashing the "pvx/H" tag so nobody knows log_G(H).
class Group {
public:
  virtual ~Group() = default;

  virtual Profile profile() const = 0;
  virtual std::size_t element_size() const = 0;
  virtual std::size_t scalar_size() const = 0;
  virtual GroupParams params() const = 0;

  /// True when v < q.
  virtual bool scalar_fits(std::uint64_t v) const = 0;
  /// Throws std::out_of_range when v >= q.
  virtual Scalar scalar(std::uint64_t v) const = 0;
  virtual Scalar add(const Scalar& a, const Scalar& b) const = 0;
  virtual Scalar sub(const Scalar& a, const Scalar& b) const = 0;
  virtual Scalar mul(const Scalar& a, const Scalar& b) const = 0;
  virtual Scalar neg(const Scalar& a) const = 0;
  /// Multiplicative inverse mod q; throws std::domain_error for zero.
  virtual Scalar inverse_scalar(const Scalar& a) const = 0;
  /// Reduces a 512-bit big-endian integer modulo q.
  virtual Scalar reduce(const Wide& big_endian) const = 0;

  virtual Element op(const Element& a, const Element& b) const = 0;
  virtual Element inverse(const Element& a) const = 0;
  virtual Element pow(const Element& base, const Scalar& e) const = 0;
  virtual Element pow_g(const Scalar& e) const { return pow(generator(), e); }
  virtual bool valid(const Element& e) const = 0;

  virtual Element hash_to_group(std::string_view tag, std::initializer_list<ByteView> parts) const = 0;

  virtual Bytes encode(const Element& e) const = 0;
  virtual Bytes encode(const Scalar& s) const = 0;
  /// Throws std::invalid_argument on wrong length or a non-member.
  virtual Element decode_element(ByteView bytes) const = 0;
  /// Throws std::invalid_argument on wrong length or a value >= q.
  virtual Scalar decode_scalar(ByteView bytes) const = 0;

  const Element& identity() const { return identity_; }
  const Element& generator() const { return g_; }
  const Element& amount_base() const { return h_; }
  Scalar zero() const { return scalar(0); }
  Scalar one() const { return scalar(1); }
  bool is_zero(const Scalar& s) const { return s == zero(); }

  Scalar signed_scalar(std::int64_t v) const {
    if (v >= 0) return scalar(static_cast<std::uint64_t>(v));
    return neg(scalar(static_cast<std::uint64_t>(-(v + 1)) + 1));
  }

  Scalar hash_to_scalar(std::string_view tag, std::initializer_list<ByteView> parts) const {
    Transcript t(tag);
    for (auto p : parts) t.absorb(p);
    return reduce(t.finish());
  }

  /// G^a · B^b, the two-base product used by every Schnorr-style check.
  Element pow2(const Scalar& a, const Element& base, const Scalar& b) const { return op(pow_g(a), pow(base, b)); }

  Transcript& absorb(Transcript& t, const Element& e) const { return t.absorb(encode(e)); }
  Transcript& absorb(Transcript& t, const Scalar& s) const { return t.absorb(encode(s)); }

protected:
  Element identity_{};
  Element g_{};
  Element h_{};
};

using GroupPtr = std::shared_ptr<const Group>;

/// Schnorr group: the order-q subgroup of quadratic residues mod a safe
/// prime p = 2q + 1 below 2^63. Elements and scalars are stored as native
/// little-endian uint64 values in the first eight raw bytes.
class SchnorrGroup final : public Group {
public:
  SchnorrGroup(Profile profile, std::uint64_t p, std::uint64_t q, std::uint64_t g)
      : profile_(profile), p_(p), q_(q) {
    if (p != 2 * q + 1) throw std::invalid_argument("Schnorr profile requires p = 2q + 1");
    len_ = 1;
    while (len_ < 8 && (p >> (8 * len_)) != 0) ++len_;
    identity_ = store(1);
    g_ = store(g);
    if (!valid(g_) || g == 1) throw std::invalid_argument("generator is not in the order-q subgroup");
    h_ = hash_to_group(tags::kGeneratorH, {});
  }

  std::uint64_t modulus() const { return p_; }
  std::uint64_t order() const { return q_; }

  Profile profile() const override { return profile_; }
  std::size_t element_size() const override { return len_; }
  std::size_t scalar_size() const override { return len_; }

  GroupParams params() const override {
    return {std::string(to_string(profile_)), std::to_string(p_), std::to_string(q_), encode(g_), encode(h_)};
  }

  bool scalar_fits(std::uint64_t v) const override { return v < q_; }
  Scalar scalar(std::uint64_t v) const override {
    if (v >= q_) throw std::out_of_range("scalar " + std::to_string(v) + " is not below the group order");
    return sstore(v);
  }
  Scalar add(const Scalar& a, const Scalar& b) const override {
    std::uint64_t s = sload(a) + sload(b);
    return sstore(s >= q_ ? s - q_ : s);
  }
  Scalar sub(const Scalar& a, const Scalar& b) const override {
    std::uint64_t x = sload(a), y = sload(b);
    return sstore(x >= y ? x - y : x + (q_ - y));
  }
  Scalar mul(const Scalar& a, const Scalar& b) const override { return sstore(mulmod(sload(a), sload(b), q_)); }
  Scalar neg(const Scalar& a) const override {
    std::uint64_t x = sload(a);
    return sstore(x == 0 ? 0 : q_ - x);
  }
  Scalar reduce(const Wide& be) const override { return sstore(reduce_mod(be, q_)); }

  Scalar inverse_scalar(const Scalar& a) const override {
    std::uint64_t x = sload(a);
    if (x == 0) throw std::domain_error("zero has no inverse");
    std::uint64_t result = 1, e = q_ - 2;
    while (e) {
      if (e & 1) result = mulmod(result, x, q_);
      x = mulmod(x, x, q_);
      e >>= 1;
    }
    return sstore(result);
  }
  Element op(const Element& a, const Element& b) const override { return store(mulmod(load(a), load(b), p_)); }
  Element inverse(const Element& a) const override { return store(powmod(load(a), q_ - 1)); }
  Element pow(const Element& base, const Scalar& e) const override { return store(powmod(load(base), sload(e))); }
  bool valid(const Element& e) const override {
    std::uint64_t x = load(e);
    for (std::size_t i = 8; i < e.raw.size(); ++i)
      if (e.raw[i] != 0) return false;
    return x >= 1 && x < p_ && powmod(x, q_) == 1;
  }

  Element hash_to_group(std::string_view tag, std::initializer_list<ByteView> parts) const override {
    for (std::uint32_t ctr = 0;; ++ctr) {
      Transcript t(tag);
      for (auto p : parts) t.absorb(p);
      std::uint8_t c[4] = {static_cast<std::uint8_t>(ctr >> 24), static_cast<std::uint8_t>(ctr >> 16),
                           static_cast<std::uint8_t>(ctr >> 8), static_cast<std::uint8_t>(ctr)};
      t.absorb(ByteView(c, 4));
      std::uint64_t x = reduce_mod(t.finish(), p_);
      std::uint64_t y = mulmod(x, x, p_);
      if (y > 1) return store(y);
    }
  }

  Bytes encode(const Element& e) const override { return be_bytes(load(e)); }
  Bytes encode(const Scalar& s) const override { return be_bytes(sload(s)); }
  Element decode_element(ByteView bytes) const override {
    if (bytes.size() != len_) throw std::invalid_argument("element encoding has wrong length");
    Element e = store(load_be64(bytes));
    if (!valid(e)) throw std::invalid_argument("bytes do not encode a subgroup element");
    return e;
  }
  Scalar decode_scalar(ByteView bytes) const override {
    if (bytes.size() != len_) throw std::invalid_argument("scalar encoding has wrong length");
    std::uint64_t v = load_be64(bytes);
    if (v >= q_) throw std::invalid_argument("scalar encoding is not reduced");
    return sstore(v);
  }

private:
  static std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
  }
  std::uint64_t powmod(std::uint64_t base, std::uint64_t e) const {
    std::uint64_t result = 1;
    base %= p_;
    while (e != 0) {
      if (e & 1) result = mulmod(result, base, p_);
      base = mulmod(base, base, p_);
      e >>= 1;
    }
    return result;
  }
  static std::uint64_t reduce_mod(const Wide& be, std::uint64_t m) {
    unsigned __int128 acc = 0;
    for (auto b : be) acc = ((acc << 8) | b) % m;
    return static_cast<std::uint64_t>(acc);
  }
  static std::uint64_t load(const Element& e) {
    std::uint64_t v;
    std::memcpy(&v, e.raw.data(), 8);
    return v;
  }
  static Element store(std::uint64_t v) {
    Element e;
    std::memcpy(e.raw.data(), &v, 8);
    return e;
  }
  static std::uint64_t sload(const Scalar& s) {
    std::uint64_t v;
    std::memcpy(&v, s.raw.data(), 8);
    return v;
  }
  static Scalar sstore(std::uint64_t v) {
    Scalar s;
    std::memcpy(s.raw.data(), &v, 8);
    return s;
  }
  Bytes be_bytes(std::uint64_t v) const {
    Bytes out(len_);
    for (std::size_t i = 0; i < len_; ++i) out[len_ - 1 - i] = static_cast<std::uint8_t>(v >> (8 * i));
    return out;
  }

  Profile profile_;
  std::uint64_t p_;
  std::uint64_t q_;
  std::size_t len_ = 8;
};

/// Ristretto255 via libsodium: a prime-order group with ~128-bit security.
/// Scalars are stored little-endian as libsodium expects and serialised
/// big-endian; elements use the canonical 32-byte ristretto encoding.
class Ristretto255Group final : public Group {
public:
  Ristretto255Group() {
    ensure_sodium();
    identity_ = Element{};
    Scalar one_le{};
    one_le.raw[0] = 1;
    g_ = pow_g(one_le);
    h_ = hash_to_group(tags::kGeneratorH, {});
  }

  Profile profile() const override { return Profile::Standard; }
  std::size_t element_size() const override { return 32; }
  std::size_t scalar_size() const override { return 32; }
  GroupParams params() const override {
    return {"standard", "ristretto255",
            "7237005577332262213973186563042994240857116359379907606001950938285454250989", encode(g_), encode(h_)};
  }

  bool scalar_fits(std::uint64_t) const override { return true; }
  Scalar scalar(std::uint64_t v) const override {
    Scalar s;
    for (int i = 0; i < 8; ++i) s.raw[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return s;
  }
  Scalar add(const Scalar& a, const Scalar& b) const override {
    Scalar r;
    crypto_core_ristretto255_scalar_add(r.raw.data(), a.raw.data(), b.raw.data());
    return r;
  }
  Scalar sub(const Scalar& a, const Scalar& b) const override {
    Scalar r;
    crypto_core_ristretto255_scalar_sub(r.raw.data(), a.raw.data(), b.raw.data());
    return r;
  }
  Scalar mul(const Scalar& a, const Scalar& b) const override {
    Scalar r;
    crypto_core_ristretto255_scalar_mul(r.raw.data(), a.raw.data(), b.raw.data());
    return r;
  }
  Scalar neg(const Scalar& a) const override {
    Scalar r;
    crypto_core_ristretto255_scalar_negate(r.raw.data(), a.raw.data());
    return r;
  }
  Scalar inverse_scalar(const Scalar& a) const override {
    Scalar r;
    if (crypto_core_ristretto255_scalar_invert(r.raw.data(), a.raw.data()) != 0)
      throw std::domain_error("zero has no inverse");
    return r;
  }
  Scalar reduce(const Wide& be) const override {
    std::uint8_t le[64];
    std::reverse_copy(be.begin(), be.end(), le);
    Scalar r;
    crypto_core_ristretto255_scalar_reduce(r.raw.data(), le);
    return r;
  }

  Element op(const Element& a, const Element& b) const override {
    Element r;
    if (crypto_core_ristretto255_add(r.raw.data(), a.raw.data(), b.raw.data()) != 0)
      throw std::invalid_argument("invalid ristretto255 operand");
    return r;
  }
  Element inverse(const Element& a) const override {
    Element r;
    if (crypto_core_ristretto255_sub(r.raw.data(), identity_.raw.data(), a.raw.data()) != 0)
      throw std::invalid_argument("invalid ristretto255 operand");
    return r;
  }
  Element pow(const Element& base, const Scalar& e) const override {
    Element r;
    // libsodium reports an identity result as an error.
    if (crypto_scalarmult_ristretto255(r.raw.data(), e.raw.data(), base.raw.data()) != 0) r = identity_;
    return r;
  }
  Element pow_g(const Scalar& e) const override {
    Element r;
    if (crypto_scalarmult_ristretto255_base(r.raw.data(), e.raw.data()) != 0) r = identity_;
    return r;
  }
  bool valid(const Element& e) const override {
    return e == identity_ || crypto_core_ristretto255_is_valid_point(e.raw.data()) == 1;
  }

  Element hash_to_group(std::string_view tag, std::initializer_list<ByteView> parts) const override {
    Transcript t(tag);
    for (auto p : parts) t.absorb(p);
    const std::uint8_t ctr[4] = {0, 0, 0, 0};
    t.absorb(ByteView(ctr, 4));
    Wide w = t.finish();
    Element r;
    crypto_core_ristretto255_from_hash(r.raw.data(), w.data());
    return r;
  }

  Bytes encode(const Element& e) const override { return Bytes(e.raw.begin(), e.raw.end()); }
  Bytes encode(const Scalar& s) const override { return Bytes(s.raw.rbegin(), s.raw.rend()); }
  Element decode_element(ByteView bytes) const override {
    if (bytes.size() != 32) throw std::invalid_argument("element encoding has wrong length");
    Element e;
    std::copy(bytes.begin(), bytes.end(), e.raw.begin());
    if (!valid(e)) throw std::invalid_argument("bytes do not encode a ristretto255 element");
    return e;
  }
  Scalar decode_scalar(ByteView bytes) const override {
    if (bytes.size() != 32) throw std::invalid_argument("scalar encoding has wrong length");
    Scalar s;
    std::reverse_copy(bytes.begin(), bytes.end(), s.raw.begin());
    std::uint8_t wide[64] = {};
    std::copy(s.raw.begin(), s.raw.end(), wide);
    Scalar reduced;
    crypto_core_ristretto255_scalar_reduce(reduced.raw.data(), wide);
    if (reduced != s) throw std::invalid_argument("scalar encoding is not reduced");
    return s;
  }
};

inline constexpr std::uint64_t kTestModulus = 2039;
inline constexpr std::uint64_t kTestOrder = 1019;
inline constexpr std::uint64_t kDeskModulus = 9223372036854771239ULL;
inline constexpr std::uint64_t kDeskOrder = 4611686018427385619ULL;

/// Shared, immutable group instance for a profile.
///
///  - test: p = 2039, q = 1019, G = 4. Small enough to brute-force; collisions
///    between keys are expected, so only use it for worked vectors.
///  - desk: 63-bit safe prime, G = 4. Fast enough for large simulations; not
///    cryptographically strong.
///  - standard: ristretto255.
inline GroupPtr make_group(Profile profile) {
  static const GroupPtr test = std::make_shared<SchnorrGroup>(Profile::Test, kTestModulus, kTestOrder, 4);
  static const GroupPtr desk = std::make_shared<SchnorrGroup>(Profile::Desk, kDeskModulus, kDeskOrder, 4);
  switch (profile) {
    case Profile::Test: return test;
    case Profile::Desk: return desk;
    case Profile::Standard: {
      static const GroupPtr standard = std::make_shared<Ristretto255Group>();
      return standard;
    }
  }
  throw std::invalid_argument("unknown profile");
}

/// Uniform scalar drawn from the caller's generator.
inline Scalar random_scalar(const Group& group, Rng& rng) {
  Wide w{};
  rng.fill(w.data(), w.size());
  return group.reduce(w);
}

}  // namespace pvx
