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
#include <span>

#include "pvx/group.hpp"

namespace pvx {

/// Pedersen commitment G^r · H^v to amount v with blinding r.
struct Commitment {
  Element point;
  friend auto operator<=>(const Commitment&, const Commitment&) = default;
};

inline Commitment commit(const Group& group, const Scalar& v, const Scalar& r) {
  return {group.op(group.pow_g(r), group.pow(group.amount_base(), v))};
}

/// Integer-amount overload; throws std::out_of_range if v is not below q.
inline Commitment commit(const Group& group, std::uint64_t v, const Scalar& r) { return commit(group, group.scalar(v), r); }

inline Commitment add_commitments(const Group& group, const Commitment& a, const Commitment& b) {
  return {group.op(a.point, b.point)};
}

inline Commitment negate_commitment(const Group& group, const Commitment& a) { return {group.inverse(a.point)}; }

inline Commitment identity_commitment(const Group& group) { return {group.identity()}; }

inline Commitment sum_commitments(const Group& group, std::span<const Commitment> cs) {
  Commitment acc = identity_commitment(group);
  for (const auto& c : cs) acc = add_commitments(group, acc, c);
  return acc;
}

inline bool verify_opening(const Group& group, const Commitment& c, const Scalar& v, const Scalar& r) {
  return commit(group, v, r) == c;
}

inline bool verify_opening(const Group& group, const Commitment& c, std::uint64_t v, const Scalar& r) {
  return group.scalar_fits(v) && verify_opening(group, c, group.scalar(v), r);
}

}  // namespace pvx
