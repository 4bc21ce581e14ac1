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
#include <stdexcept>
#include <string>
#include <string_view>

namespace pvx {

enum class TxKind : std::uint8_t {
  TransparentTransfer = 0,
  Shield = 1,
  Unshield = 2,
  ShieldedTransfer = 3,
  MediatedBatch = 4,
  Issue = 5,
};

inline constexpr std::array<TxKind, 6> kAllTxKinds = {TxKind::TransparentTransfer, TxKind::Shield,
                                                      TxKind::Unshield,            TxKind::ShieldedTransfer,
                                                      TxKind::MediatedBatch,       TxKind::Issue};

inline std::string_view to_string(TxKind k) {
  switch (k) {
    case TxKind::TransparentTransfer: return "TransparentTransfer";
    case TxKind::Shield: return "Shield";
    case TxKind::Unshield: return "Unshield";
    case TxKind::ShieldedTransfer: return "ShieldedTransfer";
    case TxKind::MediatedBatch: return "MediatedBatch";
    case TxKind::Issue: return "Issue";
  }
  return "?";
}

inline TxKind parse_tx_kind(std::string_view s) {
  for (auto k : kAllTxKinds)
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown transaction kind '" + std::string(s) + "'");
}

}  // namespace pvx
