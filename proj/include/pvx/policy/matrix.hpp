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

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pvx/policy/engine.hpp"

namespace pvx {

/// Credential presentations varied across the matrix.
enum class CredentialCase : std::uint8_t { None, Valid, Reused, Invalid };

inline constexpr std::array<CredentialCase, 4> kAllCredentialCases = {CredentialCase::None, CredentialCase::Valid,
                                                                      CredentialCase::Reused, CredentialCase::Invalid};

inline std::string_view to_string(CredentialCase c) {
  switch (c) {
    case CredentialCase::None: return "none";
    case CredentialCase::Valid: return "valid";
    case CredentialCase::Reused: return "reused";
    case CredentialCase::Invalid: return "invalid";
  }
  return "?";
}

/// Two credentials per case, matching the two batch participants.
inline std::vector<CredentialStatus> credentials_for(CredentialCase c) {
  switch (c) {
    case CredentialCase::None: return {};
    case CredentialCase::Valid: return {{true, true}, {true, true}};
    case CredentialCase::Reused: return {{true, true}, {true, false}};
    case CredentialCase::Invalid: return {{false, true}, {false, true}};
  }
  return {};
}

struct MatrixCell {
  Mode mode;
  TxKind kind;
  EndpointClass source_class;
  std::optional<EntityKind> source_kind;
  EndpointClass destination_class;
  std::optional<EntityKind> destination_kind;
  CredentialCase credentials;

  IntentDescriptor descriptor() const {
    IntentDescriptor d;
    d.kind = kind;
    d.source = {source_class, source_kind};
    d.destination = {destination_class, destination_kind};
    if (destination_class == EndpointClass::Account) d.visible_amount = 100;
    d.credentials = credentials_for(credentials);
    d.participants = kind == TxKind::MediatedBatch ? 2 : 0;
    return d;
  }
};

/// authorize() outcome, or nullopt when the descriptor is rejected as
/// inconsistent.
inline std::optional<PolicyVerdict> evaluate_cell(const MatrixCell& c) {
  RuleSet rules;
  rules.mode = c.mode;
  try {
    return authorize(c.descriptor(), rules);
  } catch (const PolicyError&) {
    return std::nullopt;
  }
}

inline void for_each_cell(const std::vector<Mode>& modes, const std::function<void(const MatrixCell&)>& fn) {
  std::vector<std::optional<EntityKind>> kinds = {std::nullopt};
  for (auto k : kAllEntityKinds) kinds.push_back(k);
  const EndpointClass classes[] = {EndpointClass::None, EndpointClass::Account, EndpointClass::Store};
  for (auto mode : modes)
    for (auto kind : kAllTxKinds)
      for (auto sc : classes)
        for (const auto& sk : kinds)
          for (auto dc : classes)
            for (const auto& dk : kinds)
              for (auto cc : kAllCredentialCases) fn(MatrixCell{mode, kind, sc, sk, dc, dk, cc});
}

inline std::string describe_endpoint(EndpointClass c, const std::optional<EntityKind>& k) {
  return std::string(to_string(c)) + "/" + (k ? std::string(to_string(*k)) : std::string("-"));
}

inline void print_matrix(std::ostream& out, Mode mode) {
  out << "# mode kind source destination credentials verdict\n";
  for_each_cell({mode}, [&](const MatrixCell& c) {
    auto v = evaluate_cell(c);
    out << to_string(c.mode) << ' ' << to_string(c.kind) << ' ' << describe_endpoint(c.source_class, c.source_kind)
        << ' ' << describe_endpoint(c.destination_class, c.destination_kind) << ' ' << to_string(c.credentials) << ' '
        << (v ? to_string(*v) : std::string("Invalid")) << '\n';
  });
}

}  // namespace pvx
