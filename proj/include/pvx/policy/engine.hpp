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
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pvx/entityreg/registry.hpp"
#include "pvx/ledger/tx_kind.hpp"

namespace pvx {

enum class Mode : std::uint8_t { Supported, Mediated };

inline std::string_view to_string(Mode m) { return m == Mode::Supported ? "supported" : "mediated"; }

inline Mode parse_mode(std::string_view s) {
  if (s == "supported") return Mode::Supported;
  if (s == "mediated") return Mode::Mediated;
  throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

enum class DenyReason : std::uint8_t {
  MediationRequired,
  BusinessToStoreForbidden,
  Blacklisted,
  CredentialRequired,
  CredentialReused,
  ThresholdIdentificationRequired,
  IssuerNotAuthorized,
};

inline constexpr std::array<DenyReason, 7> kAllDenyReasons = {
    DenyReason::MediationRequired,  DenyReason::BusinessToStoreForbidden,
    DenyReason::Blacklisted,        DenyReason::CredentialRequired,
    DenyReason::CredentialReused,   DenyReason::ThresholdIdentificationRequired,
    DenyReason::IssuerNotAuthorized};

inline std::string_view to_string(DenyReason r) {
  switch (r) {
    case DenyReason::MediationRequired: return "MediationRequired";
    case DenyReason::BusinessToStoreForbidden: return "BusinessToStoreForbidden";
    case DenyReason::Blacklisted: return "Blacklisted";
    case DenyReason::CredentialRequired: return "CredentialRequired";
    case DenyReason::CredentialReused: return "CredentialReused";
    case DenyReason::ThresholdIdentificationRequired: return "ThresholdIdentificationRequired";
    case DenyReason::IssuerNotAuthorized: return "IssuerNotAuthorized";
  }
  return "?";
}

inline DenyReason parse_deny_reason(std::string_view s) {
  for (auto r : kAllDenyReasons)
    if (to_string(r) == s) return r;
  throw std::invalid_argument("unknown deny reason '" + std::string(s) + "'");
}

/// Where value sits on one side of an intent. None only appears as the
/// source of an Issue.
enum class EndpointClass : std::uint8_t { None, Account, Store };

inline std::string_view to_string(EndpointClass c) {
  switch (c) {
    case EndpointClass::None: return "none";
    case EndpointClass::Account: return "account";
    case EndpointClass::Store: return "store";
  }
  return "?";
}

struct Endpoint {
  EndpointClass cls = EndpointClass::None;
  std::optional<EntityKind> kind;  // unknown for anonymous stores
};

struct CredentialStatus {
  bool valid = false;
  bool unused = false;
};

struct IntentDescriptor {
  TxKind kind = TxKind::TransparentTransfer;
  Endpoint source;
  Endpoint destination;
  std::optional<std::uint64_t> visible_amount;      // set when the amount is transparent
  std::vector<std::string> destination_ids;         // transparent-visible destination entities/accounts
  std::vector<CredentialStatus> credentials;
  std::size_t participants = 0;                     // senders in a MediatedBatch
};

struct RuleSet {
  Mode mode = Mode::Supported;
  std::set<std::string> blacklist;
  std::optional<std::uint64_t> threshold;
};

struct PolicyVerdict {
  std::optional<DenyReason> deny;

  bool allowed() const { return !deny; }
  static PolicyVerdict allow() { return {}; }
  static PolicyVerdict denied(DenyReason r) { return {r}; }
  friend bool operator==(const PolicyVerdict&, const PolicyVerdict&) = default;
};

inline std::string to_string(const PolicyVerdict& v) {
  return v.allowed() ? "Allow" : "Deny(" + std::string(to_string(*v.deny)) + ")";
}

class PolicyError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Endpoint classes each kind must have. Issue has no source.
inline std::pair<EndpointClass, EndpointClass> expected_endpoints(TxKind k) {
  switch (k) {
    case TxKind::TransparentTransfer: return {EndpointClass::Account, EndpointClass::Account};
    case TxKind::Shield: return {EndpointClass::Account, EndpointClass::Store};
    case TxKind::Unshield: return {EndpointClass::Store, EndpointClass::Account};
    case TxKind::ShieldedTransfer:
    case TxKind::MediatedBatch: return {EndpointClass::Store, EndpointClass::Store};
    case TxKind::Issue: return {EndpointClass::None, EndpointClass::Account};
  }
  return {EndpointClass::None, EndpointClass::None};
}

/// Throws PolicyError when the descriptor is incomplete or self-contradictory.
inline void check_descriptor(const IntentDescriptor& d) {
  auto [src, dst] = expected_endpoints(d.kind);
  if (d.source.cls != src || d.destination.cls != dst)
    throw PolicyError(std::string(to_string(d.kind)) + " expects " + std::string(to_string(src)) + " -> " +
                      std::string(to_string(dst)));
  // Accounts always resolve to an owner; Issue needs the issuer's kind.
  if (d.source.cls == EndpointClass::Account && !d.source.kind) throw PolicyError("source account kind unknown");
  if (d.destination.cls == EndpointClass::Account && !d.destination.kind)
    throw PolicyError("destination account kind unknown");
  if (d.kind == TxKind::Issue && !d.source.kind) throw PolicyError("issuer kind unknown");
  if (d.kind == TxKind::MediatedBatch && d.participants < 2) throw PolicyError("a batch needs at least two participants");
}

namespace detail {
inline bool store_for_non_individual(const Endpoint& e) {
  return e.cls == EndpointClass::Store && e.kind && *e.kind != EntityKind::Individual;
}

inline std::optional<DenyReason> credential_check(const std::vector<CredentialStatus>& creds, std::size_t needed) {
  std::size_t valid = 0;
  for (const auto& c : creds) valid += c.valid;
  if (valid < needed) return DenyReason::CredentialRequired;
  for (const auto& c : creds)
    if (c.valid && !c.unused) return DenyReason::CredentialReused;
  return std::nullopt;
}
}  // namespace detail

/// Pure flow-rule decision. Blacklists and the identification threshold are
/// enforced only in mediated mode, where institutions run the ledger; in
/// supported mode nothing on-ledger can stop a flow.
inline PolicyVerdict authorize(const IntentDescriptor& d, const RuleSet& rules) {
  check_descriptor(d);
  const bool mediated = rules.mode == Mode::Mediated;

  if (d.kind == TxKind::Issue) {
    if (!mediated || *d.source.kind != EntityKind::CentralBank) return PolicyVerdict::denied(DenyReason::IssuerNotAuthorized);
  }
  // Funds of legal entities other than individuals never enter or leave
  // private stores.
  if (detail::store_for_non_individual(d.source) || detail::store_for_non_individual(d.destination))
    return PolicyVerdict::denied(DenyReason::BusinessToStoreForbidden);
  if (d.kind == TxKind::Shield && *d.source.kind != EntityKind::Individual)
    return PolicyVerdict::denied(DenyReason::BusinessToStoreForbidden);
  if (d.kind == TxKind::ShieldedTransfer && mediated) return PolicyVerdict::denied(DenyReason::MediationRequired);

  if (!mediated) return PolicyVerdict::allow();

  if (d.destination.cls == EndpointClass::Account)
    for (const auto& id : d.destination_ids)
      if (rules.blacklist.count(id)) return PolicyVerdict::denied(DenyReason::Blacklisted);

  if (d.kind == TxKind::Unshield && rules.threshold && d.visible_amount && *d.visible_amount > *rules.threshold) {
    if (auto r = detail::credential_check(d.credentials, 1)) {
      return PolicyVerdict::denied(*r == DenyReason::CredentialRequired ? DenyReason::ThresholdIdentificationRequired : *r);
    }
  }
  if (d.kind == TxKind::MediatedBatch) {
    if (auto r = detail::credential_check(d.credentials, d.participants)) return PolicyVerdict::denied(*r);
  }
  return PolicyVerdict::allow();
}

/// Flags an entity or account; unknown ids are an error.
inline void update_blacklist(RuleSet& rules, const Registry& registry, const std::string& id, bool flag) {
  if (!registry.has_entity(id) && !registry.has_account(id)) throw RegistryError("unknown id '" + id + "'");
  if (flag) {
    rules.blacklist.insert(id);
  } else {
    rules.blacklist.erase(id);
  }
}

}  // namespace pvx
