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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pvx/group.hpp"
#include "pvx/primitives/stealth.hpp"

namespace pvx {

enum class EntityKind : std::uint8_t {
  RegulatedInstitution,
  RegisteredBusiness,
  Individual,  // also non-business partnerships
  Intermediary,
  CentralBank,
  Regulator,
};

inline constexpr std::array<EntityKind, 6> kAllEntityKinds = {
    EntityKind::RegulatedInstitution, EntityKind::RegisteredBusiness, EntityKind::Individual,
    EntityKind::Intermediary,         EntityKind::CentralBank,        EntityKind::Regulator};

inline std::string_view to_string(EntityKind k) {
  switch (k) {
    case EntityKind::RegulatedInstitution: return "RegulatedInstitution";
    case EntityKind::RegisteredBusiness: return "RegisteredBusiness";
    case EntityKind::Individual: return "Individual";
    case EntityKind::Intermediary: return "Intermediary";
    case EntityKind::CentralBank: return "CentralBank";
    case EntityKind::Regulator: return "Regulator";
  }
  return "?";
}

inline EntityKind parse_entity_kind(std::string_view s) {
  for (auto k : kAllEntityKinds)
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown entity kind '" + std::string(s) + "'");
}

/// Only these kinds may hold accounts for others.
inline bool can_hold_accounts(EntityKind k) {
  return k == EntityKind::RegulatedInstitution || k == EntityKind::CentralBank || k == EntityKind::Intermediary;
}

struct Entity {
  std::string id;
  EntityKind kind = EntityKind::Individual;
};

struct Account {
  std::string id;
  std::string institution;
  std::string owner;
};

/// Where to send a payment: an institutional account or a stealth address.
struct PaymentCoordinates {
  std::optional<std::string> account;
  std::optional<StealthAddress> stealth;
};

class RegistryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Entities, accounts, published stealth addresses, credential issuers and
/// intermediary fees. Static for a run apart from what the runner adds
/// between blocks.
class Registry {
public:
  void register_entity(Entity e) {
    if (e.id.empty()) throw RegistryError("entity id must not be empty");
    if (entities_.count(e.id) || accounts_.count(e.id)) throw RegistryError("duplicate id '" + e.id + "'");
    entities_.emplace(e.id, std::move(e));
  }

  void open_account(std::string id, const std::string& institution, const std::string& owner) {
    if (id.empty()) throw RegistryError("account id must not be empty");
    if (accounts_.count(id) || entities_.count(id)) throw RegistryError("duplicate id '" + id + "'");
    const Entity& inst = entity(institution);
    if (!can_hold_accounts(inst.kind))
      throw RegistryError("'" + institution + "' is a " + std::string(to_string(inst.kind)) + " and cannot hold accounts");
    entity(owner);
    by_owner_[owner].push_back(id);
    accounts_.emplace(id, Account{id, institution, owner});
  }

  void publish_stealth(const std::string& entity_id, const StealthAddress& addr) {
    entity(entity_id);
    stealth_[entity_id] = addr;
  }

  void register_issuer(const std::string& entity_id, const Element& public_key) {
    const Entity& e = entity(entity_id);
    if (e.kind != EntityKind::Intermediary)
      throw RegistryError("credential issuer '" + entity_id + "' must be an Intermediary");
    issuers_[entity_id] = public_key;
  }

  void set_fee(const std::string& intermediary, std::uint64_t fee) {
    if (entity(intermediary).kind != EntityKind::Intermediary)
      throw RegistryError("fee schedule entry for non-intermediary '" + intermediary + "'");
    fees_[intermediary] = fee;
  }

  bool has_entity(std::string_view id) const { return entities_.find(std::string(id)) != entities_.end(); }
  bool has_account(std::string_view id) const { return accounts_.find(std::string(id)) != accounts_.end(); }

  const Entity& entity(const std::string& id) const {
    auto it = entities_.find(id);
    if (it == entities_.end()) throw RegistryError("unknown entity '" + id + "'");
    return it->second;
  }

  const Account& lookup_account(const std::string& id) const {
    auto it = accounts_.find(id);
    if (it == accounts_.end()) throw RegistryError("unknown account '" + id + "'");
    return it->second;
  }

  /// Individuals are paid privately when they have published a stealth
  /// address; everyone else is paid into their first account.
  PaymentCoordinates lookup_recipient(const std::string& entity_id) const {
    const Entity& e = entity(entity_id);
    PaymentCoordinates out;
    auto st = stealth_.find(entity_id);
    if (e.kind == EntityKind::Individual && st != stealth_.end()) {
      out.stealth = st->second;
      return out;
    }
    auto acc = by_owner_.find(entity_id);
    if (acc != by_owner_.end() && !acc->second.empty()) {
      out.account = acc->second.front();
      return out;
    }
    if (st != stealth_.end()) {
      out.stealth = st->second;
      return out;
    }
    throw RegistryError("no payment coordinates for '" + entity_id + "'");
  }

  std::vector<std::string> accounts_of(const std::string& entity_id) const {
    auto it = by_owner_.find(entity_id);
    return it == by_owner_.end() ? std::vector<std::string>{} : it->second;
  }

  std::optional<StealthAddress> published_stealth(const std::string& entity_id) const {
    auto it = stealth_.find(entity_id);
    if (it == stealth_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<Element> issuer_key(const std::string& entity_id) const {
    auto it = issuers_.find(entity_id);
    if (it == issuers_.end()) return std::nullopt;
    return it->second;
  }

  std::uint64_t fee(const std::string& intermediary) const {
    auto it = fees_.find(intermediary);
    return it == fees_.end() ? 0 : it->second;
  }

  const std::map<std::string, Entity>& entities() const { return entities_; }
  const std::map<std::string, Account>& accounts() const { return accounts_; }
  const std::map<std::string, Element>& issuers() const { return issuers_; }

private:
  std::map<std::string, Entity> entities_;
  std::map<std::string, Account> accounts_;
  std::map<std::string, std::vector<std::string>> by_owner_;
  std::map<std::string, StealthAddress> stealth_;
  std::map<std::string, Element> issuers_;
  std::map<std::string, std::uint64_t> fees_;
};

}  // namespace pvx
