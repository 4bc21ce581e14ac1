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
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pvx/observer/link_attack.hpp"
#include "pvx/policy/engine.hpp"

namespace pvx {

enum class Support : std::uint8_t { Full, Partial, None, Unmeasured };

inline std::string_view to_string(Support s) {
  switch (s) {
    case Support::Full: return "full";
    case Support::Partial: return "partial";
    case Support::None: return "none";
    case Support::Unmeasured: return "unmeasured";
  }
  return "?";
}

inline Support parse_support(std::string_view s) {
  for (auto v : {Support::Full, Support::Partial, Support::None, Support::Unmeasured})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown support level '" + std::string(s) + "'");
}

enum class Provenance : std::uint8_t { Static, Measured };

inline std::string_view to_string(Provenance p) {
  return p == Provenance::Static ? "static-by-construction" : "measured-by-probe";
}

enum class Desideratum : std::uint8_t {
  RobustToCyberattacks,
  UsableWithoutRegistration,
  UnlinkableTransactions,
  ElectronicTransactions,
  SuitableForTaxation,
  CanBlockIllicitUses,
  FiatDenominated,
};

inline constexpr std::array<Desideratum, 7> kAllDesiderata = {
    Desideratum::RobustToCyberattacks,  Desideratum::UsableWithoutRegistration, Desideratum::UnlinkableTransactions,
    Desideratum::ElectronicTransactions, Desideratum::SuitableForTaxation,      Desideratum::CanBlockIllicitUses,
    Desideratum::FiatDenominated};

inline std::string_view to_string(Desideratum d) {
  switch (d) {
    case Desideratum::RobustToCyberattacks: return "Robust to cyberattacks";
    case Desideratum::UsableWithoutRegistration: return "Usable without registration";
    case Desideratum::UnlinkableTransactions: return "Unlinkable transactions";
    case Desideratum::ElectronicTransactions: return "Electronic transactions";
    case Desideratum::SuitableForTaxation: return "Suitable for taxation";
    case Desideratum::CanBlockIllicitUses: return "Can block some illicit uses";
    case Desideratum::FiatDenominated: return "Can be denominated in units of fiat currency";
  }
  return "?";
}

inline Desideratum parse_desideratum(std::string_view s) {
  for (auto d : kAllDesiderata)
    if (to_string(d) == s) return d;
  throw std::invalid_argument("unknown desideratum '" + std::string(s) + "'");
}

/// Evidence gathered while a scenario ran.
struct ProbeResults {
  std::vector<LinkAttackStats> attacks;
  double attack_z_limit = 3.0;
  std::optional<bool> tax_complete;          // reports matched every known business receipt
  std::uint64_t blacklist_attempts = 0;      // payments to a blacklisted destination
  std::uint64_t blacklist_accepted = 0;
  std::uint64_t unregistered_attempts = 0;   // store-to-store spends by holders with no account and no credential
  std::uint64_t unregistered_accepted = 0;
};

struct DesiderataRow {
  Desideratum row;
  Support verdict = Support::Unmeasured;
  Provenance provenance = Provenance::Static;
  std::string evidence;
  friend bool operator==(const DesiderataRow&, const DesiderataRow&) = default;
};

struct DesiderataMatrix {
  Mode mode = Mode::Supported;
  std::vector<DesiderataRow> rows;
  friend bool operator==(const DesiderataMatrix&, const DesiderataMatrix&) = default;

  Support verdict(Desideratum d) const {
    for (const auto& r : rows)
      if (r.row == d) return r.verdict;
    return Support::Unmeasured;
  }
};

inline DesiderataMatrix desiderata_report(Mode mode, const ProbeResults& p) {
  DesiderataMatrix m{mode, {}};
  auto fixed = [&](Desideratum d, Support s, std::string why) { m.rows.push_back({d, s, Provenance::Static, std::move(why)}); };
  auto measured = [&](Desideratum d, Support s, std::string why) {
    m.rows.push_back({d, s, Provenance::Measured, std::move(why)});
  };

  fixed(Desideratum::RobustToCyberattacks, Support::None, "electronic system; not measured");

  if (p.unregistered_attempts == 0) {
    measured(Desideratum::UsableWithoutRegistration, Support::Unmeasured, "no store-to-store spend by an unregistered holder");
  } else {
    measured(Desideratum::UsableWithoutRegistration, p.unregistered_accepted ? Support::Full : Support::None,
             std::to_string(p.unregistered_accepted) + "/" + std::to_string(p.unregistered_attempts) +
                 " unregistered store-to-store spends committed");
  }

  if (p.attacks.empty()) {
    measured(Desideratum::UnlinkableTransactions, Support::Unmeasured, "no link attack ran");
  } else {
    double worst = -1e300;
    std::string which;
    for (const auto& a : p.attacks)
      if (a.z > worst) {
        worst = a.z;
        which = std::string(to_string(a.heuristic));
      }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max z %.2f (%s) over %zu attacks", worst, which.c_str(), p.attacks.size());
    measured(Desideratum::UnlinkableTransactions, worst <= p.attack_z_limit ? Support::Full : Support::Partial, buf);
  }

  fixed(Desideratum::ElectronicTransactions, Support::Full, "ledger transactions");

  if (!p.tax_complete) {
    measured(Desideratum::SuitableForTaxation, Support::Unmeasured, "no business receipts");
  } else {
    measured(Desideratum::SuitableForTaxation, *p.tax_complete ? Support::Full : Support::Partial,
             *p.tax_complete ? "tax reports cover every business receipt" : "business receipts missing from reports");
  }

  if (p.blacklist_attempts == 0) {
    measured(Desideratum::CanBlockIllicitUses, Support::Unmeasured, "no payment to a blacklisted party");
  } else {
    Support s = p.blacklist_accepted == 0                      ? Support::Full
                : p.blacklist_accepted == p.blacklist_attempts ? Support::None
                                                               : Support::Partial;
    measured(Desideratum::CanBlockIllicitUses, s,
             std::to_string(p.blacklist_attempts - p.blacklist_accepted) + "/" + std::to_string(p.blacklist_attempts) +
                 " blacklisted payments blocked");
  }

  if (mode == Mode::Mediated)
    fixed(Desideratum::FiatDenominated, Support::Full, "units issued by the central bank");
  else
    fixed(Desideratum::FiatDenominated, Support::None, "native units with supply fixed at genesis");
  return m;
}

inline void print_desiderata(std::ostream& os, const DesiderataMatrix& m) {
  os << "Desiderata (" << to_string(m.mode) << ")\n";
  for (const auto& r : m.rows) {
    std::string name(to_string(r.row));
    name.resize(46, ' ');
    std::string v(to_string(r.verdict));
    v.resize(11, ' ');
    os << "  " << name << v << " [" << to_string(r.provenance) << "] " << r.evidence << "\n";
  }
}

}  // namespace pvx
