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
#include <gtest/gtest.h>

#include "pvx/policy/engine.hpp"
#include "support/policy_table.hpp"

namespace pvx {
namespace {

IntentDescriptor intent(TxKind kind, Endpoint src, Endpoint dst) {
  IntentDescriptor d;
  d.kind = kind;
  d.source = src;
  d.destination = dst;
  if (kind == TxKind::MediatedBatch) d.participants = 2;
  return d;
}

constexpr Endpoint store() { return {EndpointClass::Store, std::nullopt}; }
constexpr Endpoint account(EntityKind k) { return {EndpointClass::Account, k}; }

TEST(Policy, DirectStoreToStoreNeedsMediation) {
  auto d = intent(TxKind::ShieldedTransfer, store(), store());
  EXPECT_EQ(authorize(d, {Mode::Mediated}), PolicyVerdict::denied(DenyReason::MediationRequired));
  EXPECT_TRUE(authorize(d, {Mode::Supported}).allowed());
}

TEST(Policy, BusinessCannotShield) {
  auto d = intent(TxKind::Shield, account(EntityKind::RegisteredBusiness), store());
  EXPECT_EQ(authorize(d, {Mode::Supported}), PolicyVerdict::denied(DenyReason::BusinessToStoreForbidden));
  EXPECT_EQ(authorize(d, {Mode::Mediated}), PolicyVerdict::denied(DenyReason::BusinessToStoreForbidden));
  EXPECT_TRUE(authorize(intent(TxKind::Shield, account(EntityKind::Individual), store()), {Mode::Supported}).allowed());
}

TEST(Policy, BlacklistedDestination) {
  Registry reg;
  reg.register_entity({"bank", EntityKind::RegulatedInstitution});
  reg.register_entity({"bob", EntityKind::RegisteredBusiness});
  reg.open_account("bob-acct", "bank", "bob");
  RuleSet rules{Mode::Mediated};
  auto d = intent(TxKind::Unshield, store(), account(EntityKind::RegisteredBusiness));
  d.destination_ids = {"bob", "bob-acct"};
  d.visible_amount = 10;
  EXPECT_TRUE(authorize(d, rules).allowed());
  update_blacklist(rules, reg, "bob", true);
  EXPECT_EQ(authorize(d, rules), PolicyVerdict::denied(DenyReason::Blacklisted));
  update_blacklist(rules, reg, "bob", false);
  EXPECT_TRUE(authorize(d, rules).allowed());
  EXPECT_THROW(update_blacklist(rules, reg, "mallory", true), RegistryError);
}

TEST(Policy, BlacklistIgnoresShieldedLegs) {
  RuleSet rules{Mode::Mediated, {"carol"}};
  auto d = intent(TxKind::MediatedBatch, store(), store());
  d.destination_ids = {"carol"};
  d.credentials = {{true, true}, {true, true}};
  EXPECT_TRUE(authorize(d, rules).allowed());
}

TEST(Policy, ThresholdNeedsIdentification) {
  RuleSet rules{Mode::Mediated, {}, 50};
  auto d = intent(TxKind::Unshield, store(), account(EntityKind::RegisteredBusiness));
  d.visible_amount = 50;
  EXPECT_TRUE(authorize(d, rules).allowed());
  d.visible_amount = 51;
  EXPECT_EQ(authorize(d, rules), PolicyVerdict::denied(DenyReason::ThresholdIdentificationRequired));
  d.credentials = {{true, true}};
  EXPECT_TRUE(authorize(d, rules).allowed());
  d.credentials = {{true, false}};
  EXPECT_EQ(authorize(d, rules), PolicyVerdict::denied(DenyReason::CredentialReused));
}

TEST(Policy, BatchCredentials) {
  RuleSet rules{Mode::Mediated};
  auto d = intent(TxKind::MediatedBatch, store(), store());
  d.participants = 3;
  d.credentials = {{true, true}, {true, true}};
  EXPECT_EQ(authorize(d, rules), PolicyVerdict::denied(DenyReason::CredentialRequired));
  d.credentials.push_back({true, true});
  EXPECT_TRUE(authorize(d, rules).allowed());
  d.participants = 1;
  EXPECT_THROW(authorize(d, rules), PolicyError);
}

TEST(Policy, IssueRules) {
  auto d = intent(TxKind::Issue, {EndpointClass::None, EntityKind::CentralBank}, account(EntityKind::RegulatedInstitution));
  EXPECT_TRUE(authorize(d, {Mode::Mediated}).allowed());
  EXPECT_EQ(authorize(d, {Mode::Supported}), PolicyVerdict::denied(DenyReason::IssuerNotAuthorized));
  d.source.kind = EntityKind::RegulatedInstitution;
  EXPECT_EQ(authorize(d, {Mode::Mediated}), PolicyVerdict::denied(DenyReason::IssuerNotAuthorized));
}

TEST(Policy, IncompleteDescriptorThrows) {
  EXPECT_THROW(authorize(intent(TxKind::Shield, store(), store()), {}), PolicyError);
  EXPECT_THROW(authorize(intent(TxKind::TransparentTransfer, {EndpointClass::Account, std::nullopt},
                                account(EntityKind::Individual)),
                         {}),
               PolicyError);
}

TEST(PolicyMatrix, EveryCellMatchesTable) {
  std::size_t cells = 0, allowed = 0;
  for_each_cell({Mode::Supported, Mode::Mediated}, [&](const MatrixCell& c) {
    auto v = evaluate_cell(c);
    std::string got = v ? to_string(*v) : "Invalid";
    ASSERT_EQ(got, testing::expected_verdict(c))
        << to_string(c.mode) << ' ' << to_string(c.kind) << ' ' << describe_endpoint(c.source_class, c.source_kind)
        << ' ' << describe_endpoint(c.destination_class, c.destination_kind) << ' ' << to_string(c.credentials);
    ++cells;
    allowed += got == "Allow";
  });
  EXPECT_EQ(cells, 2u * 6 * 3 * 7 * 3 * 7 * 4);
  EXPECT_GT(allowed, 0u);
}

// Stripping credentials, anything a private actor may do under mediation is
// also possible under support. Issue is excluded: minting is a central-bank
// power that only exists in mediated mode.
TEST(PolicyMatrix, SupportedIsMorePermissive) {
  for_each_cell({Mode::Mediated}, [&](const MatrixCell& c) {
    if (c.kind == TxKind::Issue) return;
    auto med = evaluate_cell(c);
    if (!med || !med->allowed()) return;
    MatrixCell sup = c;
    sup.mode = Mode::Supported;
    sup.credentials = CredentialCase::None;
    auto v = evaluate_cell(sup);
    ASSERT_TRUE(v && v->allowed()) << to_string(c.kind);
  });
}

TEST(Policy, ReasonSpellings) {
  const char* names[] = {"MediationRequired", "BusinessToStoreForbidden", "Blacklisted", "CredentialRequired",
                         "CredentialReused", "ThresholdIdentificationRequired", "IssuerNotAuthorized"};
  for (const char* n : names) EXPECT_EQ(to_string(parse_deny_reason(n)), n);
}

}  // namespace
}  // namespace pvx
