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

#include "pvx/entityreg/registry.hpp"

namespace pvx {
namespace {

Registry sample() {
  auto g = make_group(Profile::Desk);
  Registry r;
  r.register_entity({"bank", EntityKind::RegulatedInstitution});
  r.register_entity({"shop", EntityKind::RegisteredBusiness});
  r.register_entity({"alice", EntityKind::Individual});
  r.register_entity({"dave", EntityKind::Individual});
  r.register_entity({"mixer", EntityKind::Intermediary});
  r.open_account("shop-1", "bank", "shop");
  r.open_account("alice-1", "bank", "alice");
  r.publish_stealth("alice", derive_stealth_keypair(*g, as_bytes("alice")).address());
  return r;
}

TEST(Registry, Lookups) {
  auto r = sample();
  EXPECT_EQ(r.lookup_account("shop-1").owner, "shop");
  EXPECT_EQ(r.lookup_account("shop-1").institution, "bank");
  EXPECT_EQ(r.lookup_recipient("shop").account, "shop-1");
  auto alice = r.lookup_recipient("alice");
  EXPECT_TRUE(alice.stealth.has_value());
  EXPECT_FALSE(alice.account.has_value());
  EXPECT_THROW(r.lookup_account("nope"), RegistryError);
  EXPECT_THROW(r.lookup_recipient("nope"), RegistryError);
  EXPECT_THROW(r.lookup_recipient("dave"), RegistryError);  // no account, nothing published
}

TEST(Registry, Integrity) {
  auto r = sample();
  EXPECT_THROW(r.register_entity({"shop", EntityKind::Individual}), RegistryError);
  EXPECT_THROW(r.open_account("shop-1", "bank", "alice"), RegistryError);
  EXPECT_THROW(r.open_account("x", "shop", "alice"), RegistryError);  // businesses do not hold accounts
  EXPECT_THROW(r.open_account("x", "bank", "ghost"), RegistryError);
  EXPECT_THROW(r.set_fee("bank", 3), RegistryError);
  EXPECT_THROW(r.register_issuer("bank", Element{}), RegistryError);
  r.set_fee("mixer", 3);
  EXPECT_EQ(r.fee("mixer"), 3u);
  EXPECT_TRUE(r.accounts_of("dave").empty());
}

}  // namespace
}  // namespace pvx
