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

#include <set>

#include "pvx/primitives/stealth.hpp"

namespace pvx {
namespace {

Bytes seed_bytes(std::uint64_t i) {
  ByteWriter w;
  w.raw(as_bytes("wallet-")).u64(i);
  return std::move(w).take();
}

TEST(Stealth, KeypairIsDeterministicAndConsistent) {
  auto g = make_group(Profile::Desk);
  auto a = derive_stealth_keypair(*g, as_bytes("alice"));
  auto b = derive_stealth_keypair(*g, as_bytes("alice"));
  EXPECT_EQ(a.scan_secret, b.scan_secret);
  EXPECT_EQ(a.spend_public, b.spend_public);
  EXPECT_EQ(a.scan_public, g->pow_g(a.scan_secret));
  EXPECT_EQ(a.spend_public, g->pow_g(a.spend_secret));
  EXPECT_NE(a.scan_secret, a.spend_secret);
}

class StealthProfiles : public ::testing::TestWithParam<Profile> {};

TEST_P(StealthProfiles, RoundTripRecoversSpendSecret) {
  auto g = make_group(GetParam());
  auto bob = derive_stealth_keypair(*g, as_bytes("bob"));
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    Scalar e = random_scalar(*g, rng);
    if (g->is_zero(e)) continue;
    auto out = make_onetime_output(*g, bob.address(), e);
    auto x = recover_spend_secret(*g, bob, out.ephemeral_public, out.one_time_address);
    ASSERT_TRUE(x.has_value());
    EXPECT_EQ(g->pow_g(*x), out.one_time_address);
    EXPECT_EQ(out.shared_secret, g->pow(out.ephemeral_public, bob.scan_secret));
  }
}

TEST_P(StealthProfiles, OtherRecipientsCannotScan) {
  auto g = make_group(GetParam());
  auto bob = derive_stealth_keypair(*g, as_bytes("bob"));
  auto carol = derive_stealth_keypair(*g, as_bytes("carol"));
  auto out = make_onetime_output(*g, bob.address(), g->scalar(12345 % 1019 + 1));
  EXPECT_FALSE(recover_spend_secret(*g, carol, out.ephemeral_public, out.one_time_address).has_value());
  EXPECT_FALSE(scan_output(*g, carol.scan_secret, bob.spend_public, out.ephemeral_public, out.one_time_address));
}

TEST_P(StealthProfiles, MalformedInputsThrow) {
  auto g = make_group(GetParam());
  auto bob = derive_stealth_keypair(*g, as_bytes("bob"));
  EXPECT_THROW(make_onetime_output(*g, bob.address(), g->zero()), std::invalid_argument);
  StealthAddress bad{g->identity(), bob.spend_public};
  EXPECT_THROW(make_onetime_output(*g, bad, g->one()), std::invalid_argument);
  Element junk;
  junk.raw.fill(0xff);
  EXPECT_THROW(scan_output(*g, bob.scan_secret, bob.spend_public, junk, bob.spend_public), std::invalid_argument);
}

// Distinctness needs a group larger than the test profile's 1019 elements.
TEST_P(StealthProfiles, DistinctSeedsAndEphemeralsGiveDistinctKeys) {
  if (GetParam() == Profile::Test) GTEST_SKIP() << "order 1019 cannot hold 10^4 distinct keys";
  auto g = make_group(GetParam());
  std::set<Bytes> scans;
  for (std::uint64_t i = 0; i < 10000; ++i) scans.insert(g->encode(derive_stealth_keypair(*g, seed_bytes(i)).scan_public));
  EXPECT_EQ(scans.size(), 10000u);

  auto bob = derive_stealth_keypair(*g, as_bytes("bob"));
  const std::set<Bytes> published = {g->encode(bob.scan_public), g->encode(bob.spend_public)};
  std::set<Bytes> seen;
  Rng rng(12);
  const int outputs = GetParam() == Profile::Standard ? 1000 : 5000;
  for (int i = 0; i < outputs; ++i) {
    auto out = make_onetime_output(*g, bob.address(), random_scalar(*g, rng));
    Bytes p = g->encode(out.one_time_address), e = g->encode(out.ephemeral_public);
    EXPECT_FALSE(published.count(p));
    EXPECT_FALSE(published.count(e));
    ASSERT_TRUE(seen.insert(p).second);
    ASSERT_TRUE(seen.insert(e).second);
  }
}

INSTANTIATE_TEST_SUITE_P(Profiles, StealthProfiles, ::testing::Values(Profile::Test, Profile::Desk, Profile::Standard),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Stealth, OutputSecretsAreDomainSeparated) {
  auto g = make_group(Profile::Desk);
  auto s = derive_output_secrets(*g, g->pow_g(g->scalar(77)));
  EXPECT_NE(s.address_offset, s.blinding);
  EXPECT_NE(s.amount_mask, 0u);
}

}  // namespace
}  // namespace pvx
