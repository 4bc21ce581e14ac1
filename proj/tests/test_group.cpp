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

#include "pvx/group.hpp"

namespace pvx {
namespace {

// Expected values computed by tests/oracles/group_vectors.py.
TEST(SchnorrVectors, TestProfileAmountBase) {
  auto g = make_group(Profile::Test);
  EXPECT_EQ(g->encode(g->amount_base()), (Bytes{0x03, 0xad}));  // 941
  EXPECT_EQ(g->encode(g->generator()), (Bytes{0x00, 0x04}));
  EXPECT_EQ(g->params().modulus, "2039");
  EXPECT_EQ(g->params().order, "1019");
}

TEST(SchnorrVectors, DeskProfileAmountBase) {
  auto g = make_group(Profile::Desk);
  EXPECT_EQ(load_be64(g->encode(g->amount_base())), 5378248205526501042ULL);
}

TEST(SchnorrVectors, HashToScalar) {
  EXPECT_EQ(load_be64(make_group(Profile::Test)->encode(
                make_group(Profile::Test)->hash_to_scalar(tags::kRing, {as_bytes("abc")}))),
            919u);
  auto desk = make_group(Profile::Desk);
  EXPECT_EQ(load_be64(desk->encode(desk->hash_to_scalar(tags::kRing, {as_bytes("abc")}))), 1882058173027723974ULL);
}

TEST(SchnorrGroup, ScalarRangeIsEnforced) {
  auto g = make_group(Profile::Test);
  EXPECT_NO_THROW(g->scalar(1018));
  EXPECT_THROW(g->scalar(1019), std::out_of_range);
  EXPECT_THROW(g->decode_scalar(Bytes{0x03, 0xfb}), std::invalid_argument);  // 1019
  EXPECT_THROW(g->decode_element(Bytes{0x07, 0xf6}), std::invalid_argument);  // -1 is a non-residue
  EXPECT_THROW(g->decode_element(Bytes{0x04}), std::invalid_argument);
}

TEST(SchnorrGroup, SignedScalarWrapsNegatives) {
  auto g = make_group(Profile::Test);
  EXPECT_EQ(g->signed_scalar(-1), g->scalar(1018));
  EXPECT_EQ(g->add(g->signed_scalar(-5), g->scalar(5)), g->zero());
}

class GroupLaws : public ::testing::TestWithParam<Profile> {};

TEST_P(GroupLaws, BasicIdentities) {
  auto g = make_group(GetParam());
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    Scalar a = random_scalar(*g, rng), b = random_scalar(*g, rng);
    EXPECT_EQ(g->op(g->pow_g(a), g->pow_g(b)), g->pow_g(g->add(a, b)));
    EXPECT_EQ(g->pow(g->pow_g(a), b), g->pow_g(g->mul(a, b)));
    EXPECT_EQ(g->op(g->pow_g(a), g->inverse(g->pow_g(a))), g->identity());
    EXPECT_EQ(g->add(a, g->neg(a)), g->zero());
    EXPECT_EQ(g->sub(a, b), g->add(a, g->neg(b)));
    EXPECT_TRUE(g->valid(g->pow_g(a)));
  }
  EXPECT_EQ(g->pow_g(g->zero()), g->identity());
  EXPECT_EQ(g->pow(g->amount_base(), g->zero()), g->identity());
  EXPECT_TRUE(g->valid(g->identity()));
  EXPECT_NE(g->amount_base(), g->generator());
}

TEST_P(GroupLaws, EncodingRoundTrip) {
  auto g = make_group(GetParam());
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    Scalar s = random_scalar(*g, rng);
    Element e = g->pow_g(s);
    Bytes se = g->encode(s), ee = g->encode(e);
    EXPECT_EQ(se.size(), g->scalar_size());
    EXPECT_EQ(ee.size(), g->element_size());
    EXPECT_EQ(g->decode_scalar(se), s);
    EXPECT_EQ(g->decode_element(ee), e);
  }
  // Scalars serialise big-endian regardless of the native layout.
  Bytes one = g->encode(g->one());
  EXPECT_EQ(one.back(), 1);
  EXPECT_EQ(std::count(one.begin(), one.end(), 0), static_cast<long>(one.size() - 1));
}

TEST_P(GroupLaws, HashToGroupIsDeterministicAndDomainSeparated) {
  auto g = make_group(GetParam());
  auto a = g->hash_to_group(tags::kKeyImage, {as_bytes("x")});
  EXPECT_EQ(a, g->hash_to_group(tags::kKeyImage, {as_bytes("x")}));
  EXPECT_TRUE(g->valid(a));
  EXPECT_NE(a, g->identity());
  if (GetParam() != Profile::Test) EXPECT_NE(a, g->hash_to_group(tags::kRing, {as_bytes("x")}));
}

INSTANTIATE_TEST_SUITE_P(Profiles, GroupLaws, ::testing::Values(Profile::Test, Profile::Desk, Profile::Standard),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Profiles, ParseNames) {
  EXPECT_EQ(parse_profile("desk"), Profile::Desk);
  EXPECT_THROW(parse_profile("curve"), std::invalid_argument);
}

TEST(RistrettoGroup, RejectsNonCanonicalScalar) {
  auto g = make_group(Profile::Standard);
  Bytes all_ones(32, 0xff);
  EXPECT_THROW(g->decode_scalar(all_ones), std::invalid_argument);
  Bytes bad_point(32, 0xff);
  EXPECT_THROW(g->decode_element(bad_point), std::invalid_argument);
}

}  // namespace
}  // namespace pvx
