/*
 * Copyright 2026 The HarmAmp Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "harmamp/disparity.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "oracles.h"

namespace harmamp::disparity {
namespace {

TEST(AmplificationRate, Basics) {
  EXPECT_EQ(AmplificationRate({true, false, false, false})->rate, 0.25);
  EXPECT_EQ(AmplificationRate({false, false})->rate, 0.0);
  EXPECT_EQ(AmplificationRate({true, true, true})->rate, 1.0);
  EXPECT_FALSE(AmplificationRate({}).ok());
}

TEST(TwoProportionTest, IdenticalProportions) {
  auto t = TwoProportionTest(50, 100, 25, 50);
  ASSERT_TRUE(t.ok());
  EXPECT_EQ(t->z, 0.0);
  EXPECT_EQ(t->p_two_sided, 1.0);
  EXPECT_FALSE(t->degenerate);
}

TEST(TwoProportionTest, MatchesQuadratureOracle) {
  auto t = TwoProportionTest(80, 200, 40, 200);
  ASSERT_TRUE(t.ok());
  // Pooled 0.3: z = 0.2 / sqrt(0.3 * 0.7 * (2 / 200)).
  const double z = 0.2 / std::sqrt(0.3 * 0.7 * 0.01);
  EXPECT_NEAR(t->z, z, 1e-12);
  const double p = 2.0 * oracle::NormalUpperTailSimpson(z);
  EXPECT_NEAR(t->p_two_sided / p, 1.0, 1e-8);
  EXPECT_LT(t->p_two_sided, 0.001);
  EXPECT_EQ(SignificantAt(t->p_two_sided),
            (std::vector<double>{0.05, 0.01, 0.001}));
}

TEST(TwoProportionTest, DegenerateAndErrors) {
  auto t = TwoProportionTest(0, 100, 0, 100);
  ASSERT_TRUE(t.ok());
  EXPECT_TRUE(t->degenerate);
  EXPECT_TRUE(TwoProportionTest(10, 10, 5, 5)->degenerate);
  EXPECT_FALSE(TwoProportionTest(1, 0, 1, 1).ok());
  EXPECT_FALSE(TwoProportionTest(3, 2, 1, 1).ok());
}

TEST(TwoProportionTest, SymmetryAndMonotonicity) {
  std::mt19937 rng(12);
  std::uniform_int_distribution<int> n(1, 300);
  for (int i = 0; i < 500; ++i) {
    const int n1 = n(rng), n2 = n(rng);
    const int k1 = std::uniform_int_distribution<int>(0, n1)(rng);
    const int k2 = std::uniform_int_distribution<int>(0, n2)(rng);
    auto a = TwoProportionTest(k1, n1, k2, n2);
    auto b = TwoProportionTest(k2, n2, k1, n1);
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_GE(a->p_two_sided, 0.0);
    EXPECT_LE(a->p_two_sided, 1.0);
    EXPECT_EQ(a->z, -b->z);
    EXPECT_EQ(a->p_two_sided, b->p_two_sided);
  }
  // Equal sizes keep the pooled proportion fixed at 0.5 while the gap grows.
  double prev = -1.0;
  for (int d = 0; d <= 50; ++d) {
    const double z = std::abs(TwoProportionTest(50 + d, 100, 50 - d, 100)->z);
    EXPECT_GT(z, prev);
    prev = z;
  }
}

TEST(NormalCdf, SymmetryAndReferenceValues) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    EXPECT_LT(std::abs(NormalCdf(x) + NormalCdf(-x) - 1.0), 1e-12);
  }
  EXPECT_EQ(NormalCdf(0.0), 0.5);
  for (double x : {0.5, 1.0, 1.959963984540054, 3.0}) {
    EXPECT_NEAR(1.0 - NormalCdf(x), oracle::NormalUpperTailSimpson(x), 1e-12);
  }
}

TEST(SignificantAt, Levels) {
  EXPECT_TRUE(SignificantAt(0.2).empty());
  EXPECT_EQ(SignificantAt(0.03), std::vector<double>{0.05});
  EXPECT_EQ(SignificantAt(0.005), (std::vector<double>{0.05, 0.01}));
  EXPECT_TRUE(SignificantAt(1.0).empty());
}

}  // namespace
}  // namespace harmamp::disparity
