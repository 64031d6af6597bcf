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

#include "harmamp/stats.h"

#include <algorithm>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"

namespace harmamp::stats {
namespace {

TEST(MeanStd, ConstantSample) {
  const std::vector<double> xs = {2, 2, 2};
  auto s = MeanStd(xs);
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->n, 3u);
  EXPECT_DOUBLE_EQ(s->mean, 2.0);
  EXPECT_DOUBLE_EQ(s->std, 0.0);
}

TEST(MeanStd, SymmetricPairUsesPopulationDivisor) {
  const std::vector<double> xs = {0, 2};
  auto s = MeanStd(xs);
  ASSERT_TRUE(s.ok());
  EXPECT_DOUBLE_EQ(s->mean, 1.0);
  EXPECT_DOUBLE_EQ(s->std, 1.0);
}

TEST(MeanStd, MatchesTwoPassOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs(1000);
  for (double& x : xs) x = u(rng);
  auto s = MeanStd(xs);
  ASSERT_TRUE(s.ok());
  const auto [mean, sd] = oracle::MeanStdTwoPass(xs);
  EXPECT_NEAR(s->mean, mean, 1e-12);
  EXPECT_NEAR(s->std, sd, 1e-12);
}

TEST(MeanStd, EmptyIsError) {
  EXPECT_FALSE(MeanStd({}).ok());
}

TEST(Percentile, HandExamples) {
  const std::vector<double> five = {1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(*Percentile(five, 50), 3.0);
  EXPECT_DOUBLE_EQ(*Percentile(std::vector<double>{0, 1}, 50), 0.5);
  // rank 3.8 -> 4 + 0.8 * (5 - 4).
  EXPECT_NEAR(*Percentile(five, 95), 4.8, 1e-15);
}

TEST(Percentile, Errors) {
  EXPECT_FALSE(Percentile({}, 50).ok());
  const std::vector<double> xs = {1, 2};
  EXPECT_FALSE(Percentile(xs, -0.1).ok());
  EXPECT_FALSE(Percentile(xs, 100.1).ok());
}

TEST(Percentile, EndpointsMonotoneAndPermutationInvariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_int_distribution<int> size(1, 60);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(size(rng));
    for (double& x : xs) x = u(rng);
    const double lo = *std::min_element(xs.begin(), xs.end());
    const double hi = *std::max_element(xs.begin(), xs.end());
    EXPECT_EQ(*Percentile(xs, 0), lo);
    EXPECT_EQ(*Percentile(xs, 100), hi);
    double prev = lo;
    for (double q = 0; q <= 100; q += 2.5) {
      const double v = *Percentile(xs, q);
      EXPECT_GE(v, prev);
      EXPECT_GE(v, lo);
      EXPECT_LE(v, hi);
      prev = v;
    }
    std::vector<double> shuffled = xs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(*Percentile(xs, 95), *Percentile(shuffled, 95));
    EXPECT_NEAR(MeanStd(xs)->mean, MeanStd(shuffled)->mean, 1e-12);
  }
}

TEST(FitPolynomial, ExactlyCollinear) {
  const std::vector<Point> pts = {{0, 0.2}, {1, 0.4}, {2, 0.6}};
  auto c = FitPolynomial(pts, 1);
  ASSERT_TRUE(c.ok());
  EXPECT_NEAR(c->coefficients()[0], 0.2, 1e-15);
  EXPECT_NEAR(c->coefficients()[1], 0.2, 1e-15);
}

TEST(FitPolynomial, SymmetricDataHasZeroSlope) {
  const std::vector<Point> pts = {{0, 0}, {1, 1}, {2, 0}};
  auto c = FitPolynomial(pts, 1);
  ASSERT_TRUE(c.ok());
  EXPECT_NEAR(c->coefficients()[1], 0.0, 1e-15);
  EXPECT_NEAR(c->coefficients()[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(EvalPolynomial(*c, 2.0), 1.0 / 3.0, 1e-15);
}

TEST(FitPolynomial, MatchesNormalEquationOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> pts(50);
  std::vector<double> xs, ys;
  for (auto& p : pts) {
    p = {u(rng) * 4, u(rng)};
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  auto c = FitPolynomial(pts, 1);
  ASSERT_TRUE(c.ok());
  const auto [b0, b1] = oracle::LinearFitCramer(xs, ys);
  EXPECT_NEAR(c->coefficients()[0], b0, 1e-9);
  EXPECT_NEAR(c->coefficients()[1], b1, 1e-9);
}

TEST(FitPolynomial, QuadraticRecoversGenerator) {
  std::vector<Point> pts;
  for (int j = 0; j < 6; ++j) {
    const double x = j;
    pts.push_back({x, 0.1 - 0.05 * x + 0.02 * x * x});
  }
  auto c = FitPolynomial(pts, 2);
  ASSERT_TRUE(c.ok());
  EXPECT_NEAR(c->coefficients()[0], 0.1, 1e-12);
  EXPECT_NEAR(c->coefficients()[1], -0.05, 1e-12);
  EXPECT_NEAR(c->coefficients()[2], 0.02, 1e-12);
}

TEST(FitPolynomial, DegreeZeroIsMean) {
  const std::vector<Point> pts = {{0, 1}, {1, 2}, {5, 6}};
  auto c = FitPolynomial(pts, 0);
  ASSERT_TRUE(c.ok());
  EXPECT_DOUBLE_EQ(c->coefficients()[0], 3.0);
}

TEST(FitPolynomial, InsufficientDistinctPoints) {
  const std::vector<Point> pts = {{1, 0.2}, {1, 0.4}};
  auto c = FitPolynomial(pts, 1);
  EXPECT_FALSE(c.ok());
  EXPECT_FALSE(FitPolynomial({}, 0).ok());
  EXPECT_FALSE(FitPolynomial(pts, -1).ok());
}

TEST(FitPolynomial, ResidualsOrthogonalAndLocallyOptimal) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point> pts(5 + trial);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {double(i), u(rng)};
    auto c = FitPolynomial(pts, 1);
    ASSERT_TRUE(c.ok());
    double sr = 0, srx = 0;
    for (const auto& p : pts) {
      const double r = p.y - EvalPolynomial(*c, p.x);
      sr += r;
      srx += r * p.x;
    }
    EXPECT_LT(std::abs(sr), 1e-9);
    EXPECT_LT(std::abs(srx), 1e-9);
    const double sse = SumSquaredError(*c, pts);
    for (int k = 0; k < 2; ++k) {
      for (double d : {-1e-3, 1e-3}) {
        auto coeffs = c->coefficients();
        coeffs[k] += d;
        EXPECT_GE(SumSquaredError(PolyCoeffs(coeffs), pts), sse);
      }
    }
  }
}

TEST(EvalPolynomial, Horner) {
  EXPECT_DOUBLE_EQ(EvalPolynomial(PolyCoeffs({0.2, 0.2}), 1.0), 0.4);
  EXPECT_DOUBLE_EQ(EvalPolynomial(PolyCoeffs({0.7}), 123.0), 0.7);
  EXPECT_DOUBLE_EQ(EvalPolynomial(PolyCoeffs({1, 2, 3}), 2.0), 17.0);
}

}  // namespace
}  // namespace harmamp::stats
