// Copyright 2026 The Crossing Scenarios Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crossing/diversity.hpp"
#include "test_support.hpp"

using namespace crossing;

namespace {

// JSD of a point mass against the uniform law on n values, written out term by term.
double degenerate_jsd(int n) {
  const double m_hit = 0.5 * (1.0 + 1.0 / n);
  const double m_miss = 0.5 / n;
  double kl_p = std::log2(1.0 / m_hit);
  double kl_q = (1.0 / n) * std::log2((1.0 / n) / m_hit) + (n - 1) * (1.0 / n) * std::log2((1.0 / n) / m_miss);
  return 0.5 * kl_p + 0.5 * kl_q;
}

std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double sum = 0;
  for (auto& x : p) {
    x = rng() % 5 == 0 ? 0.0 : e(rng);
    sum += x;
  }
  if (sum == 0) {
    p[0] = 1;
    return p;
  }
  for (auto& x : p) x /= sum;
  return p;
}

}  // namespace

TEST(Jsd, ClosedForms) {
  const std::vector<double> point{1, 0}, half{0.5, 0.5};
  EXPECT_NEAR(jsd(point, half), 0.31127812445913283, 1e-12);
  EXPECT_NEAR(jsd(point, half), degenerate_jsd(2), 1e-12);
  EXPECT_NEAR(degenerate_jsd(4), 0.5487949406953986, 1e-12);
  EXPECT_NEAR(jsd(std::vector<double>{0, 0, 1, 0}, std::vector<double>(4, 0.25)), degenerate_jsd(4), 1e-12);
  EXPECT_DOUBLE_EQ(jsd(point, point), 0.0);
  // Disjoint supports reach the upper bound of 1 bit.
  EXPECT_NEAR(jsd(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 1.0, 1e-15);
}

TEST(Jsd, RejectsBadInputs) {
  EXPECT_THROW(jsd(std::vector<double>{1}, std::vector<double>{0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(jsd(std::vector<double>{0.7, 0.7}, std::vector<double>{0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(jsd(std::vector<double>{-0.5, 1.5}, std::vector<double>{0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(jsd(std::vector<double>{NAN, 1}, std::vector<double>{0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(uniform_distribution(1, 0), std::invalid_argument);
}

TEST(Jsd, SymmetryAndBoundsProperty) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng() % 8;
    const auto p = random_distribution(rng, n), q = random_distribution(rng, n);
    const double a = jsd(p, q), b = jsd(q, p);
    EXPECT_NEAR(a, b, 1e-12);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_NEAR(jsd(p, p), 0.0, 1e-12);
  }
}

TEST(Variance, ClosedForms) {
  EXPECT_NEAR(variance(uniform_distribution(1, 6)), 1.0, 1e-9);
  EXPECT_NEAR(variance(ValueDistribution{1, {1, 0}}), 0.688722, 1e-6);
  EXPECT_NEAR(variance(ValueDistribution{1, {0, 0, 0, 1}}), 0.451205, 1e-6);
  EXPECT_NEAR(variance(ValueDistribution{1, {0, 1, 0}}), 0.5408520829727552, 1e-12);
  EXPECT_NEAR(variance(ValueDistribution{1, {1}}), 1.0, 1e-12);
}

TEST(Variance, EmpiricalMatchesDirectEnumeration) {
  const ScenarioSpace space = builtin_crosswalk_space();
  const Profile p = *find_builtin_profile("profile-1");
  const ScoreModel model(space, p);
  const std::int64_t k = 4;
  std::vector<std::uint64_t> ambulance(4, 0);
  for (const auto& s : enumerate(space, p.constraint)) {
    if (model.bucket(s.assignment) == k) ++ambulance[s.assignment[8]];
  }
  std::uint64_t n = 0;
  for (auto c : ambulance) n += c;
  ASSERT_EQ(n, 92538U);
  ValueDistribution expected{9, {}};
  for (auto c : ambulance) expected.probabilities.push_back(static_cast<double>(c) / static_cast<double>(n));
  const auto got = empirical_distribution(space, p, 9, k);
  ASSERT_EQ(got.probabilities.size(), 4U);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(got.probabilities[i], expected.probabilities[i], 1e-15);
  EXPECT_NEAR(variance(space, p, 9, k), variance(expected), 1e-15);
}

TEST(Variance, EmptyBucketAndBadArguments) {
  const ScenarioSpace space = builtin_crosswalk_space();
  const Profile p = *find_builtin_profile("profile-3");
  EXPECT_THROW(variance(space, p, 1, 0), EmptyBucketError);
  EXPECT_THROW(variance(space, p, 1, 7), std::out_of_range);
  EXPECT_THROW(variance(space, p, 99, 3), std::invalid_argument);
}

TEST(Variance, FixedFeatureIsDegenerate) {
  // Profile 3 pins feature 5 to one of three values.
  const ScenarioSpace space = builtin_crosswalk_space();
  const Profile p = *find_builtin_profile("profile-3");
  EXPECT_NEAR(variance(space, p, 5, 3), 0.5408520829727552, 1e-12);
}

TEST(Curves, SkipEmptyBucketsAndHonorExclusions) {
  const ScenarioSpace space = builtin_crosswalk_space();
  const Profile p = *find_builtin_profile("profile-3");
  const auto curves = variance_curves(space, p, {5});
  ASSERT_EQ(curves.size(), 11U);
  for (const auto& c : curves) {
    EXPECT_NE(c.feature_id, 5U);
    ASSERT_EQ(c.points.size(), 5U);  // buckets 2..6
    EXPECT_EQ(c.points.front().k, 2);
    EXPECT_EQ(c.points.front().cd, Rational(1, 3));
    for (std::size_t i = 1; i < c.points.size(); ++i) EXPECT_LT(c.points[i - 1].cd, c.points[i].cd);
    for (const auto& pt : c.points) {
      EXPECT_GE(pt.v, 0.0);
      EXPECT_LE(pt.v, 1.0);
    }
  }
}

TEST(Curves, KernelsAgree) {
  const ScenarioSpace space = builtin_crosswalk_space();
  for (const auto& p : builtin_profiles()) {
    const auto a = variance_curves(space, p, {}, CountingMethod::kSerial);
    const auto b = variance_curves(space, p, {}, CountingMethod::kConvolution);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_EQ(a[i].points.size(), b[i].points.size());
      for (std::size_t j = 0; j < a[i].points.size(); ++j) EXPECT_EQ(a[i].points[j].v, b[i].points[j].v);
    }
  }
}
