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

#include <limits>
#include <random>

#include "crossing/rational.hpp"

using crossing::Rational;

TEST(Rational, NormalizesSignAndGcd) {
  Rational r(4, -6);
  EXPECT_EQ(r.numerator(), -2);
  EXPECT_EQ(r.denominator(), 3);
  EXPECT_EQ(Rational(0, -5), Rational(0));
  EXPECT_EQ(Rational(0, 7).denominator(), 1);
}

TEST(Rational, Arithmetic) {
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
  EXPECT_EQ(Rational(1, 3) - Rational(1, 2), Rational(-1, 6));
  EXPECT_EQ(Rational(2, 3) * Rational(9, 4), Rational(3, 2));
  EXPECT_EQ(Rational(5, 43) / Rational(5, 43), Rational(1));
  EXPECT_EQ(-Rational(1, 2), Rational(-1, 2));
}

TEST(Rational, ZeroDenominatorAndDivisionRejected) {
  EXPECT_THROW(Rational(1, 0), std::domain_error);
  EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
}

TEST(Rational, OverflowDetected) {
  const Rational big(std::numeric_limits<std::int64_t>::max());
  EXPECT_THROW(big + Rational(1), std::overflow_error);
  EXPECT_THROW(big * Rational(2), std::overflow_error);
}

TEST(Rational, Ordering) {
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_GT(Rational(-1, 3), Rational(-1, 2));
  EXPECT_EQ(Rational(2, 4) <=> Rational(1, 2), std::strong_ordering::equal);
}

TEST(Rational, RoundingHalfAwayFromZero) {
  EXPECT_EQ(Rational(5, 2).round_half_away(), 3);
  EXPECT_EQ(Rational(-5, 2).round_half_away(), -3);
  EXPECT_EQ(Rational(43, 5).round_half_away(), 9);  // 8.6
  EXPECT_EQ(Rational(28, 5).round_half_away(), 6);  // 5.6
  EXPECT_EQ(Rational(7, 3).round_half_away(), 2);
  EXPECT_EQ(Rational(-7, 3).floor(), -3);
  EXPECT_EQ(Rational(7, 3).floor(), 2);
}

TEST(Rational, ParseForms) {
  EXPECT_EQ(Rational::parse("2/3"), Rational(2, 3));
  EXPECT_EQ(Rational::parse("1"), Rational(1));
  EXPECT_EQ(Rational::parse("0.5"), Rational(1, 2));
  EXPECT_EQ(Rational::parse("-0.25"), Rational(-1, 4));
  EXPECT_EQ(Rational::parse(".75"), Rational(3, 4));
  EXPECT_EQ(Rational::parse("0.1"), Rational(1, 10));
}

TEST(Rational, ParseRejectsGarbage) {
  for (const char* bad : {"", "abc", "1/", "/2", "1/0", "0.", "1.2.3", "1/2/3", "0.x"}) {
    EXPECT_ANY_THROW(Rational::parse(bad)) << bad;
  }
}

TEST(Rational, ToStringRoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> num(-1000, 1000), den(1, 1000);
  for (int i = 0; i < 2000; ++i) {
    const Rational r(num(rng), den(rng));
    EXPECT_EQ(Rational::parse(r.to_string()), r);
    EXPECT_NEAR(r.to_double(), static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()), 0);
  }
}

TEST(Rational, FieldAxiomsProperty) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::int64_t> num(-50, 50), den(1, 50);
  for (int i = 0; i < 2000; ++i) {
    const Rational a(num(rng), den(rng)), b(num(rng), den(rng)), c(num(rng), den(rng));
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    if (b != Rational(0)) EXPECT_EQ(a / b * b, a);
  }
}

TEST(Rational, CheckedLcm) {
  EXPECT_EQ(crossing::checked_lcm(4, 6), 12);
  EXPECT_EQ(crossing::checked_lcm(1, 43), 43);
  EXPECT_THROW(crossing::checked_lcm(std::numeric_limits<std::int64_t>::max(), 2), std::overflow_error);
}
