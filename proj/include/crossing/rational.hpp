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

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace crossing {

/// Exact rational number with a 64-bit numerator and a positive denominator,
/// always stored in lowest terms. Arithmetic throws std::overflow_error
/// instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT: implicit from integers
  Rational(std::int64_t numerator, std::int64_t denominator);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }

  Rational operator+(const Rational& rhs) const;
  Rational operator-(const Rational& rhs) const;
  Rational operator*(const Rational& rhs) const;
  Rational operator/(const Rational& rhs) const;
  Rational operator-() const;
  Rational& operator+=(const Rational& rhs) { return *this = *this + rhs; }

  bool operator==(const Rational& rhs) const = default;
  std::strong_ordering operator<=>(const Rational& rhs) const;

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Nearest integer, ties rounded away from zero.
  std::int64_t round_half_away() const;
  std::int64_t floor() const;

  /// "p/q", or "p" when the denominator is 1.
  std::string to_string() const;

  /// Accepts "p/q", integers, and finite decimals such as "0.25" (parsed exactly).
  /// Throws std::invalid_argument on malformed text.
  static Rational parse(std::string_view text);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::int64_t checked_lcm(std::int64_t a, std::int64_t b);

}  // namespace crossing
